// Copyright 2026 The Bellsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellsim/crosscheck.hpp"
#include "bellsim/engine.hpp"
#include "bellsim/lab.hpp"

namespace bellsim {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Config or report files that fail to parse or validate.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radians, either numeric text or a pi expression: "pi", "pi/4", "3pi/4",
/// "-pi/4", "2pi". Throws ConfigError otherwise.
double parse_angle(const std::string& text);

/// Strict config schema: named keys only, ranges enforced, diagnostics name
/// the offending key. Angles accept numbers (radians) or pi-expression
/// strings.
ExperimentConfig config_from_json(const ordered_json& j);
ExperimentConfig load_config(const std::string& path);

/// Canonical echo: fixed key order, canonicalized angles in radians. Parsing
/// the echo and re-serializing reproduces it byte for byte.
ordered_json config_to_json(const ExperimentConfig& config);

ordered_json pair_statistics_to_json(const PairStatistics& stats);
ordered_json exact_chsh_to_json(const ExactChsh& exact);
ordered_json chsh_to_json(const ChshEstimate& est,
                          const std::array<Setting, 4>& settings);
ordered_json finite_model_to_json(const FiniteModel& model);
ordered_json suite_to_json(const SuiteResult& result);
ordered_json crosscheck_to_json(const McExactReport& report);

struct RunVerdicts {
  bool violates_classic_bound = false;
  bool exceeds_coincidence_bound = false;  // would falsify the bound 6/gamma - 4
  bool saturates = false;                  // S equals the bound within tolerance
};

/// Verdicts from an S value, the 6/gamma - 4 bound and the tolerance used
/// for the saturation call (1e-9 for exact numbers, 4 combined standard
/// errors for Monte Carlo ones).
RunVerdicts make_verdicts(std::optional<double> s_value,
                          std::optional<double> bound_gamma, double tol);

ordered_json verdicts_to_json(const RunVerdicts& v);

/// Full simulate-run report. With `canonical` set the timestamp is omitted,
/// making the report a pure function of (config, seed).
ordered_json simulate_report(const ExperimentConfig& config, const ChshEstimate& est,
                             const std::optional<ExactChsh>& exact_reference,
                             bool canonical);

/// Shortest round-trip decimal form of a double (CSV cells).
std::string format_double(double x);

/// Per-pair CSV: pair,left_setting,right_setting,n_total,n_coincident,
/// gamma_hat,e_conditional,std_error (e_conditional empty when undefined).
std::string pairs_csv(const ChshEstimate& est, const std::array<Setting, 4>& settings);

/// Scan CSV: value,gamma,S,bound_6g4,margin, one row per parameter value,
/// sorted by value.
std::string scan_csv(const std::vector<ScanRow>& rows);

}  // namespace bellsim
