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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bellsim/core.hpp"
#include "bellsim/exact.hpp"
#include "bellsim/models.hpp"

namespace bellsim {

enum class ModelKind { octant, classic, qm };

const char* to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::octant;
  double band_height = 0.0;  // octant only

  bool is_piecewise() const { return kind != ModelKind::qm; }
  PiecewisePattern pattern() const;  // octant/classic only; throws for qm
};

struct ExperimentConfig {
  ModelSpec model;
  std::array<Setting, 4> settings;  // a, b, c, d
  CoincidenceWindow window{1.5};
  std::int64_t trials_per_pair = 1;
  RunSeed seed;
};

/// The paper-geometry experiment at the saturating band height:
/// octant model, settings (0, pi/2, pi/4, -pi/4), window 3/2.
ExperimentConfig saturating_config(std::int64_t trials_per_pair, RunSeed seed);

/// Estimates for one setting pair. All statistics derive from integer
/// tallies, so results are identical for every worker-lane count.
struct PairEstimate {
  std::int64_t n_total = 0;
  std::int64_t n_coincident = 0;
  double gamma_hat = 0.0;
  std::optional<double> e_conditional;  // absent when no trial was coincident
  double std_error = 0.0;               // 0 when e_conditional is absent or n_coincident < 2
  std::int64_t n_left_plus = 0;         // unconditioned marginal counts,
  std::int64_t n_right_plus = 0;        // for no-signaling diagnostics
};

struct ChshEstimate {
  std::array<PairEstimate, 4> pairs;     // AC, AD, BC, BD
  std::optional<double> s_value;         // |E1+E2| + |E3-E4|; absent if any pair is
  double s_std_error = 0.0;              // quadrature sum of pair errors
  double gamma_min = 0.0;                // min of the four gamma_hat
  double bound_classic = 2.0;
  std::optional<double> bound_gamma;     // 6/gamma_min - 4; absent when gamma_min == 0
};

/// Runs n trials at one setting pair: fresh lambda per trial via the
/// counter-derived RNG, both wings evaluated locally, coincidence flagged.
/// `pair_index` selects a disjoint sub-stream of the run seed.
PairEstimate run_pair(const ModelSpec& model, Setting left, Setting right,
                      CoincidenceWindow window, std::int64_t n, RunSeed seed,
                      std::uint64_t pair_index, int lanes = 1);

/// Four run_pair calls on (a,c), (a,d), (b,c), (b,d) with disjoint streams.
ChshEstimate run_chsh(const ExperimentConfig& config, int lanes = 1);

enum class ScanParameter { band_height, window_width, relative_angle };

const char* to_string(ScanParameter p);

struct ScanRow {
  double value = 0.0;
  double gamma = 0.0;
  std::optional<double> s_value;
  std::optional<double> bound_gamma;  // 6/gamma - 4
  std::optional<double> margin;       // bound_gamma - s_value
};

/// One row per parameter value, exact for piecewise models and Monte Carlo
/// for the qm reference. relative_angle x maps to settings (0, 2x, x, -x).
std::vector<ScanRow> scan(const ExperimentConfig& config, ScanParameter parameter,
                          double from, double to, int steps, int lanes = 1);

/// Exact per-pair statistics and the common-part measures for a piecewise
/// model at the config's settings (gamma, the four conditional correlations,
/// S, delta and both bounds).
struct ExactChsh {
  std::array<PairStatistics, 4> pairs;
  CommonPartStats common;
  double gamma = 0.0;  // min over pairs of p_coincidence
  std::optional<double> s_value;
  std::optional<double> bound_gamma;
  std::optional<double> margin;
};

ExactChsh exact_chsh(const ModelSpec& model, const std::array<Setting, 4>& settings,
                     CoincidenceWindow window);

/// Lane count used by the CLI: `requested` (or hardware concurrency when 0),
/// capped by the BELLSIM_THREADS environment variable. Lane count never
/// changes results; it only changes wall time.
int resolve_lane_count(int requested);

}  // namespace bellsim
