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

#include <string>
#include <vector>

#include "bellsim/engine.hpp"

namespace bellsim {

/// One compared quantity: Monte Carlo estimate with its standard error next
/// to the exact reference, and the z-score of the difference.
struct McExactRow {
  std::string pair;      // AC, AD, BC, BD
  std::string quantity;  // "gamma" or "e_conditional"
  double exact_value = 0.0;
  double mc_value = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};

struct McExactReport {
  std::vector<McExactRow> rows;
  double max_abs_z = 0.0;
};

/// Cross-validates the trial engine against the exact reference at the given
/// settings: sweep values for piecewise models, cos(a - c) with gamma = 1
/// for the qm sampler. Requires n >= 1.
McExactReport mc_vs_exact_report(const ModelSpec& model,
                                 const std::array<Setting, 4>& settings,
                                 CoincidenceWindow window, std::int64_t n,
                                 RunSeed seed, int lanes = 1);

/// Same comparison for an estimate that has already been computed (used to
/// embed the table in simulate reports without rerunning the trials).
McExactReport crosscheck_estimate(const ChshEstimate& estimate,
                                  const ModelSpec& model,
                                  const std::array<Setting, 4>& settings,
                                  CoincidenceWindow window);

}  // namespace bellsim
