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

#include "bellsim/crosscheck.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bellsim {

namespace {

double z_score(double diff, double std_error) {
  if (std_error > 0.0) return diff / std_error;
  if (diff == 0.0) return 0.0;
  return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace

namespace {

struct ExactPairReference {
  double gamma = 1.0;
  bool e_defined = false;
  double e = 0.0;
};

std::array<ExactPairReference, 4> exact_reference_for(
    const ModelSpec& model, const std::array<Setting, 4>& settings,
    CoincidenceWindow window) {
  std::array<ExactPairReference, 4> refs{};
  if (model.is_piecewise()) {
    const PiecewisePattern pattern = model.pattern();
    for (int k = 0; k < 4; ++k) {
      const PairStatistics stats =
          sweep_pair(pattern, settings[kPairLeftIndex[k]],
                     settings[kPairRightIndex[k]], window);
      refs[k].gamma = stats.p_coincidence;
      refs[k].e_defined = stats.conditional_correlation.has_value();
      refs[k].e = stats.conditional_correlation.value_or(0.0);
    }
  } else {
    for (int k = 0; k < 4; ++k) {
      refs[k].gamma = 1.0;
      refs[k].e_defined = true;
      refs[k].e = std::cos(settings[kPairLeftIndex[k]].angle() -
                           settings[kPairRightIndex[k]].angle());
    }
  }
  return refs;
}

McExactReport compare(const ChshEstimate& mc,
                      const std::array<ExactPairReference, 4>& refs) {
  McExactReport report;
  for (int k = 0; k < 4; ++k) {
    const PairEstimate& est = mc.pairs[k];

    McExactRow gamma_row;
    gamma_row.pair = kPairNames[k];
    gamma_row.quantity = "gamma";
    gamma_row.exact_value = refs[k].gamma;
    gamma_row.mc_value = est.gamma_hat;
    gamma_row.std_error = std::sqrt(est.gamma_hat * (1.0 - est.gamma_hat) /
                                    static_cast<double>(est.n_total));
    gamma_row.z = z_score(gamma_row.mc_value - gamma_row.exact_value,
                          gamma_row.std_error);
    report.rows.push_back(gamma_row);

    if (refs[k].e_defined && est.e_conditional) {
      McExactRow e_row;
      e_row.pair = kPairNames[k];
      e_row.quantity = "e_conditional";
      e_row.exact_value = refs[k].e;
      e_row.mc_value = *est.e_conditional;
      e_row.std_error = est.std_error;
      e_row.z = z_score(e_row.mc_value - e_row.exact_value, e_row.std_error);
      report.rows.push_back(e_row);
    }
  }

  for (const auto& row : report.rows) {
    report.max_abs_z = std::max(report.max_abs_z, std::abs(row.z));
  }
  return report;
}

}  // namespace

McExactReport mc_vs_exact_report(const ModelSpec& model,
                                 const std::array<Setting, 4>& settings,
                                 CoincidenceWindow window, std::int64_t n,
                                 RunSeed seed, int lanes) {
  if (n < 1) {
    throw std::invalid_argument("mc_vs_exact_report: need at least one trial");
  }
  ExperimentConfig config;
  config.model = model;
  config.settings = settings;
  config.window = window;
  config.trials_per_pair = n;
  config.seed = seed;
  return compare(run_chsh(config, lanes), exact_reference_for(model, settings, window));
}

McExactReport crosscheck_estimate(const ChshEstimate& estimate,
                                  const ModelSpec& model,
                                  const std::array<Setting, 4>& settings,
                                  CoincidenceWindow window) {
  return compare(estimate, exact_reference_for(model, settings, window));
}

}  // namespace bellsim
