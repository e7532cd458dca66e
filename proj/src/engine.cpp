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

#include "bellsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace bellsim {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::octant: return "octant";
    case ModelKind::classic: return "classic";
    case ModelKind::qm: return "qm";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_string(const std::string& name) {
  if (name == "octant") return ModelKind::octant;
  if (name == "classic") return ModelKind::classic;
  if (name == "qm") return ModelKind::qm;
  return std::nullopt;
}

const char* to_string(ScanParameter p) {
  switch (p) {
    case ScanParameter::band_height: return "l";
    case ScanParameter::window_width: return "delta_t";
    case ScanParameter::relative_angle: return "relative_angle";
  }
  return "?";
}

PiecewisePattern ModelSpec::pattern() const {
  switch (kind) {
    case ModelKind::octant: return octant_pattern(band_height);
    case ModelKind::classic: return classic_pattern();
    case ModelKind::qm: break;
  }
  throw std::invalid_argument("the qm reference sampler has no piecewise pattern");
}

ExperimentConfig saturating_config(std::int64_t trials_per_pair, RunSeed seed) {
  ExperimentConfig config;
  config.model = {ModelKind::octant, kSaturatingBandHeight};
  config.settings = canonical_chsh_settings();
  config.window = CoincidenceWindow(1.5);
  config.trials_per_pair = trials_per_pair;
  config.seed = seed;
  return config;
}

namespace {

// Integer per-lane accumulator. Merging is plain addition, so the totals
// are independent of lane count and merge order.
struct PairTally {
  std::int64_t n_total = 0;
  std::int64_t n_coincident = 0;
  std::int64_t n_equal_coincident = 0;
  std::int64_t n_left_plus = 0;
  std::int64_t n_right_plus = 0;

  PairTally& operator+=(const PairTally& other) {
    n_total += other.n_total;
    n_coincident += other.n_coincident;
    n_equal_coincident += other.n_equal_coincident;
    n_left_plus += other.n_left_plus;
    n_right_plus += other.n_right_plus;
    return *this;
  }
};

void tally_trial(PairTally& tally, const TrialRecord& trial) {
  ++tally.n_total;
  if (trial.left.outcome > 0) ++tally.n_left_plus;
  if (trial.right.outcome > 0) ++tally.n_right_plus;
  if (trial.coincident) {
    ++tally.n_coincident;
    if (trial.left.outcome == trial.right.outcome) ++tally.n_equal_coincident;
  }
}

PairTally run_range(const ModelSpec& model, Setting left_setting,
                    Setting right_setting, CoincidenceWindow window,
                    RunSeed pair_seed, std::int64_t begin, std::int64_t end) {
  PairTally tally;
  switch (model.kind) {
    case ModelKind::octant: {
      const OctantModelParams params{model.band_height};
      for (std::int64_t i = begin; i < end; ++i) {
        TrialRng rng = trial_rng(pair_seed, static_cast<std::uint64_t>(i));
        const HiddenVariable hv = rng.uniform_hidden_variable();
        tally_trial(tally, make_trial_record(
                               left_setting, right_setting,
                               octant_respond(hv, left_setting, params),
                               octant_respond(hv, right_setting, params), window));
      }
      break;
    }
    case ModelKind::classic: {
      for (std::int64_t i = begin; i < end; ++i) {
        TrialRng rng = trial_rng(pair_seed, static_cast<std::uint64_t>(i));
        const HiddenVariable hv = rng.uniform_hidden_variable();
        tally_trial(tally, make_trial_record(left_setting, right_setting,
                                             classic_respond(hv, left_setting),
                                             classic_respond(hv, right_setting),
                                             window));
      }
      break;
    }
    case ModelKind::qm: {
      for (std::int64_t i = begin; i < end; ++i) {
        TrialRng rng = trial_rng(pair_seed, static_cast<std::uint64_t>(i));
        const JointOutcomes joint = qm_singlet_sample(left_setting, right_setting, rng);
        tally_trial(tally, make_trial_record(left_setting, right_setting,
                                             {joint.left, 0.0}, {joint.right, 0.0},
                                             window));
      }
      break;
    }
  }
  return tally;
}

PairEstimate estimate_from(const PairTally& tally) {
  PairEstimate est;
  est.n_total = tally.n_total;
  est.n_coincident = tally.n_coincident;
  est.n_left_plus = tally.n_left_plus;
  est.n_right_plus = tally.n_right_plus;
  est.gamma_hat = static_cast<double>(tally.n_coincident) /
                  static_cast<double>(tally.n_total);
  if (tally.n_coincident > 0) {
    const std::int64_t n_unequal = tally.n_coincident - tally.n_equal_coincident;
    const double e = static_cast<double>(tally.n_equal_coincident - n_unequal) /
                     static_cast<double>(tally.n_coincident);
    est.e_conditional = e;
    if (tally.n_coincident >= 2) {
      // Sample standard deviation of +/-1 products over sqrt(n).
      const double var = std::max(0.0, 1.0 - e * e) *
                         static_cast<double>(tally.n_coincident) /
                         static_cast<double>(tally.n_coincident - 1);
      est.std_error = std::sqrt(var / static_cast<double>(tally.n_coincident));
    }
  }
  return est;
}

}  // namespace

PairEstimate run_pair(const ModelSpec& model, Setting left, Setting right,
                      CoincidenceWindow window, std::int64_t n, RunSeed seed,
                      std::uint64_t pair_index, int lanes) {
  if (n < 1) {
    throw std::invalid_argument("run_pair: need at least one trial");
  }
  if (lanes < 1) {
    throw std::invalid_argument("run_pair: lane count must be >= 1");
  }
  const RunSeed pair_seed = substream(seed, pair_index);

  const int used = static_cast<int>(std::min<std::int64_t>(lanes, n));
  std::vector<PairTally> partial(used);
  if (used == 1) {
    partial[0] = run_range(model, left, right, window, pair_seed, 0, n);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(used);
    const std::int64_t chunk = n / used;
    const std::int64_t rest = n % used;
    std::int64_t begin = 0;
    for (int lane = 0; lane < used; ++lane) {
      const std::int64_t end = begin + chunk + (lane < rest ? 1 : 0);
      workers.emplace_back([&, lane, begin, end] {
        partial[static_cast<std::size_t>(lane)] =
            run_range(model, left, right, window, pair_seed, begin, end);
      });
      begin = end;
    }
    for (auto& w : workers) w.join();
  }

  PairTally total;
  for (const auto& t : partial) total += t;
  return estimate_from(total);
}

ChshEstimate run_chsh(const ExperimentConfig& config, int lanes) {
  ChshEstimate est;
  for (int k = 0; k < 4; ++k) {
    est.pairs[k] = run_pair(config.model, config.settings[kPairLeftIndex[k]],
                            config.settings[kPairRightIndex[k]], config.window,
                            config.trials_per_pair, config.seed,
                            static_cast<std::uint64_t>(k), lanes);
  }

  est.gamma_min = 1.0;
  bool all_defined = true;
  double var_sum = 0.0;
  for (const auto& pair : est.pairs) {
    est.gamma_min = std::min(est.gamma_min, pair.gamma_hat);
    all_defined = all_defined && pair.e_conditional.has_value();
    var_sum += pair.std_error * pair.std_error;
  }
  if (all_defined) {
    const auto& p = est.pairs;
    est.s_value = std::abs(*p[0].e_conditional + *p[1].e_conditional) +
                  std::abs(*p[2].e_conditional - *p[3].e_conditional);
    est.s_std_error = std::sqrt(var_sum);
  }
  if (est.gamma_min > 0.0) {
    est.bound_gamma = 6.0 / est.gamma_min - 4.0;
  }
  return est;
}

ExactChsh exact_chsh(const ModelSpec& model, const std::array<Setting, 4>& settings,
                     CoincidenceWindow window) {
  const PiecewisePattern pattern = model.pattern();
  ExactChsh out;
  out.common = sweep_common_part(pattern, settings, window);

  double gamma = 1.0;
  bool all_defined = true;
  std::array<double, 4> e{};
  for (int k = 0; k < 4; ++k) {
    out.pairs[k] = sweep_pair(pattern, settings[kPairLeftIndex[k]],
                              settings[kPairRightIndex[k]], window);
    gamma = std::min(gamma, out.pairs[k].p_coincidence);
    if (out.pairs[k].conditional_correlation) {
      e[k] = *out.pairs[k].conditional_correlation;
    } else {
      all_defined = false;
    }
  }
  out.gamma = gamma;
  if (all_defined) {
    out.s_value = std::abs(e[0] + e[1]) + std::abs(e[2] - e[3]);
  }
  if (gamma > 0.0) {
    out.bound_gamma = 6.0 / gamma - 4.0;
    if (out.s_value) {
      out.margin = *out.bound_gamma - *out.s_value;
    }
  }
  return out;
}

std::vector<ScanRow> scan(const ExperimentConfig& config, ScanParameter parameter,
                          double from, double to, int steps, int lanes) {
  if (steps < 2) {
    throw std::invalid_argument("scan: steps must be >= 2");
  }
  if (!(std::isfinite(from) && std::isfinite(to) && from <= to)) {
    throw std::invalid_argument("scan: invalid range (need finite from <= to)");
  }
  switch (parameter) {
    case ScanParameter::band_height:
      if (config.model.kind != ModelKind::octant) {
        throw std::invalid_argument("scan: parameter l requires the octant model");
      }
      if (from < 0.0 || to > 1.0) {
        throw std::invalid_argument("scan: l range must lie within [0, 1]");
      }
      break;
    case ScanParameter::window_width:
      if (from <= 0.0) {
        throw std::invalid_argument("scan: delta_t values must be > 0");
      }
      break;
    case ScanParameter::relative_angle:
      break;
  }

  std::vector<ScanRow> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double value =
        i + 1 == steps ? to : from + (to - from) * static_cast<double>(i) /
                                         static_cast<double>(steps - 1);

    ExperimentConfig row_config = config;
    switch (parameter) {
      case ScanParameter::band_height:
        row_config.model.band_height = value;
        break;
      case ScanParameter::window_width:
        row_config.window = CoincidenceWindow(value);
        break;
      case ScanParameter::relative_angle:
        row_config.settings = chsh_settings(value);
        break;
    }

    ScanRow row;
    row.value = value;
    if (row_config.model.is_piecewise()) {
      const ExactChsh exact =
          exact_chsh(row_config.model, row_config.settings, row_config.window);
      row.gamma = exact.gamma;
      row.s_value = exact.s_value;
      row.bound_gamma = exact.bound_gamma;
      row.margin = exact.margin;
    } else {
      const ChshEstimate mc = run_chsh(row_config, lanes);
      row.gamma = mc.gamma_min;
      row.s_value = mc.s_value;
      row.bound_gamma = mc.bound_gamma;
      if (mc.s_value && mc.bound_gamma) {
        row.margin = *mc.bound_gamma - *mc.s_value;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

int resolve_lane_count(int requested) {
  int lanes = requested;
  if (lanes <= 0) {
    lanes = static_cast<int>(std::thread::hardware_concurrency());
    if (lanes < 1) lanes = 1;
  }
  if (const char* cap_text = std::getenv("BELLSIM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(cap_text, &end, 10);
    if (end == cap_text || *end != '\0' || cap < 1) {
      throw std::runtime_error(
          "BELLSIM_THREADS must be a positive integer (worker-lane cap)");
    }
    lanes = static_cast<int>(std::min<long>(lanes, cap));
  }
  return lanes;
}

}  // namespace bellsim
