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

#include "bellsim/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bellsim/models.hpp"

namespace bellsim {

double critical_gamma() { return 3.0 - 3.0 / std::numbers::sqrt2; }

double efficiency_reference() { return 1.0 / std::numbers::sqrt2; }

BoundPair bounds(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("bounds: gamma must lie in (0, 1]");
  }
  return {std::max(0.0, 4.0 - 3.0 / gamma), 6.0 / gamma - 4.0};
}

void FiniteModel::validate() const {
  if (atoms.empty()) {
    throw std::invalid_argument("FiniteModel: no atoms");
  }
  double total = 0.0;
  for (const Atom& at : atoms) {
    if (!(std::isfinite(at.weight) && at.weight > 0.0)) {
      throw std::invalid_argument("FiniteModel: weights must be positive");
    }
    total += at.weight;
    for (const double v : {at.a, at.b, at.c, at.d}) {
      if (!(v >= -1.0 && v <= 1.0)) {
        throw std::invalid_argument("FiniteModel: values must lie in [-1, +1]");
      }
    }
  }
  if (std::abs(total - 1.0) > kIdentityTol) {
    throw std::invalid_argument("FiniteModel: weights must sum to 1");
  }
}

namespace {

/// Weighted sums everything below is made of. For pair k the product value
/// of an atom is (left value) * (right value) of that pair's settings.
struct AtomSums {
  std::array<double, 4> set_weight{};        // P of each coincidence set
  std::array<double, 4> set_product{};       // sum w*x*y over each set
  double intersection_weight = 0.0;          // P of the four-way overlap
  std::array<double, 4> intersection_product{};
  std::array<double, 4> complement_weight{};   // P(set k minus overlap)
  std::array<double, 4> complement_product{};
  std::array<std::array<double, 4>, 4> pairwise_weight{};  // P(set j and set k)
};

double pair_product(const FiniteModel::Atom& at, int pair) {
  const double left = kPairLeftIndex[pair] == 0 ? at.a : at.b;
  const double right = kPairRightIndex[pair] == 2 ? at.c : at.d;
  return left * right;
}

AtomSums accumulate(const FiniteModel& model) {
  AtomSums s;
  for (const auto& at : model.atoms) {
    const bool all_four =
        at.in_pair_set[0] && at.in_pair_set[1] && at.in_pair_set[2] && at.in_pair_set[3];
    if (all_four) {
      s.intersection_weight += at.weight;
    }
    for (int k = 0; k < 4; ++k) {
      if (!at.in_pair_set[k]) continue;
      const double wxy = at.weight * pair_product(at, k);
      s.set_weight[k] += at.weight;
      s.set_product[k] += wxy;
      if (all_four) {
        s.intersection_product[k] += wxy;
      } else {
        s.complement_weight[k] += at.weight;
        s.complement_product[k] += wxy;
      }
      for (int j = 0; j < 4; ++j) {
        if (at.in_pair_set[j]) s.pairwise_weight[j][k] += at.weight;
      }
    }
  }
  return s;
}

double chsh_combination(const std::array<double, 4>& e) {
  return std::abs(e[0] + e[1]) + std::abs(e[2] - e[3]);
}

}  // namespace

FiniteEval eval_finite(const FiniteModel& model) {
  model.validate();
  const AtomSums s = accumulate(model);

  FiniteEval out;
  for (int k = 0; k < 4; ++k) {
    if (s.set_weight[k] <= 0.0) {
      out.empty_pair = k;
      return out;
    }
  }
  out.defined = true;

  DeltaGammaReport& r = out.report;
  r.p_intersection = s.intersection_weight;
  double gamma = 1.0;
  double delta = 1.0;
  for (int k = 0; k < 4; ++k) {
    r.pair_probability[k] = s.set_weight[k];
    r.conditional_correlation[k] = s.set_product[k] / s.set_weight[k];
    gamma = std::min(gamma, s.set_weight[k]);
    delta = std::min(delta, s.intersection_weight / s.set_weight[k]);
  }
  r.gamma = gamma;
  r.delta = delta;
  r.lhs = chsh_combination(r.conditional_correlation);
  r.bound_thm2 = 4.0 - 2.0 * delta;
  r.bound_gamma = 6.0 / gamma - 4.0;
  r.margin_thm2 = r.bound_thm2 - r.lhs;
  r.margin_gamma = r.bound_gamma - r.lhs;
  return out;
}

TheoremCheck check_theorem2(const FiniteModel& model, double tol) {
  const FiniteEval eval = eval_finite(model);
  TheoremCheck check;
  if (!eval.defined) {
    return check;
  }
  check.applicable = true;
  check.margin = eval.report.margin_thm2;
  check.passed = eval.report.lhs <= eval.report.bound_thm2 + tol;
  if (!check.passed) {
    check.witness = model;
  }
  return check;
}

ProofChainReport check_proof_chain(const FiniteModel& model, double identity_tol,
                                   double tol) {
  model.validate();
  const AtomSums s = accumulate(model);

  ProofChainReport rep;
  for (int k = 0; k < 4; ++k) {
    if (s.set_weight[k] <= 0.0) {
      return rep;  // conditional correlations undefined; nothing to check
    }
  }
  rep.applicable = true;
  rep.intersection_positive = s.intersection_weight > 0.0;

  std::array<double, 4> e_pair{};
  for (int k = 0; k < 4; ++k) {
    e_pair[k] = s.set_product[k] / s.set_weight[k];
  }
  const double gamma = *std::min_element(s.set_weight.begin(), s.set_weight.end());
  double delta = 1.0;
  for (int k = 0; k < 4; ++k) {
    delta = std::min(delta, s.intersection_weight / s.set_weight[k]);
  }

  std::array<double, 4> e_common{};
  if (rep.intersection_positive) {
    for (int k = 0; k < 4; ++k) {
      e_common[k] = s.intersection_product[k] / s.intersection_weight;
    }

    // (a) plain CHSH on the common part.
    rep.chsh_on_common_part.checked = true;
    const double lhs_common = chsh_combination(e_common);
    rep.chsh_on_common_part.margin = 2.0 - lhs_common;
    rep.chsh_on_common_part.passed = lhs_common <= 2.0 + tol;
  }

  // (b) E(pair|set) splits exactly into the overlap and remainder terms.
  rep.decomposition_identity.checked = true;
  double worst_residual = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double p_overlap = s.intersection_weight / s.set_weight[k];
    const double p_rest = s.complement_weight[k] / s.set_weight[k];
    const double e_overlap = s.intersection_weight > 0.0
                                 ? s.intersection_product[k] / s.intersection_weight
                                 : 0.0;
    const double e_rest = s.complement_weight[k] > 0.0
                              ? s.complement_product[k] / s.complement_weight[k]
                              : 0.0;
    const double rhs = p_overlap * e_overlap + p_rest * e_rest;
    worst_residual = std::max(worst_residual, std::abs(e_pair[k] - rhs));
  }
  rep.decomposition_identity.margin = identity_tol - worst_residual;
  rep.decomposition_identity.passed = worst_residual <= identity_tol;

  // (c) |E(pair|set) - delta * E(pair|common part)| <= 1 - delta.
  if (rep.intersection_positive) {
    rep.common_part_estimate.checked = true;
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
      margin = std::min(margin,
                        (1.0 - delta) - std::abs(e_pair[k] - delta * e_common[k]));
    }
    rep.common_part_estimate.margin = margin;
    rep.common_part_estimate.passed = margin >= -tol;
  }

  // (d) P(other three | anchor) >= sum of pairwise conditionals - 2.
  rep.bonferroni.checked = true;
  {
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) {
      double sum_conditionals = 0.0;
      for (int j = 0; j < 4; ++j) {
        if (j != k) sum_conditionals += s.pairwise_weight[j][k] / s.set_weight[k];
      }
      const double lhs = s.intersection_weight / s.set_weight[k];
      margin = std::min(margin, lhs - (sum_conditionals - 2.0));
    }
    rep.bonferroni.margin = margin;
    rep.bonferroni.passed = margin >= -tol;
  }

  // (e) every pairwise conditional is at least 2 - 1/gamma.
  rep.pairwise_overlap_bound.checked = true;
  {
    const double floor = 2.0 - 1.0 / gamma;
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) {
        if (j == k) continue;
        margin = std::min(margin, s.pairwise_weight[j][k] / s.set_weight[k] - floor);
      }
    }
    rep.pairwise_overlap_bound.margin = margin;
    rep.pairwise_overlap_bound.passed = margin >= -tol;
  }

  // (f) delta >= 4 - 3/gamma.
  rep.delta_gamma_bound.checked = true;
  rep.delta_gamma_bound.margin = delta - (4.0 - 3.0 / gamma);
  rep.delta_gamma_bound.passed = rep.delta_gamma_bound.margin >= -tol;

  return rep;
}

FiniteModel random_finite_model(RunSeed seed, std::uint64_t index) {
  TrialRng rng(seed, index);
  const int mode = static_cast<int>(index % 6);
  const std::size_t n = 1 + static_cast<std::size_t>(rng() % 32);

  FiniteModel model;
  model.atoms.resize(n);

  for (auto& at : model.atoms) {
    at.weight = mode == 3 ? std::pow(rng.uniform_double(), 12.0) + 1e-12
                          : rng.uniform_double() + 1e-9;

    const bool spin_valued = mode == 1 || mode == 2 || mode == 3;
    for (double* v : {&at.a, &at.b, &at.c, &at.d}) {
      if (spin_valued) {
        *v = rng.uniform_sign();
      } else if (mode == 4 && rng.bernoulli(0.5)) {
        *v = rng.uniform_sign();
      } else {
        *v = 2.0 * rng.uniform_double() - 1.0;
      }
    }

    switch (mode) {
      case 2: {  // near-disjoint sets
        at.in_pair_set[rng() % 4] = true;
        if (rng.bernoulli(0.05)) at.in_pair_set[rng() % 4] = true;
        break;
      }
      case 5: {  // full sets: the classic CHSH regime
        at.in_pair_set = {true, true, true, true};
        break;
      }
      default: {
        const double density = mode == 4 ? 0.95 : (mode == 1 ? 0.5 : 0.7);
        for (int k = 0; k < 4; ++k) at.in_pair_set[k] = rng.bernoulli(density);
        break;
      }
    }
  }

  // Every coincidence set must carry positive probability.
  for (int k = 0; k < 4; ++k) {
    bool nonempty = false;
    for (const auto& at : model.atoms) nonempty = nonempty || at.in_pair_set[k];
    if (!nonempty) model.atoms[rng() % n].in_pair_set[k] = true;
  }

  double total = 0.0;
  for (const auto& at : model.atoms) total += at.weight;
  for (auto& at : model.atoms) at.weight /= total;
  return model;
}

FiniteModel discretize_pattern(const PiecewisePattern& pattern,
                               const std::array<Setting, 4>& settings,
                               CoincidenceWindow window) {
  pattern.validate();
  const auto pts = detail::merged_breakpoints(pattern, settings);
  const auto arcs = detail::arcs_of(pts);

  const double band = pattern.band_height;
  const double main = 1.0 - band;

  FiniteModel model;
  model.atoms.reserve(arcs.size() * 2);
  for (const auto& arc : arcs) {
    const double w = arc.length / kTwoPi;
    std::array<int, 4> outcome{};
    std::array<double, 4> time{};
    for (int s = 0; s < 4; ++s) {
      const double phi = canonicalize_angle(arc.midpoint - settings[s].angle());
      outcome[s] = pattern.outcome_at(phi);
      time[s] = pattern.time_at(phi);
    }

    FiniteModel::Atom atom;
    atom.a = outcome[0];
    atom.b = outcome[1];
    atom.c = outcome[2];
    atom.d = outcome[3];

    if (main > 0.0) {
      atom.weight = w * main;
      for (int k = 0; k < 4; ++k) {
        atom.in_pair_set[k] = is_coincident(time[kPairLeftIndex[k]],
                                            time[kPairRightIndex[k]], window);
      }
      model.atoms.push_back(atom);
    }
    if (band > 0.0) {
      atom.weight = w * band;
      atom.in_pair_set = {true, true, true, true};  // band detects at time 0
      model.atoms.push_back(atom);
    }
  }
  return model;
}

namespace {

void track_margin(SuiteResult& result, double margin, bool first) {
  if (first) {
    result.min_margin = margin;
    result.max_margin = margin;
  } else {
    result.min_margin = std::min(result.min_margin, margin);
    result.max_margin = std::max(result.max_margin, margin);
  }
}

}  // namespace

SuiteResult run_theorem2_suite(int n_models, RunSeed seed) {
  SuiteResult result;
  result.suite = "theorem2";
  result.models = n_models;
  for (int i = 0; i < n_models; ++i) {
    const FiniteModel model = random_finite_model(seed, static_cast<std::uint64_t>(i));
    const TheoremCheck check = check_theorem2(model);
    if (!check.applicable) {
      ++result.skipped;
      continue;
    }
    track_margin(result, check.margin, result.passed + result.failed == 0);
    if (check.passed) {
      ++result.passed;
    } else {
      ++result.failed;
      if (result.witnesses.size() < 8) result.witnesses.push_back(*check.witness);
    }
  }
  return result;
}

SuiteResult run_proof_chain_suite(int n_models, RunSeed seed) {
  SuiteResult result;
  result.suite = "proof-chain";
  result.models = n_models;
  for (int i = 0; i < n_models; ++i) {
    const FiniteModel model = random_finite_model(seed, static_cast<std::uint64_t>(i));
    const ProofChainReport rep = check_proof_chain(model);
    if (!rep.applicable) {
      ++result.skipped;
      continue;
    }
    double min_step_margin = std::numeric_limits<double>::infinity();
    for (const auto* step :
         {&rep.chsh_on_common_part, &rep.decomposition_identity,
          &rep.common_part_estimate, &rep.bonferroni, &rep.pairwise_overlap_bound,
          &rep.delta_gamma_bound}) {
      if (step->checked) min_step_margin = std::min(min_step_margin, step->margin);
    }
    track_margin(result, min_step_margin, result.passed + result.failed == 0);
    if (rep.all_passed()) {
      ++result.passed;
    } else {
      ++result.failed;
      if (result.witnesses.size() < 8) result.witnesses.push_back(model);
    }
  }
  return result;
}

SuiteResult run_saturation_suite() {
  SuiteResult result;
  result.suite = "saturation";
  result.models = 1;

  const PiecewisePattern pattern = octant_pattern(kSaturatingBandHeight);
  const auto settings = canonical_chsh_settings();
  const CoincidenceWindow window(1.5);
  const FiniteModel model = discretize_pattern(pattern, settings, window);
  const FiniteEval eval = eval_finite(model);

  const double sqrt8 = 2.0 * std::numbers::sqrt2;
  bool ok = eval.defined;
  double worst = 0.0;
  if (eval.defined) {
    const DeltaGammaReport& r = eval.report;
    const double residuals[] = {
        std::abs(r.lhs - r.bound_gamma),                 // saturation of 6/gamma - 4
        std::abs(r.delta - (4.0 - 3.0 / r.gamma)),       // delta chain equality
        std::abs(r.lhs - sqrt8),                         // the quantum value itself
        std::abs(r.gamma - critical_gamma()),
    };
    for (const double res : residuals) worst = std::max(worst, res);
    ok = worst <= kIdentityTol;
  }
  result.min_margin = kIdentityTol - worst;
  result.max_margin = result.min_margin;
  if (ok) {
    result.passed = 1;
  } else {
    result.failed = 1;
    result.witnesses.push_back(model);
  }
  return result;
}

}  // namespace bellsim
