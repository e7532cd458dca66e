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
#include <optional>
#include <string>
#include <vector>

#include "bellsim/core.hpp"
#include "bellsim/exact.hpp"

namespace bellsim {

inline constexpr double kIdentityTol = 1e-12;  // exact algebraic identities
inline constexpr double kTheoremTol = 1e-9;    // inequality assertions

/// Coincidence probability above which the CHSH bound with coincidence
/// post-selection, 6/gamma - 4, drops below the quantum value 2*sqrt(2):
/// gamma_crit = 3 - 3/sqrt(2).
double critical_gamma();

/// The analogous threshold constant for the detector-efficiency case,
/// 1/sqrt(2), quoted for comparison.
double efficiency_reference();

struct BoundPair {
  double delta_lb;  // max(0, 4 - 3/gamma)
  double s_bound;   // 6/gamma - 4
};

/// The gamma -> (delta lower bound, CHSH bound) chain. Requires
/// 0 < gamma <= 1.
BoundPair bounds(double gamma);

/// Explicit finite sample space with weights, four bounded observables and
/// four coincidence subsets: the brute-force test bench for the modified
/// CHSH inequality.
struct FiniteModel {
  struct Atom {
    double weight = 0.0;                     // > 0; weights sum to 1
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // values in [-1, +1]
    std::array<bool, 4> in_pair_set{};       // membership in the AC,AD,BC,BD sets
  };
  std::vector<Atom> atoms;

  /// Throws std::invalid_argument when weights are not positive and
  /// normalized (to 1e-12) or a value leaves [-1, +1].
  void validate() const;
};

/// Everything the modified inequality talks about, evaluated exactly by
/// weighted sums over atoms.
struct DeltaGammaReport {
  double gamma = 0.0;   // min over the four sets of their probability
  double delta = 0.0;   // min over anchors of P(intersection)/P(anchor set)
  double lhs = 0.0;     // |E1 + E2| + |E3 - E4| of the conditional correlations
  double bound_thm2 = 0.0;    // 4 - 2*delta
  double bound_gamma = 0.0;   // 6/gamma - 4
  double margin_thm2 = 0.0;   // bound_thm2 - lhs
  double margin_gamma = 0.0;  // bound_gamma - lhs
  double p_intersection = 0.0;
  std::array<double, 4> pair_probability{};
  std::array<double, 4> conditional_correlation{};
};

struct FiniteEval {
  bool defined = false;  // false when some coincidence set has probability 0
  int empty_pair = -1;   // index of the offending set when !defined
  DeltaGammaReport report{};
};

FiniteEval eval_finite(const FiniteModel& model);

/// One pass/fail verdict with the violating model attached when it fails
/// (a failure would falsify the implementation, not the theorem).
struct TheoremCheck {
  bool applicable = false;  // false when eval_finite is undefined for the model
  bool passed = false;
  double margin = 0.0;  // (4 - 2*delta) - lhs
  std::optional<FiniteModel> witness;
};

TheoremCheck check_theorem2(const FiniteModel& model, double tol = kTheoremTol);

/// Per-step verification of the derivation: (a) plain CHSH restricted to the
/// common part, (b) the conditional-expectation decomposition identity,
/// (c) the |E(pair|pair set) - delta*E(pair|common part)| <= 1 - delta
/// estimate, (d) the Bonferroni step, (e) the pairwise-overlap lower bound
/// 2 - 1/gamma, and (f) delta >= 4 - 3/gamma.
struct ProofChainReport {
  struct Step {
    bool checked = false;  // false when the step's precondition fails
    bool passed = true;
    double margin = 0.0;  // slack left in the inequality (identity: tol - residual)
  };

  bool applicable = false;        // all four sets have positive probability
  bool intersection_positive = false;
  Step chsh_on_common_part;       // (a)
  Step decomposition_identity;    // (b)
  Step common_part_estimate;      // (c)
  Step bonferroni;                // (d)
  Step pairwise_overlap_bound;    // (e)
  Step delta_gamma_bound;         // (f)

  bool all_passed() const {
    for (const Step* s : {&chsh_on_common_part, &decomposition_identity,
                          &common_part_estimate, &bonferroni,
                          &pairwise_overlap_bound, &delta_gamma_bound}) {
      if (s->checked && !s->passed) return false;
    }
    return true;
  }
};

ProofChainReport check_proof_chain(const FiniteModel& model,
                                   double identity_tol = kIdentityTol,
                                   double tol = kTheoremTol);

/// Reproducible random model for the property suites. The generation mode
/// cycles with the index through generic, spin-valued, near-disjoint-set,
/// extreme-weight, dense-set and full-set scenarios; every coincidence set
/// is guaranteed nonempty.
FiniteModel random_finite_model(RunSeed seed, std::uint64_t index);

/// Turns a piecewise pattern at four settings into the finite model whose
/// atoms are the cells of the common breakpoint refinement crossed with the
/// {band, main} layers. eval_finite on the result reproduces the sweep
/// measures exactly.
FiniteModel discretize_pattern(const PiecewisePattern& pattern,
                               const std::array<Setting, 4>& settings,
                               CoincidenceWindow window);

/// Aggregated result of running a checker over many random models.
struct SuiteResult {
  std::string suite;
  int models = 0;
  int passed = 0;
  int failed = 0;
  int skipped = 0;
  double min_margin = 0.0;
  double max_margin = 0.0;
  std::vector<FiniteModel> witnesses;

  bool ok() const { return failed == 0; }
};

SuiteResult run_theorem2_suite(int n_models, RunSeed seed);
SuiteResult run_proof_chain_suite(int n_models, RunSeed seed);

/// Equality checks on the discretized octant model at the saturating band
/// height: lhs == 6/gamma - 4 and delta == 4 - 3/gamma.
SuiteResult run_saturation_suite();

}  // namespace bellsim
