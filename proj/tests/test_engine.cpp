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

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "bellsim/crosscheck.hpp"
#include "bellsim/engine.hpp"

using namespace bellsim;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt8 = 2.0 * std::numbers::sqrt2;
const double kCriticalGamma = 3.0 - 3.0 / std::numbers::sqrt2;

bool same_estimate(const PairEstimate& x, const PairEstimate& y) {
  return x.n_total == y.n_total && x.n_coincident == y.n_coincident &&
         x.gamma_hat == y.gamma_hat && x.e_conditional == y.e_conditional &&
         x.std_error == y.std_error && x.n_left_plus == y.n_left_plus &&
         x.n_right_plus == y.n_right_plus;
}

}  // namespace

TEST_CASE("classic model at equal settings is exact") {
  const ModelSpec classic{ModelKind::classic, 0.0};
  const PairEstimate est = run_pair(classic, Setting(0.7), Setting(0.7),
                                    CoincidenceWindow(1.5), 100000, RunSeed{5, 0}, 0);
  CHECK(est.gamma_hat == 1.0);
  REQUIRE(est.e_conditional.has_value());
  CHECK(*est.e_conditional == 1.0);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("run_pair validates its preconditions") {
  const ModelSpec octant{ModelKind::octant, 0.0};
  CHECK_THROWS_AS(run_pair(octant, Setting(0.0), Setting(0.0), CoincidenceWindow(1.5),
                           0, RunSeed{}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_pair(octant, Setting(0.0), Setting(0.0), CoincidenceWindow(1.5),
                           10, RunSeed{}, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("octant estimates land on the saturating pair values") {
  const ModelSpec octant{ModelKind::octant, kSaturatingBandHeight};
  const std::int64_t n = 1000000;
  const PairEstimate est = run_pair(octant, Setting(0.0), Setting(kPi / 4.0),
                                    CoincidenceWindow(1.5), n, RunSeed{42, 0}, 0, 4);
  REQUIRE(est.e_conditional.has_value());
  const double gamma_sigma =
      std::sqrt(kCriticalGamma * (1.0 - kCriticalGamma) / static_cast<double>(n));
  CHECK(std::abs(est.gamma_hat - kCriticalGamma) < 4.0 * gamma_sigma);
  CHECK(std::abs(*est.e_conditional - 1.0 / std::numbers::sqrt2) < 4.0 * est.std_error);
}

TEST_CASE("estimates agree with the exact sweep under a narrow window") {
  const ModelSpec octant{ModelKind::octant, 0.0};
  const CoincidenceWindow narrow(0.5);
  const std::int64_t n = 200000;
  const PairEstimate est = run_pair(octant, Setting(0.0), Setting(kPi / 4.0), narrow,
                                    n, RunSeed{42, 1}, 0);
  const PairStatistics exact =
      sweep_pair(octant_pattern(0.0), Setting(0.0), Setting(kPi / 4.0), narrow);
  const double sigma = std::sqrt(exact.p_coincidence * (1.0 - exact.p_coincidence) /
                                 static_cast<double>(n));
  CHECK(std::abs(est.gamma_hat - exact.p_coincidence) < 4.0 * sigma);
}

TEST_CASE("lane count never changes an estimate") {
  ExperimentConfig config = saturating_config(40000, RunSeed{2024, 3});
  const ChshEstimate serial = run_chsh(config, 1);
  const ChshEstimate two = run_chsh(config, 2);
  const ChshEstimate eight = run_chsh(config, 8);
  for (int k = 0; k < 4; ++k) {
    CHECK(same_estimate(serial.pairs[k], two.pairs[k]));
    CHECK(same_estimate(serial.pairs[k], eight.pairs[k]));
  }
  CHECK(serial.s_value == two.s_value);
  CHECK(serial.s_value == eight.s_value);
  CHECK(serial.gamma_min == eight.gamma_min);
}

TEST_CASE("coincidence counts grow with the window") {
  const ModelSpec octant{ModelKind::octant, 0.2};
  const RunSeed seed{11, 0};
  std::int64_t previous = -1;
  for (const double delta_t : {0.5, 1.5, 2.5}) {
    const PairEstimate est = run_pair(octant, Setting(0.0), Setting(kPi / 4.0),
                                      CoincidenceWindow(delta_t), 50000, seed, 0);
    CHECK(est.n_coincident >= previous);
    previous = est.n_coincident;
  }
}

TEST_CASE("left marginal is blind to the remote setting") {
  // Same seed and pair stream: the left wing sees the identical lambda
  // sequence, so its unconditioned marginal must match bit for bit when only
  // the remote setting changes.
  const ModelSpec octant{ModelKind::octant, kSaturatingBandHeight};
  const PairEstimate with_c = run_pair(octant, Setting(0.0), Setting(kPi / 4.0),
                                       CoincidenceWindow(1.5), 100000, RunSeed{3, 1}, 0);
  const PairEstimate with_d = run_pair(octant, Setting(0.0), Setting(-kPi / 4.0),
                                       CoincidenceWindow(1.5), 100000, RunSeed{3, 1}, 0);
  CHECK(with_c.n_left_plus == with_d.n_left_plus);

  // Statistical version across independent streams.
  const PairEstimate other_stream =
      run_pair(octant, Setting(0.0), Setting(-kPi / 4.0), CoincidenceWindow(1.5),
               100000, RunSeed{3, 1}, 1);
  const double n = 100000.0;
  const double sigma = std::sqrt(0.25 / n + 0.25 / n);
  CHECK(std::abs(with_c.n_left_plus / n - other_stream.n_left_plus / n) < 4.0 * sigma);
}

TEST_CASE("run_chsh reproduces the three reference experiments") {
  SUBCASE("saturating octant run") {
    const ExperimentConfig config = saturating_config(1000000, RunSeed{42, 0});
    const ChshEstimate est = run_chsh(config, 4);
    REQUIRE(est.s_value.has_value());
    CHECK(std::abs(*est.s_value - kSqrt8) < 4.0 * est.s_std_error);
    const double gamma_sigma = std::sqrt(kCriticalGamma * (1.0 - kCriticalGamma) /
                                         static_cast<double>(config.trials_per_pair));
    CHECK(std::abs(est.gamma_min - kCriticalGamma) < 4.0 * gamma_sigma);
    REQUIRE(est.bound_gamma.has_value());
    CHECK(std::abs(*est.bound_gamma - kSqrt8) < 0.03);
  }

  SUBCASE("classic model stays at the local bound") {
    ExperimentConfig config = saturating_config(400000, RunSeed{42, 1});
    config.model = {ModelKind::classic, 0.0};
    const ChshEstimate est = run_chsh(config, 4);
    REQUIRE(est.s_value.has_value());
    CHECK(est.gamma_min == 1.0);
    // Sawtooth correlation: E = 1/2 at pi/4, -1/2 at 3pi/4, so S = 2.
    CHECK(std::abs(*est.s_value - 2.0) < 4.0 * est.s_std_error);
  }

  SUBCASE("qm reference sampler violates the classic bound") {
    ExperimentConfig config = saturating_config(400000, RunSeed{42, 2});
    config.model = {ModelKind::qm, 0.0};
    const ChshEstimate est = run_chsh(config, 4);
    REQUIRE(est.s_value.has_value());
    CHECK(est.gamma_min == 1.0);
    CHECK(std::abs(*est.s_value - kSqrt8) < 4.0 * est.s_std_error);
  }
}

TEST_CASE("zero coincidences produce a flagged result, not a number") {
  // Narrow window, no band: only 1/4 of the rectangle coincides at the
  // quarter-turn pair, so a single-trial run can miss it.
  const ModelSpec octant{ModelKind::octant, 0.0};
  const CoincidenceWindow narrow(0.5);
  bool found = false;
  for (std::uint64_t stream = 0; stream < 64 && !found; ++stream) {
    const PairEstimate est = run_pair(octant, Setting(0.0), Setting(kPi / 4.0),
                                      narrow, 1, RunSeed{9, stream}, 0);
    if (est.n_coincident == 0) {
      found = true;
      CHECK(!est.e_conditional.has_value());
      CHECK(est.gamma_hat == 0.0);
      CHECK(est.std_error == 0.0);

      ExperimentConfig config;
      config.model = octant;
      config.settings = canonical_chsh_settings();
      config.window = narrow;
      config.trials_per_pair = 1;
      config.seed = RunSeed{9, stream};
      const ChshEstimate chsh = run_chsh(config);
      CHECK(!chsh.s_value.has_value());  // undefined pair propagates
    }
  }
  CHECK(found);
}

TEST_CASE("exact_chsh assembles the saturation table") {
  const ExactChsh exact = exact_chsh({ModelKind::octant, kSaturatingBandHeight},
                                     canonical_chsh_settings(), CoincidenceWindow(1.5));
  REQUIRE(exact.s_value.has_value());
  REQUIRE(exact.bound_gamma.has_value());
  REQUIRE(exact.margin.has_value());
  CHECK(std::abs(exact.gamma - kCriticalGamma) <= 1e-12);
  CHECK(std::abs(*exact.s_value - kSqrt8) <= 1e-12);
  CHECK(std::abs(*exact.margin) <= 1e-12);
  REQUIRE(exact.common.delta.has_value());
  CHECK(std::abs(*exact.common.delta - (2.0 - std::numbers::sqrt2)) <= 1e-12);
}

TEST_CASE("scan over the band height") {
  ExperimentConfig config = saturating_config(1000, RunSeed{1, 1});
  const auto rows = scan(config, ScanParameter::band_height, 0.0, 1.0, 5);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].value > rows[i - 1].value);  // sorted by parameter value
  }

  // l = 0: conditioned correlations reach 1, so S = 4 = 6/(3/4) - 4 exactly.
  CHECK(rows[0].gamma == doctest::Approx(0.75).epsilon(1e-14));
  REQUIRE(rows[0].s_value.has_value());
  CHECK(*rows[0].s_value == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(std::abs(*rows[0].margin) <= 1e-12);

  // l = 1: every trial coincides and the correlations fall to the classic 1/2.
  CHECK(rows[4].gamma == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(rows[4].s_value.has_value());
  CHECK(*rows[4].s_value == doctest::Approx(2.0).epsilon(1e-13));

  // The saturating band height is an exact zero of the margin.
  const auto saturating =
      scan(config, ScanParameter::band_height, kSaturatingBandHeight, 1.0, 3);
  REQUIRE(saturating[0].margin.has_value());
  CHECK(std::abs(*saturating[0].margin) <= 1e-12);
}

TEST_CASE("scan over the window width") {
  ExperimentConfig config = saturating_config(1000, RunSeed{1, 2});
  config.model.band_height = 0.0;
  const auto rows = scan(config, ScanParameter::window_width, 0.5, 2.5, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].value == 0.5);
  CHECK(rows[1].value == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(rows[2].value == 2.5);
  // A window wider than the largest time difference keeps every trial.
  CHECK(rows[2].gamma == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("scan over the relative angle recovers the paper geometry") {
  ExperimentConfig config = saturating_config(1000, RunSeed{1, 3});
  const auto rows = scan(config, ScanParameter::relative_angle, 0.0, kPi / 2.0, 5);
  REQUIRE(rows.size() == 5);
  // Row 2 sits at pi/4: the saturating geometry.
  REQUIRE(rows[2].s_value.has_value());
  CHECK(std::abs(*rows[2].s_value - kSqrt8) <= 1e-12);
  CHECK(std::abs(rows[2].gamma - kCriticalGamma) <= 1e-12);
}

TEST_CASE("scan validates parameter ranges") {
  ExperimentConfig config = saturating_config(1000, RunSeed{1, 4});
  CHECK_THROWS_AS(scan(config, ScanParameter::band_height, 0.0, 1.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(scan(config, ScanParameter::band_height, 0.5, 0.2, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(scan(config, ScanParameter::band_height, -0.2, 0.5, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(scan(config, ScanParameter::window_width, 0.0, 1.0, 3),
                  std::invalid_argument);
  ExperimentConfig classic = config;
  classic.model = {ModelKind::classic, 0.0};
  CHECK_THROWS_AS(scan(classic, ScanParameter::band_height, 0.0, 1.0, 3),
                  std::invalid_argument);
}

TEST_CASE("qm scan rows fall back to Monte Carlo") {
  ExperimentConfig config = saturating_config(50000, RunSeed{1, 5});
  config.model = {ModelKind::qm, 0.0};
  const auto rows = scan(config, ScanParameter::relative_angle, kPi / 4.0, kPi / 2.0, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].gamma == 1.0);  // the sampler always coincides
  REQUIRE(rows[0].s_value.has_value());
  CHECK(std::abs(*rows[0].s_value - kSqrt8) < 0.05);
}

TEST_CASE("monte carlo matches the exact oracle across the board") {
  const McExactReport report =
      mc_vs_exact_report({ModelKind::octant, kSaturatingBandHeight},
                         canonical_chsh_settings(), CoincidenceWindow(1.5), 1000000,
                         RunSeed{2025, 0}, 4);
  CHECK(report.rows.size() == 8);  // gamma + correlation per pair
  CHECK(report.max_abs_z <= 4.0);

  CHECK_THROWS_AS(mc_vs_exact_report({ModelKind::octant, 0.0},
                                     canonical_chsh_settings(), CoincidenceWindow(1.5),
                                     0, RunSeed{}),
                  std::invalid_argument);
}

TEST_CASE("crosscheck on the classic model is exact for gamma") {
  const McExactReport report =
      mc_vs_exact_report({ModelKind::classic, 0.0}, canonical_chsh_settings(),
                         CoincidenceWindow(1.5), 20000, RunSeed{2025, 1});
  for (const auto& row : report.rows) {
    if (row.quantity == "gamma") {
      CHECK(row.exact_value == 1.0);
      CHECK(row.mc_value == 1.0);
      CHECK(row.z == 0.0);
    }
  }
}

TEST_CASE("estimates respect their hard bounds on arbitrary configs") {
  TrialRng rng(RunSeed{55, 0}, 0);
  for (int i = 0; i < 20; ++i) {
    ExperimentConfig config;
    const int which = static_cast<int>(rng() % 3);
    config.model.kind = which == 0   ? ModelKind::octant
                        : which == 1 ? ModelKind::classic
                                     : ModelKind::qm;
    if (config.model.kind == ModelKind::octant) {
      config.model.band_height = rng.uniform_double();
    }
    config.settings = {Setting(rng.uniform_angle()), Setting(rng.uniform_angle()),
                       Setting(rng.uniform_angle()), Setting(rng.uniform_angle())};
    config.window = CoincidenceWindow(0.25 + 2.0 * rng.uniform_double());
    config.trials_per_pair = 2000;
    config.seed = {rng(), rng()};
    const ChshEstimate est = run_chsh(config);
    for (const auto& pair : est.pairs) {
      CHECK(pair.gamma_hat >= 0.0);
      CHECK(pair.gamma_hat <= 1.0);
      CHECK(pair.gamma_hat ==
            static_cast<double>(pair.n_coincident) / static_cast<double>(pair.n_total));
      if (pair.e_conditional) {
        CHECK(std::abs(*pair.e_conditional) <= 1.0);
      }
    }
    CHECK(est.gamma_min >= 0.0);
    CHECK(est.gamma_min <= 1.0);
  }
}

TEST_CASE("resolve_lane_count is at least one") {
  CHECK(resolve_lane_count(0) >= 1);
  CHECK(resolve_lane_count(3) >= 1);
}
