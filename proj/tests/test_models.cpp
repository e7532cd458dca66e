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
#include <set>

#include <doctest.h>

#include "bellsim/models.hpp"

using namespace bellsim;

namespace {

constexpr double kPi = std::numbers::pi;

// Keeps property draws away from the measure-zero arc boundaries, where a
// shifted evaluation can legitimately land one ulp on the other side.
bool near_octant_boundary(double phi) {
  const double pos = std::fmod(phi, kOctantWidth);
  return pos < 1e-9 || kOctantWidth - pos < 1e-9;
}

}  // namespace

TEST_CASE("octant response follows the reconstructed table") {
  const OctantModelParams params{0.5};
  const LocalResponse main_region =
      octant_respond({kPi / 8.0, 0.9}, Setting(0.0), params);
  CHECK(main_region.outcome == +1);
  CHECK(main_region.time == 1.0);

  const LocalResponse band = octant_respond({kPi / 8.0, 0.1}, Setting(0.0), params);
  CHECK(band.outcome == +1);
  CHECK(band.time == 0.0);

  // Shifting both theta and the setting by pi/4 leaves the response alone.
  const LocalResponse shifted =
      octant_respond({kPi / 8.0 + kPi / 4.0, 0.9}, Setting(kPi / 4.0), params);
  CHECK(shifted == main_region);
}

TEST_CASE("octant response covers all eight arcs") {
  const OctantModelParams params{0.0};
  const int expected_outcome[8] = {+1, +1, +1, +1, -1, -1, -1, -1};
  for (int k = 0; k < 8; ++k) {
    const double theta = (static_cast<double>(k) + 0.5) * kOctantWidth;
    const LocalResponse r = octant_respond({theta, 0.5}, Setting(0.0), params);
    CHECK(r.outcome == expected_outcome[k]);
    CHECK(r.time == kOctantTimes[k]);
  }
}

TEST_CASE("octant response is shift covariant") {
  TrialRng rng(RunSeed{314, 0}, 0);
  const OctantModelParams params{0.3};
  int tested = 0;
  while (tested < 2000) {
    const HiddenVariable hv = rng.uniform_hidden_variable();
    const double setting = rng.uniform_angle();
    const double shift = rng.uniform_angle();
    if (near_octant_boundary(canonicalize_angle(hv.theta - setting)) ||
        near_octant_boundary(canonicalize_angle((hv.theta + shift) - (setting + shift)))) {
      continue;
    }
    const LocalResponse base = octant_respond(hv, Setting(setting), params);
    const LocalResponse moved = octant_respond({canonicalize_angle(hv.theta + shift), hv.r},
                                               Setting(setting + shift), params);
    CHECK(base == moved);
    ++tested;
  }
}

TEST_CASE("octant rejects a band height outside [0, 1]") {
  CHECK_THROWS_AS(octant_respond({0.1, 0.1}, Setting(0.0), OctantModelParams{1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(OctantModel(OctantModelParams{-0.1}), std::invalid_argument);
}

TEST_CASE("classic response splits the circle in halves at time zero") {
  CHECK(classic_respond({0.1, 0.7}, Setting(0.0)) == LocalResponse{+1, 0.0});
  CHECK(classic_respond({kPi + 0.1, 0.2}, Setting(0.0)) == LocalResponse{-1, 0.0});

  TrialRng rng(RunSeed{314, 1}, 0);
  for (int i = 0; i < 2000; ++i) {
    const HiddenVariable hv = rng.uniform_hidden_variable();
    const Setting s(rng.uniform_angle());
    const LocalResponse left = classic_respond(hv, s);
    const LocalResponse right = classic_respond(hv, s);
    CHECK(left.outcome * right.outcome == +1);  // equal settings: full correlation
    CHECK(left.time == 0.0);
  }
}

TEST_CASE("equal settings give full correlation and zero time difference") {
  TrialRng rng(RunSeed{314, 2}, 0);
  const OctantModelParams params{kSaturatingBandHeight};
  for (int i = 0; i < 2000; ++i) {
    const HiddenVariable hv = rng.uniform_hidden_variable();
    const Setting s(rng.uniform_angle());
    const LocalResponse left = octant_respond(hv, s, params);
    const LocalResponse right = octant_respond(hv, s, params);
    CHECK(left.outcome * right.outcome == +1);
    CHECK(left.time == right.time);
  }
}

TEST_CASE("octant times stay on the coarse time grid") {
  TrialRng rng(RunSeed{314, 3}, 0);
  const OctantModelParams params{0.25};
  const std::set<double> allowed_times = {-1.0, 0.0, 1.0};
  const std::set<double> allowed_differences = {0.0, 1.0, 2.0};
  for (int i = 0; i < 5000; ++i) {
    const HiddenVariable hv = rng.uniform_hidden_variable();
    const LocalResponse left = octant_respond(hv, Setting(rng.uniform_angle()), params);
    const LocalResponse right = octant_respond(hv, Setting(rng.uniform_angle()), params);
    CHECK(allowed_times.count(left.time) == 1);
    CHECK(allowed_differences.count(std::abs(left.time - right.time)) == 1);
  }
}

TEST_CASE("marginals are unbiased for octant and classic") {
  const int n = 200000;
  const double four_sigma = 4.0 * 0.5 / std::sqrt(static_cast<double>(n));
  for (const double setting : {0.0, kPi / 4.0, 1.0, 5.0}) {
    int octant_plus = 0;
    int classic_plus = 0;
    for (int i = 0; i < n; ++i) {
      TrialRng rng(RunSeed{2718, 4}, static_cast<std::uint64_t>(i));
      const HiddenVariable hv = rng.uniform_hidden_variable();
      if (octant_respond(hv, Setting(setting), OctantModelParams{0.4}).outcome > 0) {
        ++octant_plus;
      }
      if (classic_respond(hv, Setting(setting)).outcome > 0) ++classic_plus;
    }
    CHECK(std::abs(octant_plus / static_cast<double>(n) - 0.5) < four_sigma);
    CHECK(std::abs(classic_plus / static_cast<double>(n) - 0.5) < four_sigma);
  }
}

TEST_CASE("qm sampler reproduces the cosine correlation") {
  const int n = 1000000;
  struct Case {
    double a, c;
  };
  // Relative angles 0, pi/4 and 3pi/4: cosine targets 1, 1/sqrt(2), -1/sqrt(2).
  for (const Case& kase : {Case{0.0, 0.0}, Case{0.0, kPi / 4.0}, Case{kPi / 2.0, -kPi / 4.0}}) {
    const double target = std::cos(kase.a - kase.c);
    std::int64_t product_sum = 0;
    std::int64_t left_plus = 0;
    std::int64_t right_plus = 0;
    for (int i = 0; i < n; ++i) {
      TrialRng rng(RunSeed{999, 1}, static_cast<std::uint64_t>(i));
      const JointOutcomes joint =
          qm_singlet_sample(Setting(kase.a), Setting(kase.c), rng);
      product_sum += joint.left * joint.right;
      if (joint.left > 0) ++left_plus;
      if (joint.right > 0) ++right_plus;
    }
    const double e = product_sum / static_cast<double>(n);
    const double sigma_e = std::sqrt((1.0 - target * target) / n) + 1e-12;
    CHECK(std::abs(e - target) < 4.0 * sigma_e + 1e-9);
    const double sigma_marginal = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(left_plus / static_cast<double>(n) - 0.5) < 4.0 * sigma_marginal);
    CHECK(std::abs(right_plus / static_cast<double>(n) - 0.5) < 4.0 * sigma_marginal);
  }
}

TEST_CASE("models behave identically through the local-model interface") {
  // The interface admits only (lambda, local setting): locality is
  // structural, and respond must be a pure function of its arguments.
  const OctantModel octant(OctantModelParams{0.4});
  const ClassicModel classic;
  TrialRng rng(RunSeed{314, 4}, 0);
  for (const LocalModel* model :
       std::initializer_list<const LocalModel*>{&octant, &classic}) {
    for (int i = 0; i < 500; ++i) {
      const HiddenVariable hv = rng.uniform_hidden_variable();
      const Setting s(rng.uniform_angle());
      const LocalResponse first = model->respond(hv, s);
      const LocalResponse second = model->respond(hv, s);
      CHECK(first == second);
    }
  }
  CHECK(octant.respond({kPi / 8.0, 0.9}, Setting(0.0)) ==
        octant_respond({kPi / 8.0, 0.9}, Setting(0.0), octant.params()));
}

TEST_CASE("qm sampler at equal settings is perfectly correlated") {
  for (int i = 0; i < 1000; ++i) {
    TrialRng rng(RunSeed{999, 2}, static_cast<std::uint64_t>(i));
    const JointOutcomes joint = qm_singlet_sample(Setting(1.3), Setting(1.3), rng);
    CHECK(joint.left == joint.right);
  }
}
