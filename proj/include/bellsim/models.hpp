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

#include "bellsim/core.hpp"

namespace bellsim {

// The octant model's angular geometry: the response pattern is constant on
// eight arcs of width pi/4, outcome +1 on the first four and -1 on the rest,
// with detection times cycling through {+1, 0, 0, -1} twice per revolution.
// A band of height `band_height` in the r coordinate responds with the same
// outcome at time 0 regardless of the arc.
inline constexpr double kOctantWidth = std::numbers::pi / 4.0;
inline constexpr std::array<double, 8> kOctantTimes = {+1.0, 0.0, 0.0, -1.0,
                                                       +1.0, 0.0, 0.0, -1.0};

/// Band height at which the octant model's conditional correlations reach
/// 1/sqrt(2) in magnitude: l = 3 * (3 - 2*sqrt(2)).
inline constexpr double kSaturatingBandHeight =
    3.0 * (3.0 - 2.0 * std::numbers::sqrt2);

struct OctantModelParams {
  double band_height = 0.0;  // l in [0, 1]
};

/// A wing's response law. Locality is structural: the remote setting is not
/// a parameter, so no implementation can peek at it.
class LocalModel {
 public:
  virtual ~LocalModel() = default;
  virtual LocalResponse respond(const HiddenVariable& hv, Setting setting) const = 0;
};

/// Octant-pattern response with a time-0 band of height l.
LocalResponse octant_respond(const HiddenVariable& hv, Setting setting,
                             const OctantModelParams& params);

/// Baseline deterministic response without timing games: half-plane outcome
/// sign and all detection times 0, so every trial is coincident.
LocalResponse classic_respond(const HiddenVariable& hv, Setting setting);

class OctantModel final : public LocalModel {
 public:
  explicit OctantModel(OctantModelParams params);
  LocalResponse respond(const HiddenVariable& hv, Setting setting) const override {
    return octant_respond(hv, setting, params_);
  }
  const OctantModelParams& params() const { return params_; }

 private:
  OctantModelParams params_;
};

class ClassicModel final : public LocalModel {
 public:
  LocalResponse respond(const HiddenVariable& hv, Setting setting) const override {
    return classic_respond(hv, setting);
  }
};

/// One joint draw from the nonlocal reference sampler. Both wings detect at
/// time 0, so every sample is coincident.
struct JointOutcomes {
  int left = +1;
  int right = +1;
};

/// Singlet-statistics reference: zero marginals, E(left*right) = cos(a - c),
/// P(equal outcomes) = (1 + cos(a - c)) / 2. Not a LocalModel on purpose --
/// it consumes both settings and serves as the violating benchmark.
JointOutcomes qm_singlet_sample(Setting a, Setting c, TrialRng& rng);

}  // namespace bellsim
