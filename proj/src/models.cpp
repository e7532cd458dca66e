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

#include "bellsim/models.hpp"

#include <stdexcept>

namespace bellsim {

namespace {

void check_band_height(double l) {
  if (!(std::isfinite(l) && l >= 0.0 && l <= 1.0)) {
    throw std::invalid_argument("octant model: band height l must be in [0, 1]");
  }
}

}  // namespace

LocalResponse octant_respond(const HiddenVariable& hv, Setting setting,
                             const OctantModelParams& params) {
  check_band_height(params.band_height);
  const double phi = canonicalize_angle(hv.theta - setting.angle());
  int arc = static_cast<int>(phi / kOctantWidth);
  if (arc > 7) {
    arc = 7;  // phi just below 2*pi can round across the last boundary
  }
  const int outcome = arc < 4 ? +1 : -1;
  const double time = hv.r < params.band_height ? 0.0 : kOctantTimes[arc];
  return {outcome, time};
}

LocalResponse classic_respond(const HiddenVariable& hv, Setting setting) {
  const double phi = canonicalize_angle(hv.theta - setting.angle());
  const int outcome = phi < std::numbers::pi ? +1 : -1;
  return {outcome, 0.0};
}

OctantModel::OctantModel(OctantModelParams params) : params_(params) {
  check_band_height(params_.band_height);
}

JointOutcomes qm_singlet_sample(Setting a, Setting c, TrialRng& rng) {
  const int left = rng.uniform_sign();
  const double p_equal = 0.5 * (1.0 + std::cos(a.angle() - c.angle()));
  const int right = rng.bernoulli(p_equal) ? left : -left;
  return {left, right};
}

}  // namespace bellsim
