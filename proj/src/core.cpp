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

#include "bellsim/core.hpp"

#include <stdexcept>

namespace bellsim {

double canonicalize_angle(double radians) {
  if (!std::isfinite(radians)) {
    throw std::invalid_argument("canonicalize_angle: angle must be finite");
  }
  double y = std::fmod(radians, kTwoPi);
  if (y < 0.0) {
    y += kTwoPi;
  }
  if (y >= kTwoPi) {
    // Adding 2*pi to a tiny negative remainder can round to exactly 2*pi.
    y -= kTwoPi;
  }
  return y + 0.0;  // normalize -0.0
}

CoincidenceWindow::CoincidenceWindow(double delta_t) : delta_t_(delta_t) {
  if (!(std::isfinite(delta_t) && delta_t > 0.0)) {
    throw std::invalid_argument("CoincidenceWindow: delta_t must be finite and > 0");
  }
}

}  // namespace bellsim
