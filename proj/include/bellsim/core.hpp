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

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bellsim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to its canonical representative in [0, 2*pi).
/// Throws std::invalid_argument for non-finite input.
double canonicalize_angle(double radians);

/// An analyzer orientation in radians, stored canonicalized to [0, 2*pi).
class Setting {
 public:
  Setting() = default;
  explicit Setting(double radians) : angle_(canonicalize_angle(radians)) {}
  double angle() const { return angle_; }
  friend bool operator==(Setting, Setting) = default;

 private:
  double angle_ = 0.0;
};

/// The shared hidden variable: a point (theta, r) in [0, 2*pi) x [0, 1).
struct HiddenVariable {
  double theta = 0.0;
  double r = 0.0;

  bool in_range() const {
    return theta >= 0.0 && theta < kTwoPi && r >= 0.0 && r < 1.0;
  }
};

/// One wing's measurement record: a +/-1 outcome and a detection time.
struct LocalResponse {
  int outcome = +1;     // in {-1, +1}
  double time = 0.0;    // finite, in model time units

  friend bool operator==(const LocalResponse&, const LocalResponse&) = default;
};

/// Coincidence window width. Two detections pair up when their times differ
/// by strictly less than delta_t.
class CoincidenceWindow {
 public:
  explicit CoincidenceWindow(double delta_t);
  double delta_t() const { return delta_t_; }

 private:
  double delta_t_;
};

/// Strict-inequality coincidence test: |left_time - right_time| < delta_t.
inline bool is_coincident(double left_time, double right_time,
                          CoincidenceWindow window) {
  return std::abs(left_time - right_time) < window.delta_t();
}

/// Both wings of one trial, with the coincidence flag for the window it was
/// produced under.
struct TrialRecord {
  Setting left_setting;
  Setting right_setting;
  LocalResponse left;
  LocalResponse right;
  bool coincident = false;
};

inline TrialRecord make_trial_record(Setting left_setting, Setting right_setting,
                                     const LocalResponse& left,
                                     const LocalResponse& right,
                                     CoincidenceWindow window) {
  return {left_setting, right_setting, left, right,
          is_coincident(left.time, right.time, window)};
}

/// Root of the reproducible-randomness contract. Two runs with equal
/// (seed, stream) produce identical data regardless of worker count.
struct RunSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(RunSeed, RunSeed) = default;
};

/// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's constants).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent sub-stream of a run seed (used to give each setting
/// pair its own trial sequence).
constexpr RunSeed substream(RunSeed base, std::uint64_t k) {
  return {base.seed, mix64(base.stream ^ (0x9E3779B97F4A7C15ULL * (k + 1)))};
}

/// Counter-derived random source for one trial. The value stream is a pure
/// function of (seed, trial_index): workers may evaluate trials in any order
/// or in parallel and still reproduce a serial run bit for bit.
class TrialRng {
 public:
  using result_type = std::uint64_t;

  TrialRng(RunSeed seed, std::uint64_t trial_index) {
    std::uint64_t k = mix64(seed.seed + kGamma);
    k = mix64(k ^ seed.stream);
    k = mix64(k ^ trial_index);
    state_ = k;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform deviate in [0, 1) with 53 random bits.
  double uniform_double() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform angle in [0, 2*pi).
  double uniform_angle() { return kTwoPi * uniform_double(); }

  /// Uniform hidden variable on the (theta, r) rectangle. Draw order is part
  /// of the reproducibility contract: theta first, then r.
  HiddenVariable uniform_hidden_variable() {
    const double theta = uniform_angle();
    const double r = uniform_double();
    return {theta, r};
  }

  /// Equiprobable +1 / -1.
  int uniform_sign() { return ((*this)() >> 63) ? -1 : +1; }

  bool bernoulli(double p) { return uniform_double() < p; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t state_;
};

/// Spec'd entry point: the deterministic random source for one trial.
inline TrialRng trial_rng(RunSeed seed, std::uint64_t trial_index) {
  return TrialRng(seed, trial_index);
}

}  // namespace bellsim
