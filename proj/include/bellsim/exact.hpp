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
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bellsim/core.hpp"

namespace bellsim {

// Setting-pair order used everywhere: (a,c), (a,d), (b,c), (b,d), where the
// four-setting tuple is ordered (a, b, c, d) with a, b on the left wing and
// c, d on the right wing.
inline constexpr std::array<const char*, 4> kPairNames = {"AC", "AD", "BC", "BD"};
inline constexpr std::array<int, 4> kPairLeftIndex = {0, 0, 1, 1};
inline constexpr std::array<int, 4> kPairRightIndex = {2, 3, 2, 3};

/// One wing's response as a piecewise-constant function of phi = theta -
/// setting, plus a band of height `band_height` in r that responds with the
/// same outcome at time 0. Intervals are half-open: interval i covers
/// [breakpoints[i], breakpoints[i+1]) and the last wraps around to the first.
struct PiecewisePattern {
  std::vector<double> breakpoints;  // strictly increasing, within [0, 2*pi)
  std::vector<int> outcomes;        // one per interval, each +1 or -1
  std::vector<double> times;        // one per interval, finite
  double band_height = 0.0;         // l in [0, 1]

  /// Throws std::invalid_argument on a degenerate pattern (no intervals,
  /// mismatched arrays, unsorted or out-of-range breakpoints, bad values).
  void validate() const;

  std::size_t interval_at(double phi) const;  // phi in [0, 2*pi)
  int outcome_at(double phi) const { return outcomes[interval_at(phi)]; }
  double time_at(double phi) const { return times[interval_at(phi)]; }
};

PiecewisePattern octant_pattern(double band_height);
PiecewisePattern classic_pattern();

/// The standard CHSH geometry parameterized by its relative angle x:
/// (a, b, c, d) = (0, 2x, x, -x).
std::array<Setting, 4> chsh_settings(double relative_angle);

/// The geometry at x = pi/4, where the singlet statistics reach 2*sqrt(2).
inline std::array<Setting, 4> canonical_chsh_settings() {
  return chsh_settings(std::numbers::pi / 4.0);
}

/// Exact measures for one setting pair: coincidence probability, its
/// agree/disagree split, and the coincidence-conditioned correlation
/// (absent when the coincidence set has measure zero). The four cells
/// (equal/unequal x coincident/non-coincident) partition total measure 1.
struct PairStatistics {
  double p_coincidence = 0.0;
  double p_equal_and_coincident = 0.0;
  double p_unequal_and_coincident = 0.0;
  double p_equal_and_noncoincident = 0.0;
  double p_unequal_and_noncoincident = 0.0;
  std::optional<double> conditional_correlation;
};

/// Sweeps the merged breakpoints of the two shifted patterns and classifies
/// every arc x {band, main} cell by outcome agreement and time difference.
PairStatistics sweep_pair(const PiecewisePattern& pattern, Setting a, Setting c,
                          CoincidenceWindow window);

/// Measures of the common part of the four coincidence sets, on the common
/// refinement of all four shifted breakpoint sets.
struct CommonPartStats {
  double p_intersection = 0.0;                       // P of the four-way overlap
  std::array<double, 4> p_pair{};                    // P per setting pair
  std::array<double, 4> p_intersection_given_pair{}; // overlap given each pair
  std::optional<double> delta;                       // min of the above
};

CommonPartStats sweep_common_part(const PiecewisePattern& pattern,
                                  const std::array<Setting, 4>& settings,
                                  CoincidenceWindow window);

namespace detail {

/// Shifted-and-merged circle subdivision shared by the sweep routines:
/// every discontinuity of the pattern under any of the given shifts lands on
/// an arc endpoint, so the responses are constant on each arc. Breakpoints
/// closer than 1e-12 are collapsed (they arise as 1-2 ulp rounding clusters
/// when several shifts hit the same physical boundary).
std::vector<double> merged_breakpoints(const PiecewisePattern& pattern,
                                       std::span<const Setting> shifts);

struct Arc {
  double start;
  double length;
  double midpoint;
};

std::vector<Arc> arcs_of(const std::vector<double>& breakpoints);

}  // namespace detail

}  // namespace bellsim
