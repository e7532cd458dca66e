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

#include "bellsim/exact.hpp"

#include <algorithm>
#include <stdexcept>

#include "bellsim/models.hpp"

namespace bellsim {

namespace {

constexpr double kBreakpointEps = 1e-12;

}  // namespace

void PiecewisePattern::validate() const {
  const std::size_t n = breakpoints.size();
  if (n == 0) {
    throw std::invalid_argument("PiecewisePattern: empty interval list");
  }
  if (outcomes.size() != n || times.size() != n) {
    throw std::invalid_argument(
        "PiecewisePattern: per-interval arrays must match breakpoints");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(breakpoints[i] >= 0.0 && breakpoints[i] < kTwoPi)) {
      throw std::invalid_argument("PiecewisePattern: breakpoints must lie in [0, 2*pi)");
    }
    if (i + 1 < n && !(breakpoints[i] < breakpoints[i + 1])) {
      throw std::invalid_argument("PiecewisePattern: breakpoints must be strictly increasing");
    }
    if (outcomes[i] != +1 && outcomes[i] != -1) {
      throw std::invalid_argument("PiecewisePattern: outcomes must be +1 or -1");
    }
    if (!std::isfinite(times[i])) {
      throw std::invalid_argument("PiecewisePattern: times must be finite");
    }
  }
  if (!(band_height >= 0.0 && band_height <= 1.0)) {
    throw std::invalid_argument("PiecewisePattern: band height must be in [0, 1]");
  }
}

std::size_t PiecewisePattern::interval_at(double phi) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), phi);
  if (it == breakpoints.begin()) {
    return breakpoints.size() - 1;  // before the first breakpoint: wrap
  }
  return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
}

PiecewisePattern octant_pattern(double band_height) {
  PiecewisePattern p;
  p.band_height = band_height;
  p.breakpoints.resize(8);
  p.outcomes.resize(8);
  p.times.resize(8);
  for (int k = 0; k < 8; ++k) {
    p.breakpoints[k] = static_cast<double>(k) * kOctantWidth;
    p.outcomes[k] = k < 4 ? +1 : -1;
    p.times[k] = kOctantTimes[k];
  }
  p.validate();
  return p;
}

PiecewisePattern classic_pattern() {
  PiecewisePattern p;
  p.breakpoints = {0.0, std::numbers::pi};
  p.outcomes = {+1, -1};
  p.times = {0.0, 0.0};
  p.band_height = 0.0;
  return p;
}

std::array<Setting, 4> chsh_settings(double relative_angle) {
  return {Setting(0.0), Setting(2.0 * relative_angle), Setting(relative_angle),
          Setting(-relative_angle)};
}

namespace detail {

std::vector<double> merged_breakpoints(const PiecewisePattern& pattern,
                                       std::span<const Setting> shifts) {
  std::vector<double> pts;
  pts.reserve(pattern.breakpoints.size() * shifts.size());
  for (const Setting s : shifts) {
    for (const double b : pattern.breakpoints) {
      pts.push_back(canonicalize_angle(b + s.angle()));
    }
  }
  std::sort(pts.begin(), pts.end());

  std::vector<double> kept;
  kept.reserve(pts.size());
  for (const double x : pts) {
    if (kept.empty() || x - kept.back() > kBreakpointEps) {
      kept.push_back(x);
    }
  }
  // The same physical boundary can round to both ends of [0, 2*pi).
  if (kept.size() > 1 && (kept.front() + kTwoPi) - kept.back() <= kBreakpointEps) {
    kept.pop_back();
  }
  return kept;
}

std::vector<Arc> arcs_of(const std::vector<double>& breakpoints) {
  const std::size_t n = breakpoints.size();
  std::vector<Arc> arcs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double start = breakpoints[i];
    const double end = i + 1 < n ? breakpoints[i + 1] : breakpoints[0] + kTwoPi;
    arcs[i] = {start, end - start, start + 0.5 * (end - start)};
  }
  return arcs;
}

}  // namespace detail

PairStatistics sweep_pair(const PiecewisePattern& pattern, Setting a, Setting c,
                          CoincidenceWindow window) {
  pattern.validate();
  const std::array<Setting, 2> shifts = {a, c};
  const auto pts = detail::merged_breakpoints(pattern, shifts);
  const auto arcs = detail::arcs_of(pts);

  const double band = pattern.band_height;
  const double main = 1.0 - band;

  double p_equal_coincident = 0.0;
  double p_unequal_coincident = 0.0;
  double p_equal_noncoincident = 0.0;
  double p_unequal_noncoincident = 0.0;

  for (const auto& arc : arcs) {
    const double w = arc.length / kTwoPi;
    const double phi_left = canonicalize_angle(arc.midpoint - a.angle());
    const double phi_right = canonicalize_angle(arc.midpoint - c.angle());
    const bool equal =
        pattern.outcome_at(phi_left) == pattern.outcome_at(phi_right);
    const bool coincident = is_coincident(pattern.time_at(phi_left),
                                          pattern.time_at(phi_right), window);
    // The band layer (height l) responds at time 0 on both wings, so it is
    // always coincident and shares the main layer's outcome agreement.
    double& coincident_cell = equal ? p_equal_coincident : p_unequal_coincident;
    double& noncoincident_cell =
        equal ? p_equal_noncoincident : p_unequal_noncoincident;
    coincident_cell += w * band;
    if (coincident) {
      coincident_cell += w * main;
    } else {
      noncoincident_cell += w * main;
    }
  }

  // Normalizing by the accumulated total (1 up to rounding) keeps the cell
  // partition exact and makes all-coincident cases return exactly 1.
  const double total = p_equal_coincident + p_unequal_coincident +
                       p_equal_noncoincident + p_unequal_noncoincident;
  PairStatistics out;
  out.p_equal_and_coincident = p_equal_coincident / total;
  out.p_unequal_and_coincident = p_unequal_coincident / total;
  out.p_equal_and_noncoincident = p_equal_noncoincident / total;
  out.p_unequal_and_noncoincident = p_unequal_noncoincident / total;
  out.p_coincidence = out.p_equal_and_coincident + out.p_unequal_and_coincident;
  if (out.p_coincidence > 0.0) {
    out.conditional_correlation =
        (out.p_equal_and_coincident - out.p_unequal_and_coincident) /
        out.p_coincidence;
  }
  return out;
}

CommonPartStats sweep_common_part(const PiecewisePattern& pattern,
                                  const std::array<Setting, 4>& settings,
                                  CoincidenceWindow window) {
  pattern.validate();
  const auto pts = detail::merged_breakpoints(pattern, settings);
  const auto arcs = detail::arcs_of(pts);

  const double band = pattern.band_height;
  const double main = 1.0 - band;

  CommonPartStats out;
  double total = 0.0;
  for (const auto& arc : arcs) {
    const double w = arc.length / kTwoPi;
    total += w * band + w * main;
    std::array<double, 4> time{};
    for (int s = 0; s < 4; ++s) {
      time[s] = pattern.time_at(canonicalize_angle(arc.midpoint - settings[s].angle()));
    }
    bool all_coincident = true;
    for (int k = 0; k < 4; ++k) {
      const bool coincident = is_coincident(time[kPairLeftIndex[k]],
                                            time[kPairRightIndex[k]], window);
      out.p_pair[k] += w * band + (coincident ? w * main : 0.0);
      all_coincident = all_coincident && coincident;
    }
    out.p_intersection += w * band + (all_coincident ? w * main : 0.0);
  }
  out.p_intersection /= total;
  for (double& p : out.p_pair) p /= total;

  bool defined = true;
  double delta = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (out.p_pair[k] > 0.0) {
      out.p_intersection_given_pair[k] = out.p_intersection / out.p_pair[k];
      delta = std::min(delta, out.p_intersection_given_pair[k]);
    } else {
      out.p_intersection_given_pair[k] = 0.0;
      defined = false;
    }
  }
  if (defined) {
    out.delta = delta;
  }
  return out;
}

}  // namespace bellsim
