// Copyright 2026 The bladecm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bladecm/core/regions.hpp"

#include <algorithm>
#include <cmath>

#include <string>

#include "bladecm/error.hpp"

namespace bladecm {

std::string_view to_string(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
    case Region::V: return "V";
  }
  return "?";
}

Region parse_region(std::string_view text) {
  for (Region r : kAllRegions) {
    if (to_string(r) == text) return r;
  }
  raise(Errc::InvalidConfig, "unknown region '" + std::string(text) + "'");
}

void RegionBoundaries::validate() const {
  for (std::size_t i = 0; i < wind_breakpoints.size(); ++i) {
    require(wind_breakpoints[i] > 0.0, Errc::InvalidConfig, "region breakpoints must be positive");
    if (i > 0) {
      require(wind_breakpoints[i] > wind_breakpoints[i - 1], Errc::InvalidConfig,
              "region breakpoints must be strictly increasing");
    }
  }
  require(rated_power > 0.0 && rated_rotor_speed > 0.0, Errc::InvalidConfig,
          "rated levels must be positive");
  require(idle_power_fraction >= 0.0 && idle_power_fraction < full_load_power_fraction &&
              full_load_power_fraction <= 1.0,
          Errc::InvalidConfig, "power fractions out of range");
  require(std::isfinite(wind_average_window) && wind_average_window >= 0.0, Errc::InvalidConfig,
          "wind averaging window must be non-negative");
  require(min_dwell >= 1, Errc::InvalidConfig, "min_dwell must be at least 1");
}

Region classify_sample(double wind_speed, double grid_power, double rotor_speed,
                       const RegionBoundaries& b) {
  const auto& w = b.wind_breakpoints;
  if (wind_speed < w[0] || grid_power <= b.idle_power_fraction * b.rated_power) return Region::I;
  if (wind_speed >= w[3]) {
    return grid_power >= b.full_load_power_fraction * b.rated_power ? Region::V : Region::IV;
  }
  if (wind_speed >= w[2]) return Region::IV;
  if (wind_speed >= w[1]) return Region::III;
  // Partial-load wind but the rotor is already at its speed limit.
  return rotor_speed >= 0.99 * b.rated_rotor_speed ? Region::III : Region::II;
}

std::vector<RegionRun> region_runs(std::span<const Region> labels) {
  std::vector<RegionRun> runs;
  const auto n = static_cast<Index>(labels.size());
  Index begin = 0;
  for (Index k = 1; k <= n; ++k) {
    if (k == n || labels[static_cast<std::size_t>(k)] != labels[static_cast<std::size_t>(begin)]) {
      runs.push_back({labels[static_cast<std::size_t>(begin)], begin, k});
      begin = k;
    }
  }
  return runs;
}

std::vector<Region> segment_regions(const SignalMatrix& data, const RegionBoundaries& bounds) {
  bounds.validate();
  const auto& ch = data.channels();
  const auto wind = static_cast<Index>(ch.require(channel::kWindSpeed));
  const auto power = static_cast<Index>(ch.require(channel::kGridPower));
  const auto speed = static_cast<Index>(ch.require(channel::kRotorSpeed));
  const auto& x = data.samples();

  const Index n = data.rows();
  const auto half = static_cast<Index>(std::floor(bounds.wind_average_window / data.sample_period() / 2.0));
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (Index k = 0; k < n; ++k) prefix[static_cast<std::size_t>(k) + 1] = prefix[static_cast<std::size_t>(k)] + x(k, wind);
  std::vector<Region> raw(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const Index lo = std::max<Index>(0, k - half);
    const Index hi = std::min<Index>(n, k + half + 1);
    const double mean = (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) /
                        static_cast<double>(hi - lo);
    raw[static_cast<std::size_t>(k)] = classify_sample(mean, x(k, power), x(k, speed), bounds);
  }

  std::vector<Region> labels(raw.size());
  const auto runs = region_runs(raw);
  Region current = runs.front().region;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i == 0 || runs[i].length() >= bounds.min_dwell) current = runs[i].region;
    for (Index k = runs[i].begin; k < runs[i].end; ++k) labels[static_cast<std::size_t>(k)] = current;
  }
  return labels;
}

}  // namespace bladecm
