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

#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "bladecm/core/signal.hpp"

namespace bladecm {

// Operating regions of a variable-speed, variable-pitch turbine, from idle
// (I) to full load (V).
enum class Region { I = 1, II = 2, III = 3, IV = 4, V = 5 };

inline constexpr std::array<Region, 5> kAllRegions = {Region::I, Region::II, Region::III,
                                                      Region::IV, Region::V};
// Regions that get a dPCA model; the idle region is not monitored.
inline constexpr std::array<Region, 4> kMonitoredRegions = {Region::II, Region::III, Region::IV,
                                                            Region::V};

std::string_view to_string(Region r);
Region parse_region(std::string_view text);
inline int region_index(Region r) { return static_cast<int>(r); }

// Wind-speed breakpoints between consecutive regions plus the rated levels
// used to disambiguate samples near the boundaries.
//
// Defaults: I below 3 m/s, II 3-7, III 7-11, IV 11-13, V above 13.
struct RegionBoundaries {
  std::array<double, 4> wind_breakpoints = {3.0, 7.0, 11.0, 13.0};
  double rated_power = 2.2e6;
  double rated_rotor_speed = 1.02;
  // Power at or below this fraction of rated means the turbine is idle.
  double idle_power_fraction = 0.01;
  // Full-load classification needs at least this fraction of rated power.
  double full_load_power_fraction = 0.95;
  // Runs shorter than this many samples are merged into the preceding region.
  Index min_dwell = 50;
  // Length (s) of the centred moving average applied to wind speed before
  // classification, shortened at the ends of the record; 0 classifies the
  // instantaneous wind.
  double wind_average_window = 600.0;

  void validate() const;
};

// Label of a single sample, before dwell filtering.
Region classify_sample(double wind_speed, double grid_power, double rotor_speed,
                       const RegionBoundaries& bounds);

// One label per sample with short runs merged into the preceding region.
std::vector<Region> segment_regions(const SignalMatrix& data, const RegionBoundaries& bounds);

// Maximal constant-label run [begin, end).
struct RegionRun {
  Region region;
  Index begin;
  Index end;
  Index length() const { return end - begin; }
};

std::vector<RegionRun> region_runs(std::span<const Region> labels);

// Region attributed to the window that ends at sample `end`: the label of
// its newest sample.
inline Region window_region(std::span<const Region> labels, Index end) {
  return labels[static_cast<std::size_t>(end)];
}

}  // namespace bladecm
