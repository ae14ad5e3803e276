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
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bladecm/core/regions.hpp"
#include "bladecm/core/signal.hpp"

namespace bladecm::sim {

// Per-group white measurement noise (standard deviations, channel units).
struct NoiseConfig {
  double flap = 3.0e4;
  double edge = 3.0e4;
  double rotor_speed = 0.01;
  double wind_speed = 0.1;
  double grid_power = 1.0e4;
  double pitch = 0.05;
};

// Parameters of the synthetic 2.2 MW variable-speed, variable-pitch turbine.
//
// The mean wind is either constant (mean_wind), a linear ramp from
// mean_wind to ramp_end_wind, or a cyclic schedule of levels each held for
// schedule_dwell seconds. Turbulence is a first-order filtered Gaussian
// process with standard deviation turbulence_intensity * mean.
//
// Flap moments scale as thrust_coefficient * wind^2, relieved by pitch.
// With the defaults the healthy flap-moment standard deviation at 8 m/s is
// about 2.5e5 N*m, so the default 1e6 N*m bias is roughly four standard
// deviations.
struct SimConfig {
  std::uint64_t seed = 1;
  double duration = 900.0;
  double sample_period = kDefaultSamplePeriod;

  double mean_wind = 8.0;
  std::optional<double> ramp_end_wind;
  std::vector<double> wind_schedule;
  double schedule_dwell = 300.0;
  double turbulence_intensity = 0.1;
  double turbulence_time_constant = 10.0;

  double cut_in = 3.0;
  double rated_wind = 12.0;
  double cut_out = 25.0;
  double rated_power = 2.2e6;
  double rated_rotor_speed = 1.02;  // reached at 7 m/s with the default tip speed ratio
  double rotor_radius = 55.0;
  double tip_speed_ratio = 8.0;
  double rotor_time_constant = 3.0;
  double power_time_constant = 2.0;
  double pitch_time_constant = 1.0;
  double pitch_gain = 2.5;  // deg per m/s above rated wind

  double thrust_coefficient = 1.8e4;  // N*m per (m/s)^2
  double pitch_thrust_relief = 0.15;  // per degree of pitch
  double flap_1p_amplitude = 0.1;     // relative 1P modulation of flap load
  double blade_mass_moment = 1.5e6;   // gravity edge moment amplitude, N*m

  NoiseConfig noise;

  void validate() const;
  Index sample_count() const;
  RegionBoundaries default_boundaries() const;
};

enum class FaultKind { FlapBias, EdgeBias, FlapStuck, EdgeStuck, FlapJump, FlapExpDrift };

inline constexpr std::array<FaultKind, 6> kAllFaultKinds = {
    FaultKind::FlapBias,  FaultKind::EdgeBias, FaultKind::FlapStuck,
    FaultKind::EdgeStuck, FaultKind::FlapJump, FaultKind::FlapExpDrift};

std::string_view to_string(FaultKind kind);
FaultKind parse_fault_kind(std::string_view text);

// One injected fault on a blade-root moment channel, active from `time`.
//
// magnitude is the offset (N*m) for the bias and jump kinds, the stuck
// ratio for the stuck kinds and the asymptotic amplitude (N*m) for the
// exponential drift, whose time constant is `time_constant` seconds.
struct FaultSpec {
  FaultKind kind = FaultKind::FlapBias;
  int blade = 1;
  double time = 300.0;
  double magnitude = 1.0e6;
  double time_constant = 60.0;

  // Default magnitude per kind: 1e6 N*m offsets, 0.8 stuck ratio, 2e6 N*m
  // jump, 1e6 N*m drift with a 60 s time constant.
  static FaultSpec defaults(FaultKind kind, int blade = 1, double time = 300.0);

  std::string channel() const;
  void validate() const;
};

// Telemetry plus its region trace and, for corrupted runs, the fault.
struct LabeledRun {
  SignalMatrix data;
  std::vector<Region> regions;
  std::optional<FaultSpec> fault;
};

// Deterministic healthy telemetry in canonical channel order.
LabeledRun generate_healthy(const SimConfig& cfg);
LabeledRun generate_healthy(const SimConfig& cfg, const RegionBoundaries& bounds);

// Copy of `run` with the fault applied to samples at or after fault.time.
LabeledRun inject_fault(const LabeledRun& run, const FaultSpec& fault);
SignalMatrix inject_fault(const SignalMatrix& data, const FaultSpec& fault);

// Steady-state electrical power (W) at a given wind speed.
double power_curve(const SimConfig& cfg, double wind);
// Steady-state rotor speed setpoint (rad/s).
double rotor_speed_setpoint(const SimConfig& cfg, double wind);
// Steady-state collective pitch setpoint (deg).
double pitch_setpoint(const SimConfig& cfg, double wind);

}  // namespace bladecm::sim
