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

#include "bladecm/sim/turbine.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "bladecm/error.hpp"

namespace bladecm::sim {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

double mean_wind_at(const SimConfig& cfg, double t) {
  if (!cfg.wind_schedule.empty()) {
    auto slot = static_cast<std::size_t>(std::floor(t / cfg.schedule_dwell));
    return cfg.wind_schedule[slot % cfg.wind_schedule.size()];
  }
  if (cfg.ramp_end_wind) {
    return cfg.mean_wind + (*cfg.ramp_end_wind - cfg.mean_wind) * t / cfg.duration;
  }
  return cfg.mean_wind;
}

bool generating(const SimConfig& cfg, double wind) {
  return wind >= cfg.cut_in && wind <= cfg.cut_out;
}

// Discrete first-order lag gain for time constant tau.
double lag_gain(double dt, double tau) { return 1.0 - std::exp(-dt / tau); }

}  // namespace

void SimConfig::validate() const {
  require(positive(duration) && positive(sample_period), Errc::InvalidConfig,
          "duration and sample_period must be positive");
  const double steps = duration / sample_period;
  require(std::abs(steps - std::round(steps)) < 1e-6 && std::round(steps) >= 1.0,
          Errc::InvalidConfig, "duration must be an integer number of sample periods");
  require(std::isfinite(mean_wind) && mean_wind >= 0.0, Errc::InvalidConfig,
          "mean_wind must be non-negative");
  if (ramp_end_wind) {
    require(std::isfinite(*ramp_end_wind) && *ramp_end_wind >= 0.0, Errc::InvalidConfig,
            "ramp_end_wind must be non-negative");
  }
  for (double w : wind_schedule) {
    require(std::isfinite(w) && w >= 0.0, Errc::InvalidConfig, "schedule winds must be >= 0");
  }
  require(wind_schedule.empty() || positive(schedule_dwell), Errc::InvalidConfig,
          "schedule_dwell must be positive");
  require(std::isfinite(turbulence_intensity) && turbulence_intensity >= 0.0, Errc::InvalidConfig,
          "turbulence_intensity must be non-negative");
  require(positive(cut_in) && cut_in < rated_wind && rated_wind < cut_out, Errc::InvalidConfig,
          "need 0 < cut_in < rated_wind < cut_out");
  for (double v : {turbulence_time_constant, rated_power, rated_rotor_speed, rotor_radius,
                   tip_speed_ratio, rotor_time_constant, power_time_constant, pitch_time_constant,
                   pitch_gain, thrust_coefficient, blade_mass_moment}) {
    require(positive(v), Errc::InvalidConfig, "physical scalars must be positive");
  }
  require(std::isfinite(pitch_thrust_relief) && pitch_thrust_relief >= 0.0 &&
              std::isfinite(flap_1p_amplitude) && flap_1p_amplitude >= 0.0,
          Errc::InvalidConfig, "load shape coefficients must be non-negative");
  for (double v : {noise.flap, noise.edge, noise.rotor_speed, noise.wind_speed, noise.grid_power,
                   noise.pitch}) {
    require(std::isfinite(v) && v >= 0.0, Errc::InvalidConfig, "noise levels must be >= 0");
  }
}

Index SimConfig::sample_count() const {
  return static_cast<Index>(std::llround(duration / sample_period));
}

RegionBoundaries SimConfig::default_boundaries() const {
  RegionBoundaries b;
  b.rated_power = rated_power;
  b.rated_rotor_speed = rated_rotor_speed;
  return b;
}

double power_curve(const SimConfig& cfg, double wind) {
  if (!generating(cfg, wind)) return 0.0;
  if (wind >= cfg.rated_wind) return cfg.rated_power;
  const double ci3 = cfg.cut_in * cfg.cut_in * cfg.cut_in;
  const double rw3 = cfg.rated_wind * cfg.rated_wind * cfg.rated_wind;
  return cfg.rated_power * (wind * wind * wind - ci3) / (rw3 - ci3);
}

double rotor_speed_setpoint(const SimConfig& cfg, double wind) {
  if (wind > cfg.cut_out) return 0.0;
  return std::min(cfg.tip_speed_ratio * wind / cfg.rotor_radius, cfg.rated_rotor_speed);
}

double pitch_setpoint(const SimConfig& cfg, double wind) {
  if (wind > cfg.cut_out) return 90.0;
  if (wind <= cfg.rated_wind) return 0.0;
  return cfg.pitch_gain * (wind - cfg.rated_wind);
}

LabeledRun generate_healthy(const SimConfig& cfg) {
  return generate_healthy(cfg, cfg.default_boundaries());
}

LabeledRun generate_healthy(const SimConfig& cfg, const RegionBoundaries& bounds) {
  cfg.validate();
  const Index n = cfg.sample_count();
  const double dt = cfg.sample_period;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double a_turb = std::exp(-dt / cfg.turbulence_time_constant);
  const double b_turb = std::sqrt(1.0 - a_turb * a_turb);
  const double k_rotor = lag_gain(dt, cfg.rotor_time_constant);
  const double k_power = lag_gain(dt, cfg.power_time_constant);
  const double k_pitch = lag_gain(dt, cfg.pitch_time_constant);
  const auto& nz = cfg.noise;

  Eigen::MatrixXd x(n, 12);
  double turb = 0.0;
  double omega = 0.0;
  double power = 0.0;
  double pitch = 0.0;
  double azimuth = 0.0;

  for (Index k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double mean = mean_wind_at(cfg, t);
    const double sigma_u = cfg.turbulence_intensity * mean;
    const double eps = normal(rng);
    turb = (k == 0) ? sigma_u * eps : a_turb * turb + b_turb * sigma_u * eps;
    const double wind = std::max(0.1, mean + turb);

    if (k == 0) {
      omega = rotor_speed_setpoint(cfg, wind);
      power = power_curve(cfg, wind);
      pitch = pitch_setpoint(cfg, wind);
    } else {
      omega += k_rotor * (rotor_speed_setpoint(cfg, wind) - omega);
      power += k_power * (power_curve(cfg, wind) - power);
      pitch += k_pitch * (pitch_setpoint(cfg, wind) - pitch);
    }
    const bool on = generating(cfg, wind);

    // Draw every noise sample unconditionally so the random stream layout
    // does not depend on the operating state.
    std::array<double, 12> e;
    for (double& v : e) v = normal(rng);

    const double thrust = cfg.thrust_coefficient * wind * wind / (1.0 + cfg.pitch_thrust_relief * pitch);
    const double torque_share = power / std::max(omega, 0.1) / 3.0;
    for (int b = 0; b < 3; ++b) {
      const double psi = azimuth + kTwoPi * b / 3.0;
      x(k, b) = thrust * (1.0 + cfg.flap_1p_amplitude * std::sin(psi)) + nz.flap * e[b];
      x(k, 3 + b) = cfg.blade_mass_moment * std::cos(psi) + torque_share + nz.edge * e[3 + b];
    }
    x(k, 6) = omega + nz.rotor_speed * e[6];
    x(k, 7) = wind + nz.wind_speed * e[7];
    x(k, 8) = power + (on ? nz.grid_power * e[8] : 0.0);
    for (int b = 0; b < 3; ++b) x(k, 9 + b) = pitch + (on ? nz.pitch * e[9 + b] : 0.0);

    azimuth = std::fmod(azimuth + omega * dt, kTwoPi);
  }

  SignalMatrix data(std::move(x), ChannelSet::full(), dt, 0.0);
  auto regions = segment_regions(data, bounds);
  return {std::move(data), std::move(regions), std::nullopt};
}

}  // namespace bladecm::sim
