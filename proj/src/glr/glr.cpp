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

#include "bladecm/glr/glr.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bladecm/dpca/filters.hpp"
#include "bladecm/error.hpp"

namespace bladecm::glr {

void GlrConfig::validate() const {
  require(std::isfinite(mu0), Errc::InvalidConfig, "GLR mu0 must be finite");
  require(std::isfinite(sigma) && sigma > 0.0, Errc::InvalidConfig, "GLR sigma must be positive");
  require(window >= 1, Errc::InvalidConfig, "GLR window must be at least 1");
  require(std::isfinite(threshold) && threshold > 0.0, Errc::InvalidConfig,
          "GLR threshold must be positive");
}

GlrStream::GlrStream(double mu0, double sigma, Index window)
    : mu0_(mu0), inv_two_var_(0.0), ring_(static_cast<std::size_t>(std::max<Index>(window, 1))) {
  require(std::isfinite(mu0), Errc::InvalidConfig, "GLR mu0 must be finite");
  require(std::isfinite(sigma) && sigma > 0.0, Errc::InvalidConfig, "GLR sigma must be positive");
  require(window >= 1, Errc::InvalidConfig, "GLR window must be at least 1");
  inv_two_var_ = 1.0 / (2.0 * sigma * sigma);
}

void GlrStream::reset() {
  head_ = 0;
  count_ = 0;
}

double GlrStream::push(double z) {
  require(std::isfinite(z), Errc::NonFiniteInput, "GLR input is not finite");
  const std::size_t cap = ring_.size();
  ring_[head_] = z - mu0_;
  head_ = (head_ + 1) % cap;
  count_ = std::min(count_ + 1, cap);
  // Walk back from the newest sample; each prefix is one candidate onset.
  double sum = 0.0;
  double best = 0.0;
  std::size_t idx = head_;
  for (std::size_t len = 1; len <= count_; ++len) {
    idx = (idx == 0 ? cap : idx) - 1;
    sum += ring_[idx];
    best = std::max(best, sum * sum / static_cast<double>(len));
  }
  return best * inv_two_var_;
}

std::vector<double> glr_statistic(std::span<const double> z, double mu0, double sigma,
                                  Index window) {
  GlrStream stream(mu0, sigma, window);
  std::vector<double> g;
  g.reserve(z.size());
  for (double v : z) g.push_back(stream.push(v));
  return g;
}

std::vector<double> glr_statistic(std::span<const double> z, const GlrConfig& cfg) {
  return glr_statistic(z, cfg.mu0, cfg.sigma, cfg.window);
}

H0Stats estimate_h0(std::span<const double> z) {
  require(z.size() >= 1000, Errc::InsufficientData,
          "H0 estimation needs at least 1000 samples, got " + std::to_string(z.size()));
  double sum = 0.0;
  for (double v : z) {
    require(std::isfinite(v), Errc::NonFiniteInput, "non-finite residual statistic");
    sum += v;
  }
  const double mean = sum / static_cast<double>(z.size());
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(z.size() - 1))};
}

namespace {

struct RunOutcome {
  double max_g = 0.0;
  bool detected = false;
};

// Max of g over the whole stream, and whether g exceeds h at or after onset.
RunOutcome scan(std::span<const double> z, std::span<const double> shift, std::size_t onset,
                Index window, std::optional<double> h) {
  GlrStream stream(0.0, 1.0, window);
  RunOutcome out;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double v = z[k] + (shift.empty() || k < onset ? 0.0 : shift[k]);
    const double g = stream.push(v);
    out.max_g = std::max(out.max_g, g);
    if (h && k >= onset && g > *h) {
      out.detected = true;
      break;
    }
  }
  return out;
}

void check_targets(double pf, double pd, Index initial_window) {
  require(std::isfinite(pf) && pf > 0.0 && pf < 1.0, Errc::InvalidConfig, "pf must be in (0, 1)");
  require(std::isfinite(pd) && pd > 0.0 && pd < 1.0, Errc::InvalidConfig, "pd must be in (0, 1)");
  require(initial_window >= 1, Errc::InvalidConfig, "initial window must be at least 1");
}

}  // namespace

StreamCalibration calibrate_glr_streams(std::span<const CalibrationStream> streams, double pf,
                                        double pd, Index initial_window) {
  check_targets(pf, pd, initial_window);
  require(!streams.empty(), Errc::EmptyInput, "no calibration streams");
  std::size_t shortest = streams.front().z.size();
  for (const auto& s : streams) {
    require(s.shift.empty() || s.shift.size() == s.z.size(), Errc::DimensionMismatch,
            "shift length differs from stream length");
    shortest = std::min(shortest, s.z.size());
  }
  const std::vector<double> no_shift;
  for (Index window = initial_window; window <= static_cast<Index>(shortest); window *= 2) {
    std::vector<double> maxima;
    maxima.reserve(streams.size());
    for (const auto& s : streams) maxima.push_back(scan(s.z, no_shift, 0, window, std::nullopt).max_g);
    const double h = dpca::quantile_threshold(maxima, pf);
    if (!(h > 0.0)) continue;
    std::size_t hits = 0;
    for (const auto& s : streams) hits += scan(s.z, s.shift, s.onset, window, h).detected ? 1 : 0;
    const double rate = static_cast<double>(hits) / static_cast<double>(streams.size());
    if (rate >= pd) return {window, h, rate};
  }
  raise(Errc::NoFeasibleWindow, "no GLR window up to the run length meets the detection target");
}

GlrConfig calibrate_glr(double mu0, double sigma, double mu1, const CalibrationOptions& opts) {
  require(std::isfinite(mu0) && std::isfinite(mu1) && mu1 > mu0, Errc::InvalidConfig,
          "calibration needs mu1 > mu0");
  require(std::isfinite(sigma) && sigma > 0.0, Errc::InvalidConfig, "sigma must be positive");
  require(opts.runs >= 1 && opts.run_length >= 1 && opts.onset >= 0 &&
              opts.onset < opts.run_length,
          Errc::InvalidConfig, "bad Monte Carlo sizes");

  // Work in standardized units; g is invariant to the affine change.
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shift = (mu1 - mu0) / sigma;
  std::vector<CalibrationStream> healthy(static_cast<std::size_t>(opts.runs));
  for (auto& s : healthy) {
    s.z.resize(static_cast<std::size_t>(opts.run_length));
    for (double& v : s.z) v = normal(rng);
  }
  // Independent draws for the shifted runs.
  std::vector<CalibrationStream> shifted(static_cast<std::size_t>(opts.runs));
  for (auto& s : shifted) {
    s.z.resize(static_cast<std::size_t>(opts.run_length));
    for (double& v : s.z) v = normal(rng);
    s.shift.assign(s.z.size(), shift);
    s.onset = static_cast<std::size_t>(opts.onset);
  }

  check_targets(opts.pf, opts.pd, opts.initial_window);
  const std::vector<double> no_shift;
  for (Index window = opts.initial_window; window <= opts.run_length; window *= 2) {
    std::vector<double> maxima;
    maxima.reserve(healthy.size());
    for (const auto& s : healthy) maxima.push_back(scan(s.z, no_shift, 0, window, std::nullopt).max_g);
    const double h = dpca::quantile_threshold(maxima, opts.pf);
    std::size_t hits = 0;
    for (const auto& s : shifted) hits += scan(s.z, s.shift, s.onset, window, h).detected ? 1 : 0;
    if (static_cast<double>(hits) / static_cast<double>(shifted.size()) >= opts.pd) {
      GlrConfig cfg{mu0, sigma, window, h};
      cfg.validate();
      return cfg;
    }
  }
  raise(Errc::NoFeasibleWindow, "no GLR window up to the run length meets the detection target");
}

std::optional<Index> DetectionTrace::first_detection() const {
  if (!fault_index) return first_alarm;
  for (Index a : alarms) {
    if (a >= *fault_index) return a;
  }
  return std::nullopt;
}

DetectionTrace detect(std::span<const double> g, std::span<const double> threshold,
                      std::span<const std::uint8_t> valid, std::optional<Index> fault_index) {
  require(threshold.size() == g.size() && (valid.empty() || valid.size() == g.size()),
          Errc::DimensionMismatch, "statistic, threshold and validity lengths differ");
  DetectionTrace out;
  out.statistic.assign(g.begin(), g.end());
  out.threshold.assign(threshold.begin(), threshold.end());
  out.valid = valid.empty() ? std::vector<std::uint8_t>(g.size(), 1)
                            : std::vector<std::uint8_t>(valid.begin(), valid.end());
  out.fault_index = fault_index;

  bool prev_above = false;
  bool post_started = false;
  std::optional<Index> first_post;
  bool stays_above = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!out.valid[i]) continue;
    require(std::isfinite(g[i]), Errc::NonFiniteInput, "non-finite detection statistic");
    const auto k = static_cast<Index>(i);
    if (fault_index && k >= *fault_index && !post_started) {
      post_started = true;
      prev_above = false;
    }
    const bool above = g[i] > threshold[i];
    if (above && !prev_above) {
      out.alarms.push_back(k);
      if (fault_index && k >= *fault_index && !first_post) first_post = k;
    }
    if (first_post && !above) stays_above = false;
    prev_above = above;
  }
  if (!out.alarms.empty()) out.first_alarm = out.alarms.front();
  if (fault_index) {
    out.false_alarm = !out.alarms.empty() && out.alarms.front() < *fault_index;
    out.detected = first_post.has_value();
    out.strongly_detected = out.detected && stays_above;
  } else {
    out.false_alarm = !out.alarms.empty();
  }
  return out;
}

DetectionTrace detect(std::span<const double> g, double threshold,
                      std::optional<Index> fault_index) {
  const std::vector<double> h(g.size(), threshold);
  return detect(g, h, {}, fault_index);
}

}  // namespace bladecm::glr
