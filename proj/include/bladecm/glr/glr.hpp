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

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bladecm::glr {

using Index = Eigen::Index;

// Window-limited GLR test for a change in mean with known variance.
//   mu0, sigma: mean and standard deviation of the statistic when healthy
//   window:     M, the longest change-onset horizon searched
//   threshold:  h, the alarm level for g(k)
struct GlrConfig {
  double mu0 = 0.0;
  double sigma = 1.0;
  Index window = 600;
  double threshold = 1.0;

  // Throws InvalidConfig unless sigma > 0, window >= 1 and threshold > 0.
  void validate() const;
};

// g(k) = max over j in [k-M+1, k] of (sum_{i=j..k} (z(i) - mu0))^2 / (2 sigma^2 (k-j+1)),
// with the onset range truncated to the available samples near the start.
std::vector<double> glr_statistic(std::span<const double> z, double mu0, double sigma,
                                  Index window);
std::vector<double> glr_statistic(std::span<const double> z, const GlrConfig& cfg);

// Sample-by-sample evaluation of glr_statistic with O(M) state.
class GlrStream {
 public:
  GlrStream(double mu0, double sigma, Index window);
  double push(double z);
  void reset();

 private:
  double mu0_;
  double inv_two_var_;
  std::vector<double> ring_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

struct H0Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

// Sample mean and standard deviation (divisor N-1); needs N >= 1000.
H0Stats estimate_h0(std::span<const double> z);

struct CalibrationOptions {
  double pf = 0.01;
  double pd = 0.99;
  Index run_length = 9000;  // samples per simulated run
  Index onset = 3000;       // shift onset inside shifted runs
  Index runs = 1000;
  Index initial_window = 100;
  std::uint64_t seed = 1;
};

// Monte Carlo design of (M, h) under independent Gaussian residuals.
// For each M = initial_window, 2*initial_window, ...: h is the nearest-rank
// (1 - pf) quantile of the per-run maximum of g over `runs` healthy runs,
// and the detection rate is the fraction of runs shifted to mu1 from
// `onset` that alarm at or after the onset. The first M whose rate reaches
// pd is returned. Throws NoFeasibleWindow when M would exceed run_length.
GlrConfig calibrate_glr(double mu0, double sigma, double mu1, const CalibrationOptions& opts);

// A healthy statistic stream in standardized units, the standardized mean
// shift that a mu1 = 2*mu0 change would add at each sample, and the sample
// from which the shift is applied when estimating detection.
struct CalibrationStream {
  std::vector<double> z;
  std::vector<double> shift;
  std::size_t onset = 0;
};

struct StreamCalibration {
  Index window = 0;
  double threshold = 0.0;
  double detection_rate = 0.0;
};

// Same (M, h) search as calibrate_glr, but over recorded healthy streams
// instead of independent Gaussian draws.
StreamCalibration calibrate_glr_streams(std::span<const CalibrationStream> streams, double pf,
                                        double pd, Index initial_window);

struct DetectionTrace {
  std::vector<double> statistic;
  std::vector<double> threshold;
  std::vector<std::uint8_t> valid;
  std::vector<Index> alarms;  // up-crossings, ascending
  std::optional<Index> first_alarm;
  std::optional<Index> fault_index;
  bool false_alarm = false;
  bool detected = false;
  bool strongly_detected = false;

  // First alarm at or after the fault, if any.
  std::optional<Index> first_detection() const;
};

// Alarm bookkeeping for a statistic against a threshold.
//
// Alarms are upward crossings. Samples flagged invalid (warm-up, idle
// region) are skipped: they neither alarm nor break a run above threshold.
// With a fault index the record is split there: a statistic already above
// threshold at the first valid post-fault sample counts as a post-fault
// alarm. false_alarm means an alarm before the fault (any alarm when no
// fault is given); strongly_detected means the statistic stays above the
// threshold from the first post-fault alarm to the end.
DetectionTrace detect(std::span<const double> g, std::span<const double> threshold,
                      std::span<const std::uint8_t> valid, std::optional<Index> fault_index);
DetectionTrace detect(std::span<const double> g, double threshold,
                      std::optional<Index> fault_index = std::nullopt);

}  // namespace bladecm::glr
