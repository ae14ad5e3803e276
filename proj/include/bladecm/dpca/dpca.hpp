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

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "bladecm/core/normalizer.hpp"
#include "bladecm/core/regions.hpp"
#include "bladecm/glr/glr.hpp"

namespace bladecm::dpca {

struct DpcaOptions {
  Index window = 100;  // 10 s at 10 Hz
  double cv_target = 0.9;
  double pf = 0.01;
  double lpf_alpha = 0.98;
};

// Dynamic PCA model for one operating region.
struct DpcaModel {
  Region region = Region::II;
  NormalizerState normalizer;
  Index window = 0;
  Eigen::MatrixXd loadings;     // (m*window) x l, orthonormal columns
  Eigen::VectorXd eigenvalues;  // all m*window, descending, >= 0
  double spe_threshold = 0.0;
  double lpf_alpha = 0.98;
  std::optional<glr::GlrConfig> glr;

  Index retained() const { return loadings.cols(); }
  Index embedded_dim() const { return loadings.rows(); }
  Index channel_count() const { return static_cast<Index>(normalizer.channels().size()); }
  void validate() const;
};

// Fits one region's model from contiguous healthy segments of that region.
// Windows never straddle two segments. Steps: pooled normalizer, window
// embedding, covariance X_d^T X_d / (rows - 1), eigendecomposition,
// cumulative-variance order selection, low-passed training SPE (filter
// restarted per segment) and its nearest-rank (1 - pf) quantile.
DpcaModel fit_dpca(std::span<const SignalMatrix> segments, Region region, const DpcaOptions& opts);
DpcaModel fit_dpca(const SignalMatrix& train, Region region, const DpcaOptions& opts);

// Squared norm of the residual of one normalized, embedded row.
double spe(const DpcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& row);
// SPE of every row of an embedded matrix.
Eigen::VectorXd spe_rows(const DpcaModel& model, const Eigen::MatrixXd& rows);
// SPE of the windows ending at samples first_end .. first_end+count-1 of
// already-normalized samples.
Eigen::VectorXd spe_windows(const DpcaModel& model, const Eigen::MatrixXd& normalized,
                            Index first_end, Index count);

using DpcaModelSet = std::map<Region, DpcaModel>;

// Per-sample monitoring output. Samples without a statistic (idle region,
// window warm-up after entering a region) have valid = 0, raw = filtered = 0
// and flag = 0.
struct SpeTrace {
  std::vector<double> raw;
  std::vector<double> filtered;
  std::vector<double> threshold;
  std::vector<std::uint8_t> valid;
  std::vector<std::uint8_t> flags;
  std::vector<Region> regions;
};

// Routes every sample to its region's model. The low-pass filter restarts
// whenever a region is entered.
SpeTrace dpca_monitor(const DpcaModelSet& models, const SignalMatrix& run,
                      const RegionBoundaries& bounds);
SpeTrace dpca_monitor(const DpcaModelSet& models, const SignalMatrix& run,
                      std::span<const Region> labels);

}  // namespace bladecm::dpca
