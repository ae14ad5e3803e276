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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "bladecm/ae/network.hpp"
#include "bladecm/core/normalizer.hpp"
#include "bladecm/core/regions.hpp"
#include "bladecm/glr/glr.hpp"

namespace bladecm::ae {

struct AeOptions {
  Index window = 100;
  int epochs = 200;
  std::uint64_t seed = 1;
  Index batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Index train_hop = 10;  // spacing of training windows
  double pf = 0.01;
  double lpf_alpha = 0.98;
  void validate() const;
};

struct TrainReport {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

struct AeModel {
  Network network{Shape{1, 1}, {LayerSpec::reshape(1, 1)}};
  NormalizerState normalizer;
  Index window = 0;
  double mae_threshold = 0.0;
  double lpf_alpha = 0.98;
  int epochs = 0;
  std::uint64_t seed = 0;
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
  std::optional<glr::GlrConfig> glr;
  // Healthy MAE level differs by operating region; GLR standardizes with these
  // when present and falls back to glr->mu0/sigma elsewhere.
  std::map<Region, glr::H0Stats> region_h0;

  Index channel_count() const { return static_cast<Index>(normalizer.channels().size()); }
  void validate() const;
};

// Strided conv + LSTM encoder, 12-unit tanh latent, LSTM decoder with a
// linear read-out. Needs window % 10 == 0.
std::vector<LayerSpec> default_architecture(Index window, Index channels = 9);
// Same layer sequence with stride 2 and every width equal to `width`; used
// for gradient checks on small instances.
std::vector<LayerSpec> compact_architecture(Index window, Index channels, Index width);

// Windows ending at first_end, first_end + hop, ... as batch columns.
Eigen::MatrixXd window_batch(const Eigen::MatrixXd& normalized, Index window, Index first_end,
                             Index count, Index hop = 1);

// Trains on the channels of `train` (normally the 9-channel AE set).
// The threshold is the (1 - pf) quantile of the low-passed MAE over every
// training window.
std::pair<AeModel, TrainReport> train_ae(const SignalMatrix& train, const SignalMatrix& val,
                                         const std::vector<LayerSpec>& layers,
                                         const AeOptions& opts);
// Several contiguous pieces; no window straddles two pieces and the
// threshold filter restarts on each training piece.
std::pair<AeModel, TrainReport> train_ae(std::span<const SignalMatrix> train,
                                         std::span<const SignalMatrix> val,
                                         const std::vector<LayerSpec>& layers,
                                         const AeOptions& opts);

// Per-window mean absolute reconstruction error of already-normalized
// samples, windows ending at first_end .. first_end+count-1.
Eigen::VectorXd mae_windows(const AeModel& model, const Eigen::MatrixXd& normalized,
                            Index first_end, Index count);

struct MaeTrace {
  std::vector<double> raw;
  std::vector<double> filtered;
  std::vector<std::uint8_t> valid;  // 0 for the first window-1 samples
  std::vector<std::uint8_t> flags;
  double threshold = 0.0;
};

MaeTrace mae_statistic(const AeModel& model, const SignalMatrix& run);

// Central finite-difference check of loss_and_gradient. Relative error uses
// max(|analytic|, |numeric|, 1e-3 * max |gradient| in the tensor).
struct GradCheckResult {
  LayerKind kind = LayerKind::Dense;
  std::size_t layer = 0;
  std::size_t parameter = 0;
  double max_rel_error = 0.0;
  Index checked = 0;
};

std::vector<GradCheckResult> gradient_check(const Network& net, const Eigen::MatrixXd& batch,
                                            double step = 1e-5, Index max_entries_per_tensor = 0);

}  // namespace bladecm::ae
