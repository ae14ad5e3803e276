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

#include "bladecm/core/signal.hpp"

namespace bladecm {

// Per-channel mean and sample standard deviation used to z-score data.
class NormalizerState {
 public:
  NormalizerState() = default;
  NormalizerState(ChannelSet channels, Eigen::VectorXd mean, Eigen::VectorXd stddev);

  const ChannelSet& channels() const { return channels_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& stddev() const { return stddev_; }

  // Raw sample rows (already in this normalizer's channel order) to z-scores.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const;

 private:
  ChannelSet channels_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd stddev_;
};

// Column means and standard deviations (divisor n-1).
NormalizerState fit_normalizer(const SignalMatrix& data);
// Same statistics pooled over several matrices with identical channels.
NormalizerState fit_normalizer(std::span<const SignalMatrix> parts);

SignalMatrix normalize(const SignalMatrix& data, const NormalizerState& norm);
SignalMatrix denormalize(const SignalMatrix& data, const NormalizerState& norm);

}  // namespace bladecm
