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

#include <Eigen/Dense>

#include "bladecm/core/channels.hpp"

namespace bladecm {

using Index = Eigen::Index;

inline constexpr double kDefaultSamplePeriod = 0.1;

// n x m multichannel time series sampled at a fixed period. Rows are
// samples, columns follow the channel set. Immutable once built.
class SignalMatrix {
 public:
  SignalMatrix(Eigen::MatrixXd samples, ChannelSet channels,
               double sample_period = kDefaultSamplePeriod, double start_time = 0.0);

  const Eigen::MatrixXd& samples() const { return samples_; }
  const ChannelSet& channels() const { return channels_; }
  double sample_period() const { return sample_period_; }
  double start_time() const { return start_time_; }

  Index rows() const { return samples_.rows(); }
  Index cols() const { return samples_.cols(); }
  double time(Index k) const { return start_time_ + static_cast<double>(k) * sample_period_; }
  // First sample index whose timestamp is at or after t.
  Index index_at_or_after(double t) const;

  Eigen::VectorXd column(std::string_view name) const;

  // Columns reordered/subset to match `channels` by name.
  SignalMatrix select(const ChannelSet& channels) const;
  SignalMatrix slice(Index begin, Index count) const;

 private:
  Eigen::MatrixXd samples_;
  ChannelSet channels_;
  double sample_period_;
  double start_time_;
};

}  // namespace bladecm
