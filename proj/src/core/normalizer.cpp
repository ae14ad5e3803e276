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

#include "bladecm/core/normalizer.hpp"

#include <cmath>

#include "bladecm/error.hpp"

namespace bladecm {

NormalizerState::NormalizerState(ChannelSet channels, Eigen::VectorXd mean, Eigen::VectorXd stddev)
    : channels_(std::move(channels)), mean_(std::move(mean)), stddev_(std::move(stddev)) {
  const auto m = static_cast<Index>(channels_.size());
  require(mean_.size() == m && stddev_.size() == m, Errc::ChannelMismatch,
          "normalizer statistics do not match channel count");
  for (Index c = 0; c < m; ++c) {
    require(std::isfinite(mean_(c)), Errc::NonFiniteInput, "non-finite channel mean");
    require(std::isfinite(stddev_(c)) && stddev_(c) > 0.0, Errc::ZeroVarianceChannel,
            channels_[static_cast<std::size_t>(c)]);
  }
}

Eigen::MatrixXd NormalizerState::apply(const Eigen::MatrixXd& raw) const {
  require(raw.cols() == mean_.size(), Errc::ChannelMismatch, "column count mismatch");
  return (raw.rowwise() - mean_.transpose()).array().rowwise() / stddev_.transpose().array();
}

NormalizerState fit_normalizer(std::span<const SignalMatrix> parts) {
  require(!parts.empty(), Errc::EmptyInput, "no data to fit normalizer");
  const ChannelSet& channels = parts.front().channels();
  const Index m = parts.front().cols();
  Index n = 0;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
  for (const auto& p : parts) {
    require(p.channels() == channels, Errc::ChannelMismatch, "parts have different channels");
    n += p.rows();
    sum += p.samples().colwise().sum().transpose();
  }
  require(n >= 2, Errc::InsufficientData, "need at least two samples to fit normalizer");
  Eigen::VectorXd mean = sum / static_cast<double>(n);
  // Second pass on centred data keeps the variance exact for large offsets.
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(m);
  for (const auto& p : parts) {
    ss += (p.samples().rowwise() - mean.transpose()).colwise().squaredNorm().transpose();
  }
  Eigen::VectorXd sd = (ss / static_cast<double>(n - 1)).cwiseSqrt();
  for (Index c = 0; c < m; ++c) {
    if (!(sd(c) > 0.0)) raise(Errc::ZeroVarianceChannel, channels[static_cast<std::size_t>(c)]);
  }
  return NormalizerState(channels, std::move(mean), std::move(sd));
}

NormalizerState fit_normalizer(const SignalMatrix& data) {
  return fit_normalizer(std::span<const SignalMatrix>(&data, 1));
}

SignalMatrix normalize(const SignalMatrix& data, const NormalizerState& norm) {
  require(data.channels() == norm.channels(), Errc::ChannelMismatch,
          "data channels differ from normalizer channels");
  return SignalMatrix(norm.apply(data.samples()), data.channels(), data.sample_period(),
                      data.start_time());
}

SignalMatrix denormalize(const SignalMatrix& data, const NormalizerState& norm) {
  require(data.channels() == norm.channels(), Errc::ChannelMismatch,
          "data channels differ from normalizer channels");
  Eigen::MatrixXd raw = (data.samples().array().rowwise() * norm.stddev().transpose().array())
                            .matrix()
                            .rowwise() +
                        norm.mean().transpose();
  return SignalMatrix(std::move(raw), data.channels(), data.sample_period(), data.start_time());
}

}  // namespace bladecm
