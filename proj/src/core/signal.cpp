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

#include "bladecm/core/signal.hpp"

#include <cmath>
#include <set>

#include "bladecm/error.hpp"

namespace bladecm {

ChannelSet::ChannelSet(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> seen;
  for (const auto& n : names_) {
    bladecm::require(!n.empty(), Errc::InvalidConfig, "empty channel name");
    bladecm::require(seen.insert(n).second, Errc::InvalidConfig, "duplicate channel name '" + n + "'");
  }
}

const ChannelSet& ChannelSet::full() {
  static const ChannelSet kFull({"flap1", "flap2", "flap3", "edge1", "edge2", "edge3",
                                 "rotor_speed", "wind_speed", "grid_power", "pitch1",
                                 "pitch2", "pitch3"});
  return kFull;
}

const ChannelSet& ChannelSet::autoencoder() {
  static const ChannelSet kAe(
      std::vector<std::string>(full().names().begin(), full().names().begin() + 9));
  return kAe;
}

std::optional<std::size_t> ChannelSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t ChannelSet::require(std::string_view name) const {
  auto i = index_of(name);
  if (!i) raise(Errc::MissingChannel, "channel '" + std::string(name) + "' not present");
  return *i;
}

bool ChannelSet::is_prefix_of(const ChannelSet& other) const {
  if (size() > other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (names_[i] != other.names_[i]) return false;
  }
  return true;
}

SignalMatrix::SignalMatrix(Eigen::MatrixXd samples, ChannelSet channels, double sample_period,
                           double start_time)
    : samples_(std::move(samples)),
      channels_(std::move(channels)),
      sample_period_(sample_period),
      start_time_(start_time) {
  require(samples_.rows() >= 1, Errc::InsufficientData, "signal matrix needs at least one sample");
  require(static_cast<std::size_t>(samples_.cols()) == channels_.size(), Errc::ChannelMismatch,
          "column count does not match channel count");
  require(std::isfinite(sample_period_) && sample_period_ > 0.0, Errc::InvalidConfig,
          "sample period must be positive");
  require(std::isfinite(start_time_), Errc::InvalidConfig, "start time must be finite");
  require(samples_.allFinite(), Errc::NonFiniteInput, "signal contains non-finite samples");
}

Index SignalMatrix::index_at_or_after(double t) const {
  double pos = (t - start_time_) / sample_period_;
  auto k = static_cast<Index>(std::ceil(pos - 1e-9));
  return k < 0 ? 0 : k;
}

Eigen::VectorXd SignalMatrix::column(std::string_view name) const {
  return samples_.col(static_cast<Index>(channels_.require(name)));
}

SignalMatrix SignalMatrix::select(const ChannelSet& channels) const {
  if (channels == channels_) return *this;
  Eigen::MatrixXd out(rows(), static_cast<Index>(channels.size()));
  for (std::size_t c = 0; c < channels.size(); ++c) {
    out.col(static_cast<Index>(c)) = samples_.col(static_cast<Index>(channels_.require(channels[c])));
  }
  return SignalMatrix(std::move(out), channels, sample_period_, start_time_);
}

SignalMatrix SignalMatrix::slice(Index begin, Index count) const {
  require(begin >= 0 && count >= 1 && begin + count <= rows(), Errc::DimensionMismatch,
          "slice out of range");
  return SignalMatrix(samples_.middleRows(begin, count), channels_, sample_period_, time(begin));
}

}  // namespace bladecm
