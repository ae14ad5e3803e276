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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bladecm {

namespace channel {
inline constexpr std::string_view kFlap1 = "flap1";
inline constexpr std::string_view kFlap2 = "flap2";
inline constexpr std::string_view kFlap3 = "flap3";
inline constexpr std::string_view kEdge1 = "edge1";
inline constexpr std::string_view kEdge2 = "edge2";
inline constexpr std::string_view kEdge3 = "edge3";
inline constexpr std::string_view kRotorSpeed = "rotor_speed";
inline constexpr std::string_view kWindSpeed = "wind_speed";
inline constexpr std::string_view kGridPower = "grid_power";
inline constexpr std::string_view kPitch1 = "pitch1";
inline constexpr std::string_view kPitch2 = "pitch2";
inline constexpr std::string_view kPitch3 = "pitch3";
}  // namespace channel

// Ordered, duplicate-free list of channel names.
//
// The canonical full set holds the 12 telemetry channels in file order:
// three flap moments, three edge moments (N*m), rotor speed (rad/s), wind
// speed (m/s), grid power (W) and three pitch angles (deg). The
// autoencoder uses the first nine.
class ChannelSet {
 public:
  ChannelSet() = default;
  explicit ChannelSet(std::vector<std::string> names);

  static const ChannelSet& full();
  static const ChannelSet& autoencoder();

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::string& operator[](std::size_t i) const { return names_[i]; }
  std::span<const std::string> names() const { return names_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  // Throws MissingChannel when absent.
  std::size_t require(std::string_view name) const;

  bool is_prefix_of(const ChannelSet& other) const;

  friend bool operator==(const ChannelSet&, const ChannelSet&) = default;

 private:
  std::vector<std::string> names_;
};

}  // namespace bladecm
