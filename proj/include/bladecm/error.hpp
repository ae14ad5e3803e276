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

#include <stdexcept>
#include <string>
#include <string_view>

namespace bladecm {

// Every failure the library reports. The names double as the stable error
// identifiers printed by the CLI.
enum class Errc {
  ZeroVarianceChannel,
  ChannelMismatch,
  WindowTooLong,
  MissingChannel,
  InvalidFractions,
  InvalidConfig,
  FaultAfterEnd,
  UnknownChannel,
  NotSymmetric,
  NoConvergence,
  AllZeroSpectrum,
  InsufficientData,
  DimensionMismatch,
  EmptyInput,
  MissingModel,
  ShapeMismatch,
  NonFiniteWeights,
  DivergedLoss,
  NonFiniteInput,
  NoFeasibleWindow,
  InsufficientRegionData,
  ModelVersionMismatch,
  MalformedCsv,
  MalformedModel,
  IoError,
};

// Coarse classes used for process exit codes.
enum class ErrorClass { Usage = 1, Data = 2, Numerical = 3 };

std::string_view to_string(Errc code);
ErrorClass error_class(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  ErrorClass error_class() const noexcept { return bladecm::error_class(code_); }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& detail);

inline void require(bool condition, Errc code, const std::string& detail) {
  if (!condition) raise(code, detail);
}

}  // namespace bladecm
