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

#include "bladecm/error.hpp"

namespace bladecm {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ZeroVarianceChannel: return "ZeroVarianceChannel";
    case Errc::ChannelMismatch: return "ChannelMismatch";
    case Errc::WindowTooLong: return "WindowTooLong";
    case Errc::MissingChannel: return "MissingChannel";
    case Errc::InvalidFractions: return "InvalidFractions";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::FaultAfterEnd: return "FaultAfterEnd";
    case Errc::UnknownChannel: return "UnknownChannel";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::AllZeroSpectrum: return "AllZeroSpectrum";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingModel: return "MissingModel";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFiniteWeights: return "NonFiniteWeights";
    case Errc::DivergedLoss: return "DivergedLoss";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::NoFeasibleWindow: return "NoFeasibleWindow";
    case Errc::InsufficientRegionData: return "InsufficientRegionData";
    case Errc::ModelVersionMismatch: return "ModelVersionMismatch";
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::MalformedModel: return "MalformedModel";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorClass error_class(Errc code) {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::InvalidFractions:
    case Errc::MissingModel:
      return ErrorClass::Usage;
    case Errc::NotSymmetric:
    case Errc::NoConvergence:
    case Errc::AllZeroSpectrum:
    case Errc::NonFiniteWeights:
    case Errc::DivergedLoss:
    case Errc::NonFiniteInput:
    case Errc::NoFeasibleWindow:
      return ErrorClass::Numerical;
    default:
      return ErrorClass::Data;
  }
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

void raise(Errc code, const std::string& detail) { throw Error(code, detail); }

}  // namespace bladecm
