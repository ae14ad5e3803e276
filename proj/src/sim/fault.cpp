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

#include <cmath>
#include <string>

#include "bladecm/error.hpp"
#include "bladecm/sim/turbine.hpp"

namespace bladecm::sim {

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::FlapBias: return "FlapBias";
    case FaultKind::EdgeBias: return "EdgeBias";
    case FaultKind::FlapStuck: return "FlapStuck";
    case FaultKind::EdgeStuck: return "EdgeStuck";
    case FaultKind::FlapJump: return "FlapJump";
    case FaultKind::FlapExpDrift: return "FlapExpDrift";
  }
  return "?";
}

FaultKind parse_fault_kind(std::string_view text) {
  for (FaultKind k : kAllFaultKinds) {
    if (to_string(k) == text) return k;
  }
  raise(Errc::InvalidConfig, "unknown fault kind '" + std::string(text) + "'");
}

FaultSpec FaultSpec::defaults(FaultKind kind, int blade, double time) {
  FaultSpec f;
  f.kind = kind;
  f.blade = blade;
  f.time = time;
  switch (kind) {
    case FaultKind::FlapBias:
    case FaultKind::EdgeBias: f.magnitude = 1.0e6; break;
    case FaultKind::FlapStuck:
    case FaultKind::EdgeStuck: f.magnitude = 0.8; break;
    case FaultKind::FlapJump: f.magnitude = 2.0e6; break;
    case FaultKind::FlapExpDrift:
      f.magnitude = 1.0e6;
      f.time_constant = 60.0;
      break;
  }
  return f;
}

std::string FaultSpec::channel() const {
  const bool edge = kind == FaultKind::EdgeBias || kind == FaultKind::EdgeStuck;
  return (edge ? "edge" : "flap") + std::to_string(blade);
}

void FaultSpec::validate() const {
  require(blade >= 1 && blade <= 3, Errc::InvalidConfig, "blade index must be 1, 2 or 3");
  require(std::isfinite(time) && time > 0.0, Errc::InvalidConfig, "fault time must be positive");
  require(std::isfinite(magnitude) && magnitude >= 0.0, Errc::InvalidConfig,
          "fault magnitude must be non-negative");
  require(kind != FaultKind::FlapExpDrift || (std::isfinite(time_constant) && time_constant > 0.0),
          Errc::InvalidConfig, "drift time constant must be positive");
}

SignalMatrix inject_fault(const SignalMatrix& data, const FaultSpec& fault) {
  fault.validate();
  const auto col_idx = data.channels().index_of(fault.channel());
  require(col_idx.has_value(), Errc::UnknownChannel, "channel '" + fault.channel() + "' not present");
  const auto col = static_cast<Index>(*col_idx);
  const double end_time = data.time(data.rows() - 1);
  require(fault.time <= end_time, Errc::FaultAfterEnd, "fault time is past the end of the run");
  const Index kf = data.index_at_or_after(fault.time);

  Eigen::MatrixXd x = data.samples();
  switch (fault.kind) {
    case FaultKind::FlapBias:
    case FaultKind::EdgeBias:
    case FaultKind::FlapJump:
      x.col(col).tail(x.rows() - kf).array() += fault.magnitude;
      break;
    case FaultKind::FlapStuck:
    case FaultKind::EdgeStuck:
      x.col(col).tail(x.rows() - kf).setConstant(fault.magnitude * data.samples()(kf, col));
      break;
    case FaultKind::FlapExpDrift:
      for (Index k = kf; k < x.rows(); ++k) {
        const double elapsed = data.time(k) - fault.time;
        x(k, col) += fault.magnitude * (1.0 - std::exp(-elapsed / fault.time_constant));
      }
      break;
  }
  return SignalMatrix(std::move(x), data.channels(), data.sample_period(), data.start_time());
}

LabeledRun inject_fault(const LabeledRun& run, const FaultSpec& fault) {
  return {inject_fault(run.data, fault), run.regions, fault};
}

}  // namespace bladecm::sim
