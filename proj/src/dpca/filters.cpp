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

#include "bladecm/dpca/filters.hpp"

#include <algorithm>
#include <cmath>

#include "bladecm/error.hpp"

namespace bladecm::dpca {

LowPass::LowPass(double alpha) : alpha_(alpha) {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha < 1.0, Errc::InvalidConfig,
          "low-pass alpha must be in (0, 1)");
}

double LowPass::push(double u) {
  state_ = primed_ ? alpha_ * state_ + (1.0 - alpha_) * u : u;
  primed_ = true;
  return state_;
}

std::vector<double> lowpass(std::span<const double> series, double alpha) {
  LowPass f(alpha);
  std::vector<double> out;
  out.reserve(series.size());
  for (double u : series) out.push_back(f.push(u));
  return out;
}

double quantile_threshold(std::span<const double> values, double pf) {
  require(!values.empty(), Errc::EmptyInput, "quantile of an empty sequence");
  require(std::isfinite(pf) && pf > 0.0 && pf < 1.0, Errc::InvalidConfig, "pf must be in (0, 1)");
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) require(std::isfinite(v), Errc::NonFiniteInput, "non-finite value");
  const auto n = sorted.size();
  // Guard the product against rounding just above an integer.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - pf) * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   sorted.end());
  return sorted[rank - 1];
}

}  // namespace bladecm::dpca
