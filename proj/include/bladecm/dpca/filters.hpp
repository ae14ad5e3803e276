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

#include <span>
#include <vector>

namespace bladecm::dpca {

// First-order IIR low-pass: y(0) = u(0), y(k) = alpha*y(k-1) + (1-alpha)*u(k).
std::vector<double> lowpass(std::span<const double> series, double alpha);

// Streaming form of lowpass().
class LowPass {
 public:
  explicit LowPass(double alpha);
  double push(double u);
  void reset() { primed_ = false; }

 private:
  double alpha_;
  double state_ = 0.0;
  bool primed_ = false;
};

// Nearest-rank (1 - pf) quantile: the ceil((1 - pf) * N)-th smallest value.
double quantile_threshold(std::span<const double> values, double pf);

}  // namespace bladecm::dpca
