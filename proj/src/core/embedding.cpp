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

#include "bladecm/core/embedding.hpp"

#include "bladecm/error.hpp"

namespace bladecm {

namespace {

void check_range(const Eigen::MatrixXd& samples, Index window, Index first_end, Index count,
                 Index hop) {
  require(window >= 1, Errc::InvalidConfig, "window must be positive");
  require(window <= samples.rows(), Errc::WindowTooLong,
          "window " + std::to_string(window) + " exceeds " + std::to_string(samples.rows()) +
              " samples");
  require(hop >= 1 && count >= 0 && first_end >= window - 1 &&
              (count == 0 || first_end + (count - 1) * hop < samples.rows()),
          Errc::DimensionMismatch, "window range out of bounds");
}

}  // namespace

Eigen::MatrixXd embed_columns(const Eigen::MatrixXd& samples, Index window, Index first_end,
                              Index count, Index hop) {
  check_range(samples, window, first_end, count, hop);
  const Index m = samples.cols();
  Eigen::MatrixXd out(m * window, count);
  for (Index j = 0; j < count; ++j) {
    const Index start = first_end + j * hop - window + 1;
    for (Index tau = 0; tau < window; ++tau) {
      out.col(j).segment(tau * m, m) = samples.row(start + tau).transpose();
    }
  }
  return out;
}

Eigen::MatrixXd embed_rows(const Eigen::MatrixXd& samples, Index window, Index first_end,
                           Index count, Index hop) {
  check_range(samples, window, first_end, count, hop);
  const Index m = samples.cols();
  Eigen::MatrixXd out(count, m * window);
  for (Index tau = 0; tau < window; ++tau) {
    for (Index j = 0; j < count; ++j) {
      out.row(j).segment(tau * m, m) = samples.row(first_end + j * hop - window + 1 + tau);
    }
  }
  return out;
}

EmbeddedMatrix embed_window(const SignalMatrix& normalized, Index window) {
  require(window >= 1, Errc::InvalidConfig, "window must be positive");
  require(window <= normalized.rows(), Errc::WindowTooLong,
          "window " + std::to_string(window) + " exceeds " + std::to_string(normalized.rows()) +
              " samples");
  const Index count = normalized.rows() - window + 1;
  return {embed_rows(normalized.samples(), window, window - 1, count), window, normalized.cols()};
}

}  // namespace bladecm
