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

#include "bladecm/core/signal.hpp"

namespace bladecm {

// Time-window embedding of a normalized series. Row k holds the samples
// x(k) ... x(k+window-1), oldest first, each sample contributing its m
// channels in channel order.
struct EmbeddedMatrix {
  Eigen::MatrixXd rows;
  Index window = 0;
  Index channels = 0;
};

EmbeddedMatrix embed_window(const SignalMatrix& normalized, Index window);

// Rows of the embedded matrix for the windows ending at samples
// first_end, first_end + hop, ... (count windows) of `samples`.
Eigen::MatrixXd embed_rows(const Eigen::MatrixXd& samples, Index window, Index first_end,
                           Index count, Index hop = 1);

// Same windows laid out one per column, i.e. the transpose of embed_rows.
Eigen::MatrixXd embed_columns(const Eigen::MatrixXd& samples, Index window, Index first_end,
                              Index count, Index hop = 1);

}  // namespace bladecm
