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

#include <filesystem>

#include "bladecm/core/signal.hpp"

namespace bladecm {

struct DatasetSplit {
  SignalMatrix train;
  SignalMatrix validation;
  SignalMatrix test;
};

// Chronological split. Each piece gets floor(fraction * n) samples and the
// rounding remainder goes to the training piece.
DatasetSplit split_dataset(const SignalMatrix& data, double train_fraction,
                           double validation_fraction, double test_fraction);

// Telemetry CSV: header "t,<channel>,...", one row per sample, LF endings.
// The sample period and start time are recovered from the t column.
SignalMatrix read_csv(const std::filesystem::path& path);
SignalMatrix parse_csv(std::string_view text);
void write_csv(const SignalMatrix& data, const std::filesystem::path& path);
std::string format_csv(const SignalMatrix& data);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace bladecm
