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

#include "bladecm/ae/model.hpp"
#include "bladecm/dpca/dpca.hpp"
#include "bladecm/io/document.hpp"

namespace bladecm::io {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "bladecm-model";

// Model files are Documents with format/version/type in the unnamed
// section. Arrays are row-major with 17 significant digits, so a load
// reproduces every stored double exactly. Loading throws
// ModelVersionMismatch for another version and MalformedModel otherwise.
Document to_document(const dpca::DpcaModel& model);
Document to_document(const ae::AeModel& model);
dpca::DpcaModel dpca_from_document(const Document& doc);
ae::AeModel ae_from_document(const Document& doc);

void save_model(const dpca::DpcaModel& model, const std::filesystem::path& path);
void save_model(const ae::AeModel& model, const std::filesystem::path& path);
dpca::DpcaModel load_dpca_model(const std::filesystem::path& path);
ae::AeModel load_ae_model(const std::filesystem::path& path);

// "dpca" or "ae" as recorded in the file.
std::string model_type(const std::filesystem::path& path);

std::string format_train_report(const ae::TrainReport& report);

}  // namespace bladecm::io
