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

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bladecm::io {

// Line-oriented "key = value" text grouped under "[section]" headers.
// Keys before the first header belong to the unnamed section "". Blank
// lines and lines starting with '#' or ';' are ignored. Order is kept so
// that writing is reproducible.
class Document {
 public:
  using Entries = std::vector<std::pair<std::string, std::string>>;

  static Document parse(std::string_view text, const std::string& origin = "<text>");
  static Document read(const std::filesystem::path& path);

  std::string format() const;
  void write(const std::filesystem::path& path) const;

  bool has_section(std::string_view section) const;
  std::optional<std::string> find(std::string_view section, std::string_view key) const;
  // Throws MalformedModel naming the missing key.
  const std::string& get(std::string_view section, std::string_view key) const;
  void set(std::string_view section, std::string_view key, std::string value);
  const std::vector<std::pair<std::string, Entries>>& sections() const { return sections_; }
  const std::string& origin() const { return origin_; }

 private:
  Entries& section(std::string_view name);
  std::vector<std::pair<std::string, Entries>> sections_;
  std::string origin_ = "<document>";
};

// Shortest text that parses back to the same double.
std::string format_number(double v);
// "%.17g", used for stored model arrays.
std::string format_exact(double v);
double parse_number(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

// "rows cols v00 v01 ... " in row-major order.
std::string format_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd parse_matrix(std::string_view text, std::string_view what);
std::string format_vector(const Eigen::VectorXd& v);
Eigen::VectorXd parse_vector(std::string_view text, std::string_view what);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace bladecm::io
