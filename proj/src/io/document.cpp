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

#include "bladecm/io/document.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bladecm/core/dataset.hpp"
#include "bladecm/error.hpp"

namespace bladecm::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Document Document::parse(std::string_view text, const std::string& origin) {
  Document doc;
  doc.origin_ = origin;
  std::string current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      require(line.back() == ']' && line.size() > 2, Errc::MalformedModel,
              origin + ":" + std::to_string(line_no) + ": bad section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      doc.section(current);
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string_view::npos && eq > 0, Errc::MalformedModel,
            origin + ":" + std::to_string(line_no) + ": expected key = value");
    doc.set(current, trim(line.substr(0, eq)), std::string(trim(line.substr(eq + 1))));
  }
  return doc;
}

Document Document::read(const std::filesystem::path& path) {
  return parse(read_text(path), path.string());
}

std::string Document::format() const {
  std::string out;
  for (const auto& [name, entries] : sections_) {
    if (!name.empty()) {
      if (!out.empty()) out += '\n';
      out += '[' + name + "]\n";
    }
    for (const auto& [k, v] : entries) out += k + " = " + v + '\n';
  }
  return out;
}

void Document::write(const std::filesystem::path& path) const { write_text(path, format()); }

bool Document::has_section(std::string_view name) const {
  for (const auto& s : sections_) {
    if (s.first == name) return true;
  }
  return false;
}

std::optional<std::string> Document::find(std::string_view name, std::string_view key) const {
  for (const auto& s : sections_) {
    if (s.first != name) continue;
    for (const auto& [k, v] : s.second) {
      if (k == key) return v;
    }
  }
  return std::nullopt;
}

const std::string& Document::get(std::string_view name, std::string_view key) const {
  for (const auto& s : sections_) {
    if (s.first != name) continue;
    for (const auto& kv : s.second) {
      if (kv.first == key) return kv.second;
    }
  }
  raise(Errc::MalformedModel, origin_ + ": missing [" + std::string(name) + "] " + std::string(key));
}

void Document::set(std::string_view name, std::string_view key, std::string value) {
  Entries& entries = section(name);
  for (auto& kv : entries) {
    if (kv.first == key) {
      kv.second = std::move(value);
      return;
    }
  }
  entries.emplace_back(std::string(key), std::move(value));
}

Document::Entries& Document::section(std::string_view name) {
  for (auto& s : sections_) {
    if (s.first == name) return s.second;
  }
  sections_.emplace_back(std::string(name), Entries{});
  return sections_.back().second;
}

std::string format_number(double v) { return format_double(v); }

std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc() && ptr == text.data() + text.size(), Errc::MalformedModel,
          "bad number for " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

long long parse_integer(std::string_view text, std::string_view what) {
  text = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  require(ec == std::errc() && ptr == text.data() + text.size(), Errc::MalformedModel,
          "bad integer for " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

namespace {

// Splits on spaces without allocating per token.
class Tokens {
 public:
  explicit Tokens(std::string_view s) : s_(s) {}
  bool next(std::string_view& tok) {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
    if (pos_ >= s_.size()) return false;
    const auto end = std::min(s_.find(' ', pos_), s_.size());
    tok = s_.substr(pos_, end - pos_);
    pos_ = end;
    return true;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_matrix(const Eigen::MatrixXd& m) {
  std::string out = std::to_string(m.rows()) + ' ' + std::to_string(m.cols());
  out.reserve(out.size() + static_cast<std::size_t>(m.size()) * 25);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      out += ' ';
      out += format_exact(m(i, j));
    }
  }
  return out;
}

Eigen::MatrixXd parse_matrix(std::string_view text, std::string_view what) {
  Tokens tokens(text);
  std::string_view tok;
  require(tokens.next(tok), Errc::MalformedModel, "missing shape for " + std::string(what));
  const auto rows = parse_integer(tok, what);
  require(tokens.next(tok), Errc::MalformedModel, "missing shape for " + std::string(what));
  const auto cols = parse_integer(tok, what);
  require(rows >= 0 && cols >= 0, Errc::MalformedModel, "negative shape for " + std::string(what));
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      require(tokens.next(tok), Errc::MalformedModel, "too few values for " + std::string(what));
      m(i, j) = parse_number(tok, what);
    }
  }
  require(!tokens.next(tok), Errc::MalformedModel, "too many values for " + std::string(what));
  return m;
}

std::string format_vector(const Eigen::VectorXd& v) { return format_matrix(v.transpose()); }

Eigen::VectorXd parse_vector(std::string_view text, std::string_view what) {
  const Eigen::MatrixXd m = parse_matrix(text, what);
  require(m.rows() == 1, Errc::MalformedModel, std::string(what) + " is not a vector");
  return m.transpose();
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), Errc::IoError, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(static_cast<bool>(out), Errc::IoError, "write failed for '" + path.string() + "'");
}

}  // namespace bladecm::io
