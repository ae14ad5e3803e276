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

#include "bladecm/core/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bladecm/error.hpp"

namespace bladecm {

DatasetSplit split_dataset(const SignalMatrix& data, double train_fraction,
                           double validation_fraction, double test_fraction) {
  for (double f : {train_fraction, validation_fraction, test_fraction}) {
    require(std::isfinite(f) && f > 0.0, Errc::InvalidFractions, "fractions must be positive");
  }
  require(std::abs(train_fraction + validation_fraction + test_fraction - 1.0) < 1e-9,
          Errc::InvalidFractions, "fractions must sum to one");
  const Index n = data.rows();
  const auto piece = [n](double f) {
    return static_cast<Index>(std::floor(f * static_cast<double>(n) + 1e-9));
  };
  const Index n_val = piece(validation_fraction);
  const Index n_test = piece(test_fraction);
  const Index n_train = n - n_val - n_test;
  require(n_train >= 1 && n_val >= 1 && n_test >= 1, Errc::InsufficientData,
          "too few samples for the requested split");
  return {data.slice(0, n_train), data.slice(n_train, n_val), data.slice(n_train + n_val, n_test)};
}

std::string format_double(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

double parse_field(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (field.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    raise(Errc::MalformedCsv, "line " + std::to_string(line) + ": bad number '" +
                                  std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

SignalMatrix parse_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    auto line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = pos + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  require(!lines.empty(), Errc::MalformedCsv, "line 1: missing header");

  auto header = split_commas(lines[0]);
  require(header.size() >= 2 && header[0] == "t", Errc::MalformedCsv,
          "line 1: header must start with 't' followed by channel names");
  std::vector<std::string> names;
  for (std::size_t i = 1; i < header.size(); ++i) names.emplace_back(header[i]);
  ChannelSet channels;
  try {
    channels = ChannelSet(std::move(names));
  } catch (const Error& e) {
    raise(Errc::MalformedCsv, std::string("line 1: ") + e.what());
  }

  const auto n = static_cast<Index>(lines.size() - 1);
  require(n >= 1, Errc::MalformedCsv, "line 2: no samples");
  const auto m = static_cast<Index>(channels.size());
  Eigen::MatrixXd x(n, m);
  std::vector<double> t(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    const std::size_t line_no = static_cast<std::size_t>(k) + 2;
    auto fields = split_commas(lines[static_cast<std::size_t>(k) + 1]);
    if (static_cast<Index>(fields.size()) != m + 1) {
      raise(Errc::MalformedCsv, "line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(m + 1) + " fields");
    }
    t[static_cast<std::size_t>(k)] = parse_field(fields[0], line_no);
    for (Index c = 0; c < m; ++c) x(k, c) = parse_field(fields[static_cast<std::size_t>(c) + 1], line_no);
  }
  double period = kDefaultSamplePeriod;
  if (n >= 2) {
    period = (t.back() - t.front()) / static_cast<double>(n - 1);
    require(period > 0.0, Errc::MalformedCsv, "line 3: time column must increase");
  }
  return SignalMatrix(std::move(x), std::move(channels), period, t.front());
}

SignalMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string format_csv(const SignalMatrix& data) {
  std::string out = "t";
  for (const auto& name : data.channels().names()) {
    out += ',';
    out += name;
  }
  out += '\n';
  out.reserve(out.size() + static_cast<std::size_t>(data.rows() * data.cols()) * 14);
  for (Index k = 0; k < data.rows(); ++k) {
    out += format_double(data.time(k));
    for (Index c = 0; c < data.cols(); ++c) {
      out += ',';
      out += format_double(data.samples()(k, c));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const SignalMatrix& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), Errc::IoError, "cannot write " + path.string());
  out << format_csv(data);
  require(static_cast<bool>(out), Errc::IoError, "write failed for " + path.string());
}

}  // namespace bladecm
