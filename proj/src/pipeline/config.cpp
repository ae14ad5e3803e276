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

#include <charconv>
#include <cmath>

#include "bladecm/error.hpp"
#include "bladecm/pipeline/pipeline.hpp"

namespace bladecm::pipeline {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    const auto item = trim(s.substr(pos, comma - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

std::string where(std::string_view section, std::string_view key) {
  return section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
}

double to_double(std::string_view section, std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  require(ec == std::errc() && ptr == v.data() + v.size() && std::isfinite(out),
          Errc::InvalidConfig, where(section, key) + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

long long to_int(std::string_view section, std::string_view key, std::string_view v) {
  v = trim(v);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  require(ec == std::errc() && ptr == v.data() + v.size(), Errc::InvalidConfig,
          where(section, key) + ": expected an integer, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_seed(std::string_view section, std::string_view key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  require(ec == std::errc() && ptr == v.data() + v.size(), Errc::InvalidConfig,
          where(section, key) + ": expected an unsigned integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view section, std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  raise(Errc::InvalidConfig, where(section, key) + ": expected true or false");
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Dpca: return "dpca";
    case Method::Ae: return "ae";
    case Method::Both: return "both";
  }
  return "?";
}

std::string_view to_string(Detector d) {
  switch (d) {
    case Detector::Static: return "static";
    case Detector::Glr: return "glr";
    case Detector::Both: return "both";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "dpca" || text == "pca") return Method::Dpca;
  if (text == "ae") return Method::Ae;
  if (text == "both") return Method::Both;
  raise(Errc::InvalidConfig, "method must be dpca, ae or both, got '" + std::string(text) + "'");
}

Detector parse_detector(std::string_view text) {
  if (text == "static") return Detector::Static;
  if (text == "glr") return Detector::Glr;
  if (text == "both") return Detector::Both;
  raise(Errc::InvalidConfig, "detector must be static, glr or both, got '" + std::string(text) + "'");
}

sim::FaultSpec FaultChoice::spec(int blade, double time) const {
  sim::FaultSpec f = sim::FaultSpec::defaults(kind, blade, time);
  if (magnitude) f.magnitude = *magnitude;
  if (time_constant) f.time_constant = *time_constant;
  f.validate();
  return f;
}

bool uses(Method selected, Method one) { return selected == Method::Both || selected == one; }
bool uses(Detector selected, Detector one) { return selected == Detector::Both || selected == one; }

sim::SimConfig PipelineConfig::default_training_sim() {
  sim::SimConfig s;
  s.duration = 900.0;
  return s;
}

void PipelineConfig::validate() const {
  sim.validate();
  bounds.validate();
  require(pca.window >= 1, Errc::InvalidConfig, "pca.window must be positive");
  require(pca.cv_target > 0.0 && pca.cv_target <= 1.0, Errc::InvalidConfig,
          "pca.cv_target must be in (0, 1]");
  require(pca.pf > 0.0 && pca.pf < 1.0, Errc::InvalidConfig, "pca.pf must be in (0, 1)");
  require(pca.lpf_alpha > 0.0 && pca.lpf_alpha < 1.0, Errc::InvalidConfig,
          "pca.lpf_alpha must be in (0, 1)");
  ae.validate();
  require(training_runs >= 1, Errc::InvalidConfig, "sim.runs must be at least 1");
  require(glr.pf > 0.0 && glr.pf < 1.0 && glr.pd > 0.0 && glr.pd < 1.0, Errc::InvalidConfig,
          "glr.pf and glr.pd must be in (0, 1)");
  require(glr.initial_window >= 1 && glr.calibration_runs >= 1, Errc::InvalidConfig,
          "glr.initial_window and glr.calibration_runs must be positive");
  require(glr.onset > 0.0 && glr.onset < campaign.run_length, Errc::InvalidConfig,
          "glr.onset must lie inside the run");
  require(campaign.trials >= 1, Errc::InvalidConfig, "campaign.trials must be at least 1");
  require(campaign.run_length > 0.0 && campaign.fault_time > 0.0 &&
              campaign.fault_time < campaign.run_length,
          Errc::InvalidConfig, "campaign.fault_time must lie inside the run");
  require(campaign.blade >= 1 && campaign.blade <= 3, Errc::InvalidConfig,
          "campaign.blade must be 1, 2 or 3");
  for (Region r : kMonitoredRegions) {
    require(campaign.operating_wind.contains(r), Errc::InvalidConfig,
            "no operating wind for region " + std::string(bladecm::to_string(r)));
  }
}

void set_option(PipelineConfig& cfg, std::string_view section, std::string_view key,
                std::string_view value) {
  value = trim(value);
  auto num = [&] { return to_double(section, key, value); };
  auto integer = [&] { return to_int(section, key, value); };
  auto unknown = [&] { raise(Errc::InvalidConfig, "unknown option '" + where(section, key) + "'"); };

  if (section.empty() || section == "run") {
    if (key == "method") cfg.method = parse_method(value);
    else if (key == "detector") cfg.detector = parse_detector(value);
    else if (key == "seed") cfg.seed = to_seed(section, key, value);
    else unknown();
  } else if (section == "paths") {
    if (key == "data") cfg.data = std::string(value);
    else if (key == "models") cfg.models = std::string(value);
    else if (key == "reports") cfg.reports = std::string(value);
    else unknown();
  } else if (section == "sim") {
    auto& s = cfg.sim;
    if (key == "duration") s.duration = num();
    else if (key == "runs") cfg.training_runs = integer();
    else if (key == "turbulence_intensity") s.turbulence_intensity = num();
    else if (key == "turbulence_time_constant") s.turbulence_time_constant = num();
    else if (key == "sample_period") s.sample_period = num();
    else if (key == "mean_wind") s.mean_wind = num();
    else if (key == "ramp_end_wind") s.ramp_end_wind = num();
    else if (key == "schedule_dwell") s.schedule_dwell = num();
    else if (key == "wind_schedule") {
      s.wind_schedule.clear();
      for (const auto& item : split_list(value)) s.wind_schedule.push_back(to_double(section, key, item));
    } else unknown();
  } else if (section == "regions") {
    if (key == "wind_breakpoints") {
      const auto items = split_list(value);
      require(items.size() == 4, Errc::InvalidConfig, "regions.wind_breakpoints needs 4 values");
      for (std::size_t i = 0; i < 4; ++i) cfg.bounds.wind_breakpoints[i] = to_double(section, key, items[i]);
    } else if (key == "min_dwell") cfg.bounds.min_dwell = integer();
    else if (key == "wind_average_window") cfg.bounds.wind_average_window = num();
    else if (key == "idle_power_fraction") cfg.bounds.idle_power_fraction = num();
    else if (key == "full_load_power_fraction") cfg.bounds.full_load_power_fraction = num();
    else unknown();
  } else if (section == "split") {
    if (key == "train") cfg.train_fraction = num();
    else if (key == "validation") cfg.val_fraction = num();
    else if (key == "test") cfg.test_fraction = num();
    else unknown();
  } else if (section == "pca") {
    if (key == "window") cfg.pca.window = integer();
    else if (key == "cv_target") cfg.pca.cv_target = num();
    else if (key == "pf") cfg.pca.pf = num();
    else if (key == "lpf_alpha") cfg.pca.lpf_alpha = num();
    else unknown();
  } else if (section == "ae") {
    if (key == "window") cfg.ae.window = integer();
    else if (key == "epochs") cfg.ae.epochs = static_cast<int>(integer());
    else if (key == "batch_size") cfg.ae.batch_size = integer();
    else if (key == "learning_rate") cfg.ae.learning_rate = num();
    else if (key == "train_hop") cfg.ae.train_hop = integer();
    else if (key == "pf") cfg.ae.pf = num();
    else if (key == "lpf_alpha") cfg.ae.lpf_alpha = num();
    else unknown();
  } else if (section == "glr") {
    if (key == "pf") cfg.glr.pf = num();
    else if (key == "pd") cfg.glr.pd = num();
    else if (key == "initial_window") cfg.glr.initial_window = integer();
    else if (key == "calibration_runs") cfg.glr.calibration_runs = integer();
    else if (key == "onset") cfg.glr.onset = num();
    else unknown();
  } else if (section == "campaign") {
    auto& c = cfg.campaign;
    if (key == "trials") c.trials = integer();
    else if (key == "run_length") c.run_length = num();
    else if (key == "fault_time") c.fault_time = num();
    else if (key == "blade") c.blade = static_cast<int>(integer());
    else if (key == "include_healthy") c.include_healthy = to_bool(section, key, value);
    else if (key == "faults") {
      c.faults.clear();
      for (const auto& item : split_list(value)) {
        if (item == "none") c.include_healthy = true;
        else if (item == "all") c.faults.assign(sim::kAllFaultKinds.begin(), sim::kAllFaultKinds.end());
        else c.faults.push_back(sim::parse_fault_kind(item));
      }
    } else if (key.starts_with("wind_")) {
      c.operating_wind[parse_region(key.substr(5))] = num();
    } else unknown();
  } else if (section == "fault") {
    auto& f = cfg.fault;
    if (key == "kind") f.kind = sim::parse_fault_kind(value);
    else if (key == "magnitude") f.magnitude = num();
    else if (key == "time_constant") f.time_constant = num();
    else unknown();
  } else {
    raise(Errc::InvalidConfig, "unknown config section [" + std::string(section) + "]");
  }
}

void apply_config(PipelineConfig& cfg, const io::Document& doc) {
  for (const auto& [section, entries] : doc.sections()) {
    for (const auto& [key, value] : entries) set_option(cfg, section, key, value);
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  io::Document doc;
  try {
    doc = io::Document::read(path);
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedModel) raise(Errc::InvalidConfig, e.what());
    throw;
  }
  apply_config(cfg, doc);
  return cfg;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return mix(mix(mix(master) ^ stream) ^ index);
}

}  // namespace bladecm::pipeline
