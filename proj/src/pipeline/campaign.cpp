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

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "bladecm/core/dataset.hpp"
#include "bladecm/error.hpp"
#include "bladecm/io/document.hpp"
#include "bladecm/pipeline/pipeline.hpp"

namespace bladecm::pipeline {

namespace {

struct Evaluated {
  std::string method;
  std::string detector;
  glr::DetectionTrace trace;
  Index flagged = 0;
  Index valid = 0;
};

std::vector<Evaluated> evaluate(const PipelineConfig& cfg, const ModelSet& models,
                                const SignalMatrix& run, std::span<const Region> labels,
                                std::optional<Index> fault_index) {
  std::vector<Evaluated> out;
  auto add = [&](const char* method, const StatisticTrace& s, const std::optional<glr::GlrConfig>& g) {
    if (uses(cfg.detector, Detector::Static)) {
      Evaluated e{method, "static", glr::detect(s.filtered, s.threshold, s.valid, fault_index)};
      out.push_back(std::move(e));
    }
    if (uses(cfg.detector, Detector::Glr)) {
      require(g.has_value(), Errc::MissingModel,
              std::string(method) + " model carries no GLR settings");
      const std::vector<double> stat = glr_trace(s, g->window);
      const std::vector<double> h(stat.size(), g->threshold);
      out.push_back(Evaluated{method, "glr", glr::detect(stat, h, s.valid, fault_index)});
    }
  };
  if (uses(cfg.method, Method::Dpca)) {
    require(models.dpca.size() == kMonitoredRegions.size(), Errc::MissingModel,
            "dPCA monitoring needs models for regions II-V");
    const StatisticTrace s = dpca_statistic(models.dpca, run, labels);
    add("dpca", s, models.dpca.begin()->second.glr);
  }
  if (uses(cfg.method, Method::Ae)) {
    require(models.ae.has_value(), Errc::MissingModel, "no autoencoder model");
    add("ae", ae_statistic(*models.ae, run, labels), models.ae->glr);
  }
  for (auto& e : out) {
    for (std::size_t k = 0; k < e.trace.valid.size(); ++k) {
      if (!e.trace.valid[k]) continue;
      ++e.valid;
      if (e.trace.statistic[k] > e.trace.threshold[k]) ++e.flagged;
    }
  }
  return out;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

MonitorResult monitor_online(const PipelineConfig& cfg, const ModelSet& models,
                             const SignalMatrix& run, std::optional<double> fault_time) {
  MonitorResult result;
  result.sample_period = run.sample_period();
  result.start_time = run.start_time();
  Index window = 0;
  if (uses(cfg.method, Method::Dpca) && !models.dpca.empty()) window = models.dpca.begin()->second.window;
  if (uses(cfg.method, Method::Ae) && models.ae) window = std::max(window, models.ae->window);
  if (run.rows() < window) {
    result.warnings.push_back("run has " + std::to_string(run.rows()) +
                              " samples, fewer than the model window of " + std::to_string(window) +
                              "; no statistic is produced");
  }
  std::optional<Index> fault_index;
  if (fault_time) fault_index = run.index_at_or_after(*fault_time);
  const std::vector<Region> labels = segment_regions(run, cfg.bounds);
  for (auto& e : evaluate(cfg, models, run, labels, fault_index)) {
    result.detectors.push_back(
        DetectorSummary{std::move(e.method), std::move(e.detector), std::move(e.trace), e.flagged, e.valid});
  }
  return result;
}

std::string summary_json(const MonitorResult& result) {
  nlohmann::ordered_json doc;
  doc["warnings"] = result.warnings;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& d : result.detectors) {
    nlohmann::ordered_json j;
    j["method"] = d.method;
    j["detector"] = d.detector;
    j["first_alarm_time"] = d.trace.first_alarm
                                ? nlohmann::ordered_json(result.start_time +
                                                         static_cast<double>(*d.trace.first_alarm) *
                                                             result.sample_period)
                                : nlohmann::ordered_json(nullptr);
    j["alarm_count"] = d.trace.alarms.size();
    j["valid_samples"] = d.valid_samples;
    j["flagged_samples"] = d.flagged_samples;
    j["flagged_fraction"] =
        d.valid_samples > 0
            ? static_cast<double>(d.flagged_samples) / static_cast<double>(d.valid_samples)
            : 0.0;
    if (d.trace.fault_index) {
      j["false_alarm"] = d.trace.false_alarm;
      j["detected"] = d.trace.detected;
      j["strongly_detected"] = d.trace.strongly_detected;
    }
    list.push_back(std::move(j));
  }
  doc["detectors"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_monitor_outputs(const MonitorResult& result,
                                                         const std::filesystem::path& dir,
                                                         const std::string& prefix) {
  std::vector<std::filesystem::path> written;
  for (const auto& d : result.detectors) {
    std::string csv = "t,g,h,alarm_flag\n";
    const auto& tr = d.trace;
    for (std::size_t k = 0; k < tr.statistic.size(); ++k) {
      if (!tr.valid[k]) continue;
      const double t = result.start_time + static_cast<double>(k) * result.sample_period;
      csv += format_double(t) + ',' + format_double(tr.statistic[k]) + ',' +
             format_double(tr.threshold[k]) + ',' + (tr.statistic[k] > tr.threshold[k] ? "1" : "0") +
             '\n';
    }
    const auto path = dir / (prefix + "_" + d.method + "_" + d.detector + ".csv");
    io::write_text(path, csv);
    written.push_back(path);
  }
  const auto path = dir / (prefix + "_summary.json");
  io::write_text(path, summary_json(result));
  written.push_back(path);
  return written;
}

double CampaignResult::mean_delay() const {
  return detections > 0 ? delay_sum / static_cast<double>(detections) : 0.0;
}

double CampaignResult::rate(Index count) const {
  return trials > 0 ? static_cast<double>(count) / static_cast<double>(trials) : 0.0;
}

std::vector<CampaignResult> run_campaign(const PipelineConfig& cfg, const ModelSet& models) {
  cfg.validate();
  struct Scenario {
    std::string name;
    std::optional<sim::FaultSpec> fault;
  };
  std::vector<Scenario> scenarios;
  for (sim::FaultKind kind : cfg.campaign.faults) {
    scenarios.push_back({std::string(sim::to_string(kind)),
                         sim::FaultSpec::defaults(kind, cfg.campaign.blade, cfg.campaign.fault_time)});
  }
  if (cfg.campaign.include_healthy) scenarios.push_back({"none", std::nullopt});
  require(!scenarios.empty(), Errc::InvalidConfig, "campaign has no scenarios");

  const std::vector<Region> alloc = allocate_trials(models.dwell, cfg.campaign.trials);
  std::vector<CampaignResult> results;
  auto slot = [&](std::size_t s, const Evaluated& e) -> CampaignResult& {
    for (auto& r : results) {
      if (r.scenario == scenarios[s].name && r.method == e.method && r.detector == e.detector) return r;
    }
    results.push_back(CampaignResult{scenarios[s].name, e.method, e.detector});
    return results.back();
  };
  // Reserve rows in the fixed scenario/method/detector order.
  results.reserve(scenarios.size() * 4);

  for (std::size_t t = 0; t < alloc.size(); ++t) {
    const sim::LabeledRun healthy = sim::generate_healthy(
        operating_run(cfg, alloc[t], cfg.campaign.run_length,
                      derive_seed(cfg.seed, kCampaignStream, t)),
        cfg.bounds);
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      const SignalMatrix run =
          scenarios[s].fault ? sim::inject_fault(healthy.data, *scenarios[s].fault) : healthy.data;
      std::optional<Index> fault_index;
      if (scenarios[s].fault) fault_index = run.index_at_or_after(scenarios[s].fault->time);
      for (const Evaluated& e : evaluate(cfg, models, run, healthy.regions, fault_index)) {
        CampaignResult& r = slot(s, e);
        ++r.trials;
        if (e.trace.false_alarm) ++r.false_alarms;
        if (fault_index && e.trace.detected) {
          ++r.detections;
          if (e.trace.strongly_detected) ++r.strong_detections;
          else ++r.weak_detections;
          r.delay_sum += static_cast<double>(*e.trace.first_detection() - *fault_index) *
                         run.sample_period();
        }
      }
    }
  }
  return results;
}

namespace {
constexpr const char* kReportHeader =
    "scenario,method,detector,trials,false_alarms,detections,strong_detections,weak_detections,"
    "false_alarm_rate,detection_rate,strong_detection_rate,weak_detection_rate,mean_delay_s";
}

std::string report_csv(const std::vector<CampaignResult>& results) {
  std::string out = std::string(kReportHeader) + "\n";
  for (const auto& r : results) {
    out += r.scenario + ',' + r.method + ',' + r.detector + ',' + std::to_string(r.trials) + ',' +
           std::to_string(r.false_alarms) + ',' + std::to_string(r.detections) + ',' +
           std::to_string(r.strong_detections) + ',' + std::to_string(r.weak_detections) + ',' +
           fixed6(r.rate(r.false_alarms)) + ',' + fixed6(r.rate(r.detections)) + ',' +
           fixed6(r.rate(r.strong_detections)) + ',' + fixed6(r.rate(r.weak_detections)) + ',' +
           fixed6(r.mean_delay()) + '\n';
  }
  return out;
}

std::string report_json(const std::vector<CampaignResult>& results) {
  std::string out = "{\n  \"results\": [";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"scenario\": " + json_string(r.scenario) + ", \"method\": " + json_string(r.method) +
           ", \"detector\": " + json_string(r.detector) + ", \"trials\": " + std::to_string(r.trials) +
           ", \"false_alarms\": " + std::to_string(r.false_alarms) +
           ", \"detections\": " + std::to_string(r.detections) +
           ", \"strong_detections\": " + std::to_string(r.strong_detections) +
           ", \"weak_detections\": " + std::to_string(r.weak_detections) +
           ", \"false_alarm_rate\": " + fixed6(r.rate(r.false_alarms)) +
           ", \"detection_rate\": " + fixed6(r.rate(r.detections)) +
           ", \"strong_detection_rate\": " + fixed6(r.rate(r.strong_detections)) +
           ", \"weak_detection_rate\": " + fixed6(r.rate(r.weak_detections)) +
           ", \"mean_delay_s\": " + fixed6(r.mean_delay()) + "}";
  }
  out += results.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

std::vector<std::filesystem::path> emit_report(const std::vector<CampaignResult>& results,
                                               const std::filesystem::path& dir) {
  require(!results.empty(), Errc::EmptyInput, "no campaign results to report");
  const auto csv = dir / "campaign.csv";
  const auto json = dir / "campaign.json";
  io::write_text(csv, report_csv(results));
  io::write_text(json, report_json(results));
  return {csv, json};
}

std::vector<CampaignResult> parse_report_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == kReportHeader, Errc::MalformedCsv,
          "line 1: not a campaign report header");
  std::vector<CampaignResult> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    require(f.size() == 13, Errc::MalformedCsv, "line " + std::to_string(line_no) + ": expected 13 fields");
    try {
      CampaignResult r{f[0], f[1], f[2], std::stoll(f[3]), std::stoll(f[4]), std::stoll(f[5]),
                       std::stoll(f[6]), std::stoll(f[7])};
      r.delay_sum = std::stod(f[12]) * static_cast<double>(r.detections);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      raise(Errc::MalformedCsv, "line " + std::to_string(line_no) + ": bad number");
    }
  }
  return out;
}

}  // namespace bladecm::pipeline
