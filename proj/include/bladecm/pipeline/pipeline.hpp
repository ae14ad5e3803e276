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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bladecm/ae/model.hpp"
#include "bladecm/dpca/dpca.hpp"
#include "bladecm/glr/glr.hpp"
#include "bladecm/io/document.hpp"
#include "bladecm/sim/turbine.hpp"

namespace bladecm::pipeline {

enum class Method { Dpca, Ae, Both };
enum class Detector { Static, Glr, Both };

std::string_view to_string(Method m);
std::string_view to_string(Detector d);
Method parse_method(std::string_view text);
Detector parse_detector(std::string_view text);
bool uses(Method selected, Method one);
bool uses(Detector selected, Detector one);

struct GlrDesign {
  double pf = 0.01;
  double pd = 0.99;
  Index initial_window = 100;
  Index calibration_runs = 1000;
  double onset = 300.0;  // seconds into each calibration run
};

struct CampaignConfig {
  Index trials = 100;
  double run_length = 900.0;
  double fault_time = 300.0;
  int blade = 1;
  std::vector<sim::FaultKind> faults{sim::kAllFaultKinds.begin(), sim::kAllFaultKinds.end()};
  bool include_healthy = false;
  // Mean wind of the constant-wind runs for each monitored region.
  std::map<Region, double> operating_wind{
      {Region::II, 5.0}, {Region::III, 9.0}, {Region::IV, 12.0}, {Region::V, 17.0}};
};

// Fault for the inject command; unset fields take the per-kind defaults.
struct FaultChoice {
  sim::FaultKind kind = sim::FaultKind::FlapBias;
  std::optional<double> magnitude;
  std::optional<double> time_constant;

  sim::FaultSpec spec(int blade, double time) const;
};

struct PipelineConfig {
  std::filesystem::path data;  // healthy training CSV; generated when empty
  std::filesystem::path models = "models";
  std::filesystem::path reports = "reports";
  Method method = Method::Both;
  Detector detector = Detector::Both;
  std::uint64_t seed = 1;

  // Template for every simulated run. Without a data file the healthy
  // training set is `training_runs` constant-wind runs of sim.duration
  // seconds, cycling through the operating points of regions II-V.
  sim::SimConfig sim = default_training_sim();
  Index training_runs = 20;
  RegionBoundaries bounds;
  double train_fraction = 0.7;
  double val_fraction = 0.15;
  double test_fraction = 0.15;

  dpca::DpcaOptions pca;
  ae::AeOptions ae;
  GlrDesign glr;
  CampaignConfig campaign;
  FaultChoice fault;

  static sim::SimConfig default_training_sim();
  void validate() const;
};

// Applies [paths] [run] [sim] [regions] [pca] [ae] [glr] [campaign] [fault] keys on
// top of `cfg`. Unknown sections or keys are InvalidConfig.
void apply_config(PipelineConfig& cfg, const io::Document& doc);
PipelineConfig load_config(const std::filesystem::path& path);
void set_option(PipelineConfig& cfg, std::string_view section, std::string_view key,
                std::string_view value);

// Seed of stream `stream`, item `index` below a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

enum SeedStream : std::uint64_t { kCalibrationStream = 1, kCampaignStream = 2, kTrainingStream = 3 };

struct ModelSet {
  dpca::DpcaModelSet dpca;
  std::optional<ae::AeModel> ae;
  std::optional<ae::TrainReport> ae_report;
  std::map<Region, Index> dwell;  // training samples per monitored region
};

// Per-sample statistic of one method on one run, standardized for the GLR.
struct StatisticTrace {
  std::vector<double> filtered;
  std::vector<double> threshold;  // static threshold at each sample
  std::vector<std::uint8_t> valid;
  std::vector<double> z;          // (filtered - mu0) / sigma of the active model
  std::vector<double> shift;      // mu0 / sigma of the active model
};

StatisticTrace dpca_statistic(const dpca::DpcaModelSet& models, const SignalMatrix& run,
                              std::span<const Region> labels);
// Region labels select the per-region healthy level when the model has one.
StatisticTrace ae_statistic(const ae::AeModel& model, const SignalMatrix& run,
                            std::span<const Region> labels);

// GLR on the valid samples of the standardized stream; zero elsewhere.
std::vector<double> glr_trace(const StatisticTrace& s, Index window);

// Trial allocation over regions II-V, proportional to dwell, by largest
// remainder (ties to the lower region).
std::vector<Region> allocate_trials(const std::map<Region, Index>& dwell, Index trials);

// Constant-wind run for a monitored region.
sim::SimConfig operating_run(const PipelineConfig& cfg, Region region, double duration,
                             std::uint64_t seed);

// Offline stage: fits the selected models, estimates H0 statistics on the
// validation split and calibrates the GLR on simulated healthy runs.
ModelSet train_offline(const PipelineConfig& cfg);
// Each healthy run is split chronologically by the configured fractions;
// the train and validation pieces of all runs are pooled.
ModelSet train_offline(const PipelineConfig& cfg, std::span<const sim::LabeledRun> healthy);
std::vector<sim::LabeledRun> generate_training_runs(const PipelineConfig& cfg);

// Model files under cfg.models: dpca_region_<R>.model, ae.model and
// regions.model (training dwell); train report under cfg.reports.
std::vector<std::filesystem::path> save_models(const ModelSet& models, const PipelineConfig& cfg);
ModelSet load_models(const PipelineConfig& cfg);

struct DetectorSummary {
  std::string method;
  std::string detector;
  glr::DetectionTrace trace;
  Index flagged_samples = 0;
  Index valid_samples = 0;
};

struct MonitorResult {
  std::vector<DetectorSummary> detectors;
  std::vector<std::string> warnings;
  double sample_period = 0.1;
  double start_time = 0.0;
};

MonitorResult monitor_online(const PipelineConfig& cfg, const ModelSet& models,
                             const SignalMatrix& run, std::optional<double> fault_time = {});
// Writes <prefix>_<method>_<detector>.csv traces and <prefix>_summary.json.
std::vector<std::filesystem::path> write_monitor_outputs(const MonitorResult& result,
                                                         const std::filesystem::path& dir,
                                                         const std::string& prefix);
std::string summary_json(const MonitorResult& result);

struct CampaignResult {
  std::string scenario;
  std::string method;
  std::string detector;
  Index trials = 0;
  Index false_alarms = 0;
  Index detections = 0;
  Index strong_detections = 0;
  Index weak_detections = 0;
  double delay_sum = 0.0;  // seconds, over detected trials

  double mean_delay() const;
  double rate(Index count) const;
};

std::vector<CampaignResult> run_campaign(const PipelineConfig& cfg, const ModelSet& models);

std::string report_csv(const std::vector<CampaignResult>& results);
std::string report_json(const std::vector<CampaignResult>& results);
// campaign.csv and campaign.json under dir.
std::vector<std::filesystem::path> emit_report(const std::vector<CampaignResult>& results,
                                               const std::filesystem::path& dir);
std::vector<CampaignResult> parse_report_csv(std::string_view text);

}  // namespace bladecm::pipeline
