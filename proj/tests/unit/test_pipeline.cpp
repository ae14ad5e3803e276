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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "bladecm/io/model_io.hpp"
#include "bladecm/pipeline/pipeline.hpp"
#include "test_util.hpp"

using namespace bladecm;
using namespace bladecm::pipeline;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bladecm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Small enough to train in seconds: one run per region, short windows,
// two epochs, few calibration runs and a loose detection target.
PipelineConfig small_config(const fs::path& root) {
  PipelineConfig cfg;
  cfg.models = root / "models";
  cfg.reports = root / "reports";
  cfg.seed = 42;
  cfg.training_runs = 4;
  cfg.pca.window = 10;
  cfg.ae.window = 10;
  cfg.ae.epochs = 2;
  cfg.ae.train_hop = 20;
  cfg.glr.calibration_runs = 12;
  cfg.glr.pd = 0.5;
  cfg.glr.onset = 100.0;
  cfg.campaign.run_length = 300.0;
  cfg.campaign.fault_time = 100.0;
  cfg.campaign.trials = 4;
  cfg.campaign.faults = {sim::FaultKind::FlapBias, sim::FaultKind::FlapStuck};
  cfg.campaign.include_healthy = true;
  return cfg;
}

std::set<std::string> file_names(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
  return out;
}

class TrainedPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fresh_dir("trained"));
    cfg_ = new PipelineConfig(small_config(*root_));
    models_ = new ModelSet(train_offline(*cfg_));
    save_models(*models_, *cfg_);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete models_;
    delete cfg_;
    delete root_;
  }
  static fs::path* root_;
  static PipelineConfig* cfg_;
  static ModelSet* models_;
};

fs::path* TrainedPipeline::root_ = nullptr;
PipelineConfig* TrainedPipeline::cfg_ = nullptr;
ModelSet* TrainedPipeline::models_ = nullptr;

sim::LabeledRun healthy_run(const PipelineConfig& cfg, Region r, std::uint64_t seed) {
  return sim::generate_healthy(operating_run(cfg, r, 200.0, seed), cfg.bounds);
}

}  // namespace

TEST(Seeds, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(7, s, i));
  }
  EXPECT_EQ(seen.size(), 3000u);
  EXPECT_EQ(derive_seed(7, 2, 5), derive_seed(7, 2, 5));
  EXPECT_NE(derive_seed(7, 2, 5), derive_seed(8, 2, 5));
}

TEST(Allocation, ProportionalToDwell) {
  const std::map<Region, Index> dwell{
      {Region::II, 100}, {Region::III, 300}, {Region::IV, 500}, {Region::V, 100}};
  const auto a = allocate_trials(dwell, 100);
  ASSERT_EQ(a.size(), 100u);
  std::map<Region, int> n;
  for (Region r : a) ++n[r];
  EXPECT_EQ(n[Region::II], 10);
  EXPECT_EQ(n[Region::III], 30);
  EXPECT_EQ(n[Region::IV], 50);
  EXPECT_EQ(n[Region::V], 10);
  EXPECT_EQ(allocate_trials(dwell, 3).size(), 3u);
}

TEST(Config, ParsesSectionsAndRejectsUnknownKeys) {
  PipelineConfig cfg;
  apply_config(cfg, io::Document::parse(
                        "[run]\nmethod = dpca\ndetector = glr\nseed = 9\n"
                        "[pca]\nwindow = 20\ncv_target = 0.8\n"
                        "[campaign]\ntrials = 7\nfaults = FlapBias,EdgeStuck\n"
                        "[fault]\nkind = FlapExpDrift\nmagnitude = 2.5\n"));
  EXPECT_EQ(cfg.method, Method::Dpca);
  EXPECT_EQ(cfg.detector, Detector::Glr);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.pca.window, 20);
  EXPECT_DOUBLE_EQ(cfg.pca.cv_target, 0.8);
  EXPECT_EQ(cfg.campaign.trials, 7);
  ASSERT_EQ(cfg.campaign.faults.size(), 2u);
  EXPECT_EQ(cfg.campaign.faults[1], sim::FaultKind::EdgeStuck);
  EXPECT_EQ(cfg.fault.kind, sim::FaultKind::FlapExpDrift);
  EXPECT_DOUBLE_EQ(cfg.fault.spec(1, 300.0).magnitude, 2.5);

  EXPECT_ERRC(apply_config(cfg, io::Document::parse("[pca]\nwidth = 3\n")), Errc::InvalidConfig);
  EXPECT_ERRC(apply_config(cfg, io::Document::parse("[bogus]\nx = 1\n")), Errc::InvalidConfig);
  EXPECT_ERRC(set_option(cfg, "run", "method", "lda"), Errc::InvalidConfig);
  set_option(cfg, "run", "method", "ae");
  EXPECT_EQ(cfg.method, Method::Ae);
}

TEST(Report, FormattingAndRoundTrip) {
  CampaignResult r{"FlapBias", "ae", "glr", 3, 1, 2, 1, 1};
  r.delay_sum = 5.0;
  const std::string csv = report_csv({r});
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(row, "FlapBias,ae,glr,3,1,2,1,1,0.333333,0.666667,0.333333,0.333333,2.500000");

  const auto back = parse_report_csv(csv);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].detections, 2);
  EXPECT_EQ(report_csv(back), csv);

  const fs::path dir = fresh_dir("report");
  emit_report({r}, dir);
  const std::string first = slurp(dir / "campaign.csv") + slurp(dir / "campaign.json");
  emit_report({r}, dir);
  EXPECT_EQ(slurp(dir / "campaign.csv") + slurp(dir / "campaign.json"), first);
  EXPECT_NE(first.find("\"detection_rate\": 0.666667"), std::string::npos);
  fs::remove_all(dir);

  EXPECT_ERRC(emit_report({}, dir), Errc::EmptyInput);
  EXPECT_ERRC(parse_report_csv("nope\n"), Errc::MalformedCsv);
}

TEST_F(TrainedPipeline, WritesOneFilePerModel) {
  const auto names = file_names(cfg_->models);
  int dpca = 0, ae = 0;
  for (const auto& n : names) {
    if (n.rfind("dpca_region_", 0) == 0) ++dpca;
    if (n == "ae.model") ++ae;
  }
  EXPECT_EQ(dpca, 4);
  EXPECT_EQ(ae, 1);
  for (Region r : kMonitoredRegions) EXPECT_TRUE(models_->dpca.count(r));
  EXPECT_FALSE(models_->dpca.count(Region::I));
}

TEST_F(TrainedPipeline, SingleMethodFileCounts) {
  const fs::path root = fresh_dir("single");
  PipelineConfig cfg = small_config(root);
  cfg.method = Method::Ae;
  save_models(train_offline(cfg), cfg);
  int models = 0;
  for (const auto& n : file_names(cfg.models)) models += n.rfind("dpca_region_", 0) == 0 || n == "ae.model";
  EXPECT_EQ(models, 1);
  fs::remove_all(root);
}

TEST_F(TrainedPipeline, RetrainingIsByteIdentical) {
  const fs::path root = fresh_dir("retrain");
  PipelineConfig cfg = small_config(root);
  save_models(train_offline(cfg), cfg);
  for (const auto& n : file_names(cfg_->models)) {
    EXPECT_EQ(slurp(cfg.models / n), slurp(cfg_->models / n)) << n;
  }
  fs::remove_all(root);
}

TEST_F(TrainedPipeline, LoadedModelsMonitorIdentically) {
  const ModelSet loaded = load_models(*cfg_);
  for (Region r : kMonitoredRegions) {
    const auto run = healthy_run(*cfg_, r, 100 + region_index(r));
    const SignalMatrix faulted =
        sim::inject_fault(run.data, sim::FaultSpec::defaults(sim::FaultKind::FlapBias, 1, 100.0));
    const auto a = monitor_online(*cfg_, *models_, faulted, 100.0);
    const auto b = monitor_online(*cfg_, loaded, faulted, 100.0);
    ASSERT_EQ(a.detectors.size(), 4u);
    ASSERT_EQ(a.detectors.size(), b.detectors.size());
    for (std::size_t d = 0; d < a.detectors.size(); ++d) {
      const auto& ta = a.detectors[d].trace;
      const auto& tb = b.detectors[d].trace;
      ASSERT_EQ(ta.statistic.size(), tb.statistic.size());
      for (std::size_t k = 0; k < ta.statistic.size(); ++k) {
        EXPECT_LE(std::abs(ta.statistic[k] - tb.statistic[k]), 1e-12 * std::max(1.0, std::abs(ta.statistic[k])));
        EXPECT_LE(std::abs(ta.threshold[k] - tb.threshold[k]), 1e-12 * std::max(1.0, std::abs(ta.threshold[k])));
      }
      EXPECT_EQ(ta.alarms, tb.alarms);
    }
  }
}

TEST_F(TrainedPipeline, ShortRunWarns) {
  const auto run = healthy_run(*cfg_, Region::III, 5);
  const SignalMatrix shortened = run.data.slice(0, 5);
  const auto res = monitor_online(*cfg_, *models_, shortened);
  ASSERT_EQ(res.warnings.size(), 1u);
  for (const auto& d : res.detectors) {
    EXPECT_EQ(d.valid_samples, 0);
    EXPECT_TRUE(d.trace.alarms.empty());
  }
  EXPECT_NE(summary_json(res).find("fewer than the model window"), std::string::npos);
}

TEST_F(TrainedPipeline, MonitorOutputs) {
  const auto run = healthy_run(*cfg_, Region::IV, 77);
  const auto res = monitor_online(*cfg_, *models_, run.data);
  const fs::path dir = fresh_dir("monitor");
  const auto files = write_monitor_outputs(res, dir, "run");
  EXPECT_EQ(files.size(), 5u);
  const std::string trace = slurp(dir / "run_dpca_glr.csv");
  EXPECT_EQ(trace.rfind("t,g,h,alarm_flag\n", 0), 0u);
  const std::string summary = slurp(dir / "run_summary.json");
  EXPECT_NE(summary.find("\"first_alarm_time\""), std::string::npos);
  fs::remove_all(dir);
}

TEST_F(TrainedPipeline, CampaignCountsAreConsistentAndDeterministic) {
  const auto a = run_campaign(*cfg_, *models_);
  const auto b = run_campaign(*cfg_, *models_);
  EXPECT_EQ(report_csv(a), report_csv(b));
  EXPECT_EQ(a.size(), 3u * 4u);
  for (const auto& r : a) {
    EXPECT_EQ(r.trials, cfg_->campaign.trials);
    EXPECT_EQ(r.detections, r.strong_detections + r.weak_detections);
    EXPECT_GE(r.mean_delay(), 0.0);
    if (r.scenario == "none") EXPECT_EQ(r.detections, 0);
  }
}

TEST(Pipeline, MissingModelsAreReported) {
  PipelineConfig cfg;
  cfg.campaign.trials = 1;
  ModelSet empty;
  empty.dwell = {{Region::II, 1}, {Region::III, 1}, {Region::IV, 1}, {Region::V, 1}};
  EXPECT_ERRC(run_campaign(cfg, empty), Errc::MissingModel);
  cfg.models = fresh_dir("none");
  EXPECT_THROW(load_models(cfg), Error);
  fs::remove_all(cfg.models);
}
