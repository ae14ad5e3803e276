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

#include "bladecm/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "bladecm/core/dataset.hpp"
#include "bladecm/dpca/filters.hpp"
#include "bladecm/error.hpp"
#include "bladecm/io/model_io.hpp"

namespace bladecm::pipeline {

namespace {

// Keeps only samples with a statistic; the onset is mapped to the
// compressed index.
glr::CalibrationStream compress(const StatisticTrace& s, Index onset) {
  glr::CalibrationStream out;
  for (std::size_t k = 0; k < s.valid.size(); ++k) {
    if (!s.valid[k]) continue;
    if (static_cast<Index>(k) < onset) ++out.onset;
    out.z.push_back(s.z[k]);
    out.shift.push_back(s.shift[k]);
  }
  return out;
}

glr::GlrConfig finish_glr(const glr::H0Stats& h0, const glr::StreamCalibration& cal) {
  glr::GlrConfig g{h0.mean, h0.stddev, cal.window, cal.threshold};
  g.validate();
  return g;
}

glr::H0Stats checked_h0(std::span<const double> values, const std::string& what) {
  if (values.size() < 1000) {
    raise(Errc::InsufficientRegionData, what + ": only " + std::to_string(values.size()) +
                                            " validation samples for the healthy statistics");
  }
  const glr::H0Stats h0 = glr::estimate_h0(values);
  require(h0.stddev > 0.0, Errc::InsufficientRegionData, what + ": constant validation statistic");
  return h0;
}

}  // namespace

StatisticTrace dpca_statistic(const dpca::DpcaModelSet& models, const SignalMatrix& run,
                              std::span<const Region> labels) {
  const dpca::SpeTrace spe = dpca::dpca_monitor(models, run, labels);
  StatisticTrace s;
  s.filtered = spe.filtered;
  s.threshold = spe.threshold;
  s.valid = spe.valid;
  s.z.assign(s.filtered.size(), 0.0);
  s.shift.assign(s.filtered.size(), 0.0);
  for (std::size_t k = 0; k < s.valid.size(); ++k) {
    if (!s.valid[k]) continue;
    const auto& glr = models.at(spe.regions[k]).glr;
    require(glr.has_value(), Errc::MissingModel, "dPCA model has no GLR settings");
    s.z[k] = (s.filtered[k] - glr->mu0) / glr->sigma;
    s.shift[k] = glr->mu0 / glr->sigma;
  }
  return s;
}

StatisticTrace ae_statistic(const ae::AeModel& model, const SignalMatrix& run,
                            std::span<const Region> labels) {
  const ae::MaeTrace mae = ae::mae_statistic(model, run);
  StatisticTrace s;
  s.filtered = mae.filtered;
  s.threshold.assign(s.filtered.size(), mae.threshold);
  s.valid = mae.valid;
  s.z.assign(s.filtered.size(), 0.0);
  s.shift.assign(s.filtered.size(), 0.0);
  if (model.glr) {
    const bool routed = !model.region_h0.empty();
    require(!routed || labels.size() == s.valid.size(), Errc::ShapeMismatch,
            "autoencoder statistic needs one region label per sample");
    for (std::size_t k = 0; k < s.valid.size(); ++k) {
      if (!s.valid[k]) continue;
      double mu = model.glr->mu0, sd = model.glr->sigma;
      if (routed) {
        const auto it = model.region_h0.find(labels[k]);
        if (it != model.region_h0.end()) mu = it->second.mean, sd = it->second.stddev;
      }
      s.z[k] = (s.filtered[k] - mu) / sd;
      s.shift[k] = mu / sd;
    }
  }
  return s;
}

std::vector<double> glr_trace(const StatisticTrace& s, Index window) {
  glr::GlrStream stream(0.0, 1.0, window);
  std::vector<double> g(s.z.size(), 0.0);
  for (std::size_t k = 0; k < s.z.size(); ++k) {
    if (s.valid[k]) g[k] = stream.push(s.z[k]);
  }
  return g;
}

std::vector<Region> allocate_trials(const std::map<Region, Index>& dwell, Index trials) {
  double total = 0.0;
  for (Region r : kMonitoredRegions) {
    const auto it = dwell.find(r);
    if (it != dwell.end()) total += static_cast<double>(it->second);
  }
  std::map<Region, Index> count;
  std::vector<std::pair<double, Region>> remainders;
  Index assigned = 0;
  for (Region r : kMonitoredRegions) {
    const auto it = dwell.find(r);
    const double d = it == dwell.end() ? 0.0 : static_cast<double>(it->second);
    const double share = total > 0.0 ? d / total * static_cast<double>(trials)
                                     : static_cast<double>(trials) / 4.0;
    count[r] = static_cast<Index>(std::floor(share));
    assigned += count[r];
    remainders.emplace_back(share - std::floor(share), r);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < trials; ++i, ++assigned) ++count[remainders[i % remainders.size()].second];
  std::vector<Region> out;
  for (Region r : kMonitoredRegions) out.insert(out.end(), static_cast<std::size_t>(count[r]), r);
  return out;
}

sim::SimConfig operating_run(const PipelineConfig& cfg, Region region, double duration,
                             std::uint64_t seed) {
  sim::SimConfig s = cfg.sim;
  s.wind_schedule.clear();
  s.ramp_end_wind.reset();
  s.mean_wind = cfg.campaign.operating_wind.at(region);
  s.duration = duration;
  s.seed = seed;
  return s;
}

std::vector<sim::LabeledRun> generate_training_runs(const PipelineConfig& cfg) {
  std::vector<sim::LabeledRun> runs;
  for (Index i = 0; i < cfg.training_runs; ++i) {
    const Region r = kMonitoredRegions[static_cast<std::size_t>(i) % kMonitoredRegions.size()];
    runs.push_back(sim::generate_healthy(
        operating_run(cfg, r, cfg.sim.duration,
                      derive_seed(cfg.seed, kTrainingStream, static_cast<std::uint64_t>(i))),
        cfg.bounds));
  }
  return runs;
}

ModelSet train_offline(const PipelineConfig& cfg) {
  cfg.validate();
  if (!cfg.data.empty()) {
    SignalMatrix data = read_csv(cfg.data);
    std::vector<Region> labels = segment_regions(data, cfg.bounds);
    const sim::LabeledRun run{std::move(data), std::move(labels), std::nullopt};
    return train_offline(cfg, std::span<const sim::LabeledRun>(&run, 1));
  }
  const auto runs = generate_training_runs(cfg);
  return train_offline(cfg, runs);
}

ModelSet train_offline(const PipelineConfig& cfg, std::span<const sim::LabeledRun> healthy) {
  cfg.validate();
  require(!healthy.empty(), Errc::InsufficientData, "no healthy training data");
  struct Piece {
    SignalMatrix data;
    std::vector<Region> labels;
  };
  std::vector<Piece> train, val, test;
  for (const auto& run : healthy) {
    const DatasetSplit split =
        split_dataset(run.data, cfg.train_fraction, cfg.val_fraction, cfg.test_fraction);
    const std::vector<Region> labels = segment_regions(run.data, cfg.bounds);
    const auto n_train = static_cast<std::ptrdiff_t>(split.train.rows());
    const auto n_val = static_cast<std::ptrdiff_t>(split.validation.rows());
    train.push_back({split.train, {labels.begin(), labels.begin() + n_train}});
    val.push_back({split.validation, {labels.begin() + n_train, labels.begin() + n_train + n_val}});
    test.push_back({split.test, {labels.begin() + n_train + n_val,
                                labels.begin() + n_train + n_val + split.test.rows()}});
  }

  ModelSet out;
  for (Region r : kMonitoredRegions) out.dwell[r] = 0;
  for (const auto& p : train) {
    for (Region r : p.labels) {
      if (r != Region::I) ++out.dwell[r];
    }
  }

  if (uses(cfg.method, Method::Dpca)) {
    for (Region r : kMonitoredRegions) {
      std::vector<SignalMatrix> segments;
      for (const auto& p : train) {
        for (const RegionRun& rr : region_runs(p.labels)) {
          if (rr.region == r && rr.length() >= cfg.pca.window) {
            segments.push_back(p.data.slice(rr.begin, rr.length()));
          }
        }
      }
      const std::string name = "region " + std::string(to_string(r));
      if (segments.empty()) raise(Errc::InsufficientRegionData, name + ": no training segment");
      try {
        out.dpca.emplace(r, dpca::fit_dpca(segments, r, cfg.pca));
      } catch (const Error& e) {
        if (e.code() == Errc::InsufficientData || e.code() == Errc::ZeroVarianceChannel) {
          raise(Errc::InsufficientRegionData, name + ": " + e.what());
        }
        throw;
      }
    }
    // The in-sample SPE of a 1200-dimensional fit is biased low, so the
    // static threshold is re-taken on held-out pieces (validation + test).
    std::map<Region, std::vector<double>> val_stats, held_out;
    auto collect = [&](const std::vector<Piece>& pieces, bool is_val) {
      for (const auto& p : pieces) {
        const dpca::SpeTrace tr = dpca::dpca_monitor(out.dpca, p.data, p.labels);
        for (std::size_t k = 0; k < tr.valid.size(); ++k) {
          if (!tr.valid[k]) continue;
          if (is_val) val_stats[tr.regions[k]].push_back(tr.filtered[k]);
          held_out[tr.regions[k]].push_back(tr.filtered[k]);
        }
      }
    };
    collect(val, true);
    collect(test, false);
    for (auto& [r, model] : out.dpca) {
      const std::vector<double>& values = val_stats[r];
      const glr::H0Stats h0 = checked_h0(values, "region " + std::string(to_string(r)));
      model.glr = glr::GlrConfig{h0.mean, h0.stddev, cfg.glr.initial_window, 1.0};
      model.spe_threshold = dpca::quantile_threshold(held_out[r], cfg.pca.pf);
    }
  }

  if (uses(cfg.method, Method::Ae)) {
    ae::AeOptions opts = cfg.ae;
    std::vector<SignalMatrix> ae_train, ae_val;
    for (const auto& p : train) ae_train.push_back(p.data.select(ChannelSet::autoencoder()));
    for (const auto& p : val) ae_val.push_back(p.data.select(ChannelSet::autoencoder()));
    auto [model, report] = ae::train_ae(
        ae_train, ae_val,
        ae::default_architecture(opts.window, static_cast<Index>(ChannelSet::autoencoder().size())),
        opts);
    std::vector<double> values;
    std::map<Region, std::vector<double>> by_region;
    for (std::size_t i = 0; i < ae_val.size(); ++i) {
      const ae::MaeTrace mae = ae::mae_statistic(model, ae_val[i]);
      for (std::size_t k = 0; k < mae.valid.size(); ++k) {
        if (!mae.valid[k]) continue;
        values.push_back(mae.filtered[k]);
        by_region[val[i].labels[k]].push_back(mae.filtered[k]);
      }
    }
    const glr::H0Stats h0 = checked_h0(values, "autoencoder");
    model.glr = glr::GlrConfig{h0.mean, h0.stddev, cfg.glr.initial_window, 1.0};
    for (Region r : kMonitoredRegions) {
      const auto it = by_region.find(r);
      if (it != by_region.end() && it->second.size() >= 1000) {
        model.region_h0[r] = glr::estimate_h0(it->second);
      }
    }
    out.ae = std::move(model);
    out.ae_report = std::move(report);
  }

  // GLR design on simulated healthy runs at the campaign operating points.
  const std::vector<Region> alloc = allocate_trials(out.dwell, cfg.glr.calibration_runs);
  std::vector<glr::CalibrationStream> pca_streams, ae_streams;
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    const sim::LabeledRun run = sim::generate_healthy(
        operating_run(cfg, alloc[i], cfg.campaign.run_length,
                      derive_seed(cfg.seed, kCalibrationStream, i)),
        cfg.bounds);
    const Index onset = run.data.index_at_or_after(cfg.glr.onset);
    if (!out.dpca.empty()) {
      pca_streams.push_back(compress(dpca_statistic(out.dpca, run.data, run.regions), onset));
    }
    if (out.ae) ae_streams.push_back(compress(ae_statistic(*out.ae, run.data, run.regions), onset));
  }
  if (!out.dpca.empty()) {
    const auto cal = glr::calibrate_glr_streams(pca_streams, cfg.glr.pf, cfg.glr.pd,
                                                cfg.glr.initial_window);
    for (auto& [r, model] : out.dpca) {
      model.glr = finish_glr({model.glr->mu0, model.glr->sigma}, cal);
    }
  }
  if (out.ae) {
    const auto cal = glr::calibrate_glr_streams(ae_streams, cfg.glr.pf, cfg.glr.pd,
                                                cfg.glr.initial_window);
    out.ae->glr = finish_glr({out.ae->glr->mu0, out.ae->glr->sigma}, cal);
  }
  return out;
}

std::vector<std::filesystem::path> save_models(const ModelSet& models, const PipelineConfig& cfg) {
  std::vector<std::filesystem::path> written;
  for (const auto& [r, model] : models.dpca) {
    const auto path = cfg.models / ("dpca_region_" + std::string(to_string(r)) + ".model");
    io::save_model(model, path);
    written.push_back(path);
  }
  if (models.ae) {
    const auto path = cfg.models / "ae.model";
    io::save_model(*models.ae, path);
    written.push_back(path);
  }
  io::Document regions;
  regions.set("", "format", io::kModelFormatName);
  regions.set("", "version", std::to_string(io::kModelFormatVersion));
  regions.set("", "type", "regions");
  for (const auto& [r, n] : models.dwell) {
    regions.set("dwell", std::string(to_string(r)), std::to_string(n));
  }
  regions.write(cfg.models / "regions.model");
  written.push_back(cfg.models / "regions.model");
  if (models.ae_report) {
    const auto path = cfg.reports / "train_report.csv";
    io::write_text(path, io::format_train_report(*models.ae_report));
    written.push_back(path);
  }
  return written;
}

ModelSet load_models(const PipelineConfig& cfg) {
  ModelSet out;
  if (uses(cfg.method, Method::Dpca)) {
    for (Region r : kMonitoredRegions) {
      const auto path = cfg.models / ("dpca_region_" + std::string(to_string(r)) + ".model");
      require(std::filesystem::exists(path), Errc::MissingModel,
              "missing model file '" + path.string() + "'");
      out.dpca.emplace(r, io::load_dpca_model(path));
    }
  }
  if (uses(cfg.method, Method::Ae)) {
    const auto path = cfg.models / "ae.model";
    require(std::filesystem::exists(path), Errc::MissingModel,
            "missing model file '" + path.string() + "'");
    out.ae = io::load_ae_model(path);
  }
  const auto regions = cfg.models / "regions.model";
  if (std::filesystem::exists(regions)) {
    const io::Document doc = io::Document::read(regions);
    const auto version = io::parse_integer(doc.get("", "version"), "version");
    require(version == io::kModelFormatVersion, Errc::ModelVersionMismatch,
            regions.string() + ": unsupported version");
    for (Region r : kMonitoredRegions) {
      if (auto v = doc.find("dwell", to_string(r))) out.dwell[r] = io::parse_integer(*v, "dwell");
    }
  }
  return out;
}

}  // namespace bladecm::pipeline
