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

// bladecm: blade-root sensor condition monitoring.
//
//   bladecm [--config FILE] [--set section.key=value ...] <command> [flags]
//
// Config values are applied first, then --set overrides, then command flags.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bladecm/ae/model.hpp"
#include "bladecm/core/dataset.hpp"
#include "bladecm/error.hpp"
#include "bladecm/pipeline/pipeline.hpp"
#include "bladecm/sim/turbine.hpp"

using namespace bladecm;
namespace pl = bladecm::pipeline;

namespace {

// Flag bound to a config key; applied only when given on the command line.
struct Override {
  std::string section;
  std::string key;
  std::optional<std::string> value;
};

class Flags {
 public:
  void add(CLI::App* cmd, const std::string& flag, const std::string& section,
           const std::string& key, const std::string& help) {
    items_.push_back(std::make_unique<Override>(Override{section, key, std::nullopt}));
    cmd->add_option(flag, items_.back()->value, help);
  }
  void apply(pl::PipelineConfig& cfg) const {
    for (const auto& o : items_) {
      if (o->value) pl::set_option(cfg, o->section, o->key, *o->value);
    }
  }

 private:
  std::vector<std::unique_ptr<Override>> items_;
};

void apply_set(pl::PipelineConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    require(eq != std::string::npos, Errc::InvalidConfig, "--set expects section.key=value");
    const std::string lhs = s.substr(0, eq);
    const auto dot = lhs.find('.');
    if (dot == std::string::npos) {
      pl::set_option(cfg, "", lhs, s.substr(eq + 1));
    } else {
      pl::set_option(cfg, lhs.substr(0, dot), lhs.substr(dot + 1), s.substr(eq + 1));
    }
  }
}

void print_models(const pl::ModelSet& ms) {
  for (const auto& [r, m] : ms.dpca) {
    std::printf("dpca region %s: retained %lld of %lld, spe threshold %.6g", std::string(to_string(r)).c_str(),
                static_cast<long long>(m.retained()), static_cast<long long>(m.embedded_dim()),
                m.spe_threshold);
    if (m.glr) std::printf(", glr M=%lld h=%.6g", static_cast<long long>(m.glr->window), m.glr->threshold);
    std::printf("\n");
  }
  if (ms.ae) {
    std::printf("ae: mae threshold %.6g", ms.ae->mae_threshold);
    if (ms.ae->glr) std::printf(", glr M=%lld h=%.6g", static_cast<long long>(ms.ae->glr->window), ms.ae->glr->threshold);
    std::printf(", loss %.6g/%.6g\n", ms.ae->final_train_loss, ms.ae->final_val_loss);
  }
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blade-root sensor fault detection: dPCA and autoencoder monitors with GLR"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every subcommand");

  std::string config_path;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "INI-style config file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "Override a config key, section.key=value (repeatable)");
  app.fallthrough();

  Flags flags;
  auto common = [&](CLI::App* cmd) {
    flags.add(cmd, "--seed", "run", "seed", "Master seed");
    flags.add(cmd, "--method", "run", "method", "dpca, ae or both");
    flags.add(cmd, "--detector", "run", "detector", "static, glr or both");
    flags.add(cmd, "--models", "paths", "models", "Model directory");
    flags.add(cmd, "--reports", "paths", "reports", "Report directory");
  };

  // generate
  auto* gen = app.add_subcommand("generate", "Simulate healthy telemetry to CSV");
  std::string gen_out;
  gen->add_option("-o,--out", gen_out, "Output CSV")->required();
  flags.add(gen, "--seed", "run", "seed", "Simulation seed");
  flags.add(gen, "--duration", "sim", "duration", "Seconds");
  flags.add(gen, "--wind", "sim", "mean_wind", "Mean wind speed (m/s)");
  flags.add(gen, "--ramp-to", "sim", "ramp_end_wind", "Linear ramp end wind (m/s)");
  flags.add(gen, "--schedule", "sim", "wind_schedule", "Comma list of cyclic wind levels");
  flags.add(gen, "--dwell", "sim", "schedule_dwell", "Seconds per schedule level");
  flags.add(gen, "--turbulence", "sim", "turbulence_intensity", "Turbulence intensity");

  // inject
  auto* inj = app.add_subcommand("inject", "Apply a sensor fault to a telemetry CSV");
  std::string inj_in, inj_out;
  inj->add_option("-i,--in", inj_in, "Input CSV")->required()->check(CLI::ExistingFile);
  inj->add_option("-o,--out", inj_out, "Output CSV")->required();
  flags.add(inj, "--fault", "fault", "kind", "FlapBias, EdgeBias, FlapStuck, EdgeStuck, FlapJump, FlapExpDrift");
  flags.add(inj, "--blade", "campaign", "blade", "Blade 1-3");
  flags.add(inj, "--time", "campaign", "fault_time", "Fault onset (s)");
  flags.add(inj, "--magnitude", "fault", "magnitude", "Offset (N*m) or stuck ratio");
  flags.add(inj, "--time-constant", "fault", "time_constant", "Drift time constant (s)");

  // train
  auto* train = app.add_subcommand("train", "Fit models offline and calibrate detectors");
  common(train);
  flags.add(train, "--data", "paths", "data", "Healthy training CSV (simulated when omitted)");
  flags.add(train, "--epochs", "ae", "epochs", "Autoencoder epochs");
  flags.add(train, "--runs", "sim", "runs", "Simulated training runs");
  flags.add(train, "--calibration-runs", "glr", "calibration_runs", "GLR calibration runs");

  // monitor
  auto* mon = app.add_subcommand("monitor", "Run the online detectors over a telemetry CSV");
  common(mon);
  std::string mon_run, mon_out, mon_prefix;
  std::optional<double> mon_fault_time;
  mon->add_option("-r,--run", mon_run, "Telemetry CSV")->required()->check(CLI::ExistingFile);
  mon->add_option("-o,--out", mon_out, "Output directory (default: reports directory)");
  mon->add_option("--prefix", mon_prefix, "Output file prefix (default: run file stem)");
  mon->add_option("--fault-time", mon_fault_time, "Known fault onset (s) for the summary");

  // campaign
  auto* camp = app.add_subcommand("campaign", "Monte Carlo fault-injection campaign");
  common(camp);
  flags.add(camp, "--trials", "campaign", "trials", "Trials per scenario");
  flags.add(camp, "--faults", "campaign", "faults", "Comma list of fault kinds, 'all' or 'none'");
  flags.add(camp, "--blade", "campaign", "blade", "Faulty blade 1-3");
  flags.add(camp, "--include-healthy", "campaign", "include_healthy", "Add the no-fault scenario");
  bool camp_train = false;
  camp->add_flag("--train", camp_train, "Train models first instead of loading them");

  // gradcheck
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of the autoencoder gradients");
  Index gc_window = 8, gc_batch = 3, gc_entries = 0, gc_width = 6;
  bool gc_full = false;
  double gc_step = 1e-5;
  std::uint64_t gc_seed = 7;
  double gc_tol = 1e-4;
  gc->add_option("--window", gc_window, "Window length (even)");
  gc->add_option("--width", gc_width, "Layer width of the compact model");
  gc->add_option("--step", gc_step, "Finite-difference step");
  gc->add_flag("--full", gc_full, "Check the production architecture (window multiple of 10)");
  gc->add_option("--batch", gc_batch, "Batch size");
  gc->add_option("--entries", gc_entries, "Checked entries per tensor (0 = all)");
  gc->add_option("--seed", gc_seed, "Weight and data seed");
  gc->add_option("--tolerance", gc_tol, "Maximum relative error");

  // report
  auto* rep = app.add_subcommand("report", "Print or convert a campaign report");
  std::string rep_in, rep_format = "table";
  rep->add_option("-i,--in", rep_in, "campaign.csv (default: <reports>/campaign.csv)");
  rep->add_option("--format", rep_format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorClass::Usage);
  }

  try {
    pl::PipelineConfig cfg = config_path.empty() ? pl::PipelineConfig{} : pl::load_config(config_path);
    apply_set(cfg, sets);
    flags.apply(cfg);
    cfg.validate();

    if (*gen) {
      sim::SimConfig s = cfg.sim;
      s.seed = cfg.seed;
      const auto run = sim::generate_healthy(s, cfg.bounds);
      write_csv(run.data, gen_out);
      std::printf("wrote %s (%lld samples)\n", gen_out.c_str(), static_cast<long long>(run.data.rows()));
    } else if (*inj) {
      const SignalMatrix data = read_csv(inj_in);
      const auto f = cfg.fault.spec(cfg.campaign.blade, cfg.campaign.fault_time);
      write_csv(sim::inject_fault(data, f), inj_out);
      std::printf("wrote %s (%s on %s from %.3f s)\n", inj_out.c_str(),
                  std::string(sim::to_string(f.kind)).c_str(), f.channel().c_str(), f.time);
    } else if (*train) {
      const auto ms = pl::train_offline(cfg);
      const auto files = pl::save_models(ms, cfg);
      print_models(ms);
      for (const auto& p : files) std::printf("wrote %s\n", p.string().c_str());
    } else if (*mon) {
      const auto ms = pl::load_models(cfg);
      const SignalMatrix run = read_csv(mon_run);
      const auto result = pl::monitor_online(cfg, ms, run, mon_fault_time);
      const std::filesystem::path dir = mon_out.empty() ? cfg.reports : std::filesystem::path(mon_out);
      const std::string prefix = mon_prefix.empty() ? std::filesystem::path(mon_run).stem().string() : mon_prefix;
      pl::write_monitor_outputs(result, dir, prefix);
      std::cout << pl::summary_json(result);
    } else if (*camp) {
      pl::ModelSet ms;
      if (camp_train) {
        ms = pl::train_offline(cfg);
        pl::save_models(ms, cfg);
      } else {
        ms = pl::load_models(cfg);
      }
      const auto results = pl::run_campaign(cfg, ms);
      pl::emit_report(results, cfg.reports);
      std::cout << pl::report_csv(results);
    } else if (*gc) {
      const auto arch = gc_full ? ae::default_architecture(gc_window)
                                : ae::compact_architecture(gc_window, 9, gc_width);
      ae::Network net({gc_window, 9}, arch);
      net.initialize(gc_seed);
      std::mt19937_64 rng(gc_seed + 1);
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::MatrixXd batch(gc_window * 9, gc_batch);
      for (Index i = 0; i < batch.size(); ++i) batch.data()[i] = normal(rng);
      const auto results = ae::gradient_check(net, batch, gc_step, gc_entries);
      double worst = 0.0;
      for (const auto& r : results) {
        std::printf("layer %zu %-8s param %zu checked %lld max rel error %.3e\n", r.layer,
                    std::string(ae::to_string(r.kind)).c_str(), r.parameter,
                    static_cast<long long>(r.checked), r.max_rel_error);
        worst = std::max(worst, r.max_rel_error);
      }
      std::printf("worst %.3e (tolerance %.1e): %s\n", worst, gc_tol, worst <= gc_tol ? "ok" : "FAILED");
      if (worst > gc_tol) return static_cast<int>(ErrorClass::Numerical);
    } else if (*rep) {
      const std::filesystem::path in = rep_in.empty() ? cfg.reports / "campaign.csv" : std::filesystem::path(rep_in);
      const auto results = pl::parse_report_csv(io::read_text(in));
      if (rep_format == "csv") {
        std::cout << pl::report_csv(results);
      } else if (rep_format == "json") {
        std::cout << pl::report_json(results);
      } else {
        std::printf("%-14s %-5s %-7s %6s %9s %9s %9s %9s\n", "scenario", "meth", "det", "trials",
                    "P_F", "P_D", "strong", "delay_s");
        for (const auto& r : results) {
          std::printf("%-14s %-5s %-7s %6lld %9s %9s %9s %9.2f\n", r.scenario.c_str(), r.method.c_str(),
                      r.detector.c_str(), static_cast<long long>(r.trials),
                      fixed(r.rate(r.false_alarms)).c_str(), fixed(r.rate(r.detections)).c_str(),
                      fixed(r.rate(r.strong_detections)).c_str(), r.mean_delay());
        }
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.error_class());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ErrorClass::Data);
  }
  return 0;
}
