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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bladecm/dpca/spectral.hpp"
#include "bladecm/error.hpp"
#include "bladecm/glr/glr.hpp"
#include "bladecm/pipeline/pipeline.hpp"

namespace py = pybind11;
namespace pl = bladecm::pipeline;
using namespace bladecm;

namespace {

ChannelSet channel_set(const std::optional<std::vector<std::string>>& names) {
  return names ? ChannelSet(*names) : ChannelSet::full();
}

std::vector<std::string> names_of(const ChannelSet& c) { return {c.names().begin(), c.names().end()}; }

std::vector<int> region_numbers(const std::vector<Region>& regions) {
  std::vector<int> out;
  out.reserve(regions.size());
  for (Region r : regions) out.push_back(region_index(r));
  return out;
}

py::dict trace_dict(const glr::DetectionTrace& t) {
  py::dict d;
  d["statistic"] = t.statistic;
  d["threshold"] = t.threshold;
  d["valid"] = std::vector<bool>(t.valid.begin(), t.valid.end());
  d["alarms"] = t.alarms;
  d["first_alarm"] = t.first_alarm;
  d["false_alarm"] = t.false_alarm;
  d["detected"] = t.detected;
  d["strongly_detected"] = t.strongly_detected;
  return d;
}

py::dict result_dict(const pl::CampaignResult& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["method"] = r.method;
  d["detector"] = r.detector;
  d["trials"] = r.trials;
  d["false_alarms"] = r.false_alarms;
  d["detections"] = r.detections;
  d["strong_detections"] = r.strong_detections;
  d["weak_detections"] = r.weak_detections;
  d["false_alarm_rate"] = r.rate(r.false_alarms);
  d["detection_rate"] = r.rate(r.detections);
  d["mean_delay_s"] = r.mean_delay();
  return d;
}

}  // namespace

PYBIND11_MODULE(_bladecm, m) {
  m.doc() = "Wind-turbine blade condition monitoring: simulation, dPCA/autoencoder models, GLR tests";

  // Kept alive for the interpreter's lifetime through the module attribute.
  static PyObject* error_type = py::exception<Error>(m, "BladecmError", PyExc_RuntimeError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, inst.ptr());
    }
  });

  m.def("channels", [] { return names_of(ChannelSet::full()); }, "Canonical channel order.");

  m.def(
      "generate",
      [](std::uint64_t seed, double duration, double mean_wind, std::optional<double> ramp_to,
         double turbulence) {
        sim::SimConfig c;
        c.seed = seed;
        c.duration = duration;
        c.mean_wind = mean_wind;
        c.ramp_end_wind = ramp_to;
        c.turbulence_intensity = turbulence;
        const sim::LabeledRun run = sim::generate_healthy(c, RegionBoundaries{});
        py::dict d;
        d["samples"] = run.data.samples();
        d["channels"] = names_of(run.data.channels());
        d["regions"] = region_numbers(run.regions);
        d["sample_period"] = run.data.sample_period();
        return d;
      },
      py::arg("seed") = 1, py::arg("duration") = 900.0, py::arg("mean_wind") = 8.0,
      py::arg("ramp_to") = py::none(), py::arg("turbulence") = 0.1,
      "Healthy telemetry: dict with samples (n x m), channels, regions (1-5), sample_period.");

  m.def(
      "inject",
      [](const Eigen::MatrixXd& samples, const std::string& kind, int blade, double time,
         std::optional<double> magnitude, std::optional<double> time_constant,
         const std::optional<std::vector<std::string>>& channels, double sample_period) {
        pl::FaultChoice f;
        f.kind = sim::parse_fault_kind(kind);
        f.magnitude = magnitude;
        f.time_constant = time_constant;
        const SignalMatrix data(samples, channel_set(channels), sample_period);
        return Eigen::MatrixXd(sim::inject_fault(data, f.spec(blade, time)).samples());
      },
      py::arg("samples"), py::arg("kind"), py::arg("blade") = 1, py::arg("time") = 300.0,
      py::arg("magnitude") = py::none(), py::arg("time_constant") = py::none(),
      py::arg("channels") = py::none(), py::arg("sample_period") = kDefaultSamplePeriod,
      "Copy of samples with a sensor fault from `time` seconds on.");

  m.def(
      "eigh",
      [](const Eigen::MatrixXd& s) {
        auto e = dpca::symmetric_eigendecomposition(s);
        return py::make_tuple(e.values, e.vectors);
      },
      py::arg("matrix"), "Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.");
  m.def(
      "select_components",
      [](const Eigen::VectorXd& values, double cv) { return dpca::select_components(values, cv); },
      py::arg("eigenvalues"), py::arg("cv_target"));

  m.def(
      "glr_statistic",
      [](const std::vector<double>& z, double mu0, double sigma, Index window) {
        return glr::glr_statistic(z, mu0, sigma, window);
      },
      py::arg("z"), py::arg("mu0"), py::arg("sigma"), py::arg("window"));
  m.def(
      "detect",
      [](const std::vector<double>& g, double threshold, std::optional<Index> fault_index) {
        return trace_dict(glr::detect(g, threshold, fault_index));
      },
      py::arg("g"), py::arg("threshold"), py::arg("fault_index") = py::none());

  py::class_<pl::PipelineConfig>(m, "Config")
      .def(py::init([](const std::optional<std::filesystem::path>& path) {
             return path ? pl::load_config(*path) : pl::PipelineConfig{};
           }),
           py::arg("path") = py::none())
      .def(
          "set",
          [](pl::PipelineConfig& c, const std::string& section, const std::string& key, py::object value) {
            std::string text = py::isinstance<py::bool_>(value) ? (value.cast<bool>() ? "true" : "false")
                                                                 : py::str(value).cast<std::string>();
            pl::set_option(c, section, key, text);
            return &c;
          },
          py::arg("section"), py::arg("key"), py::arg("value"), py::return_value_policy::reference,
          "Set one option as in a config file; returns the config for chaining.")
      .def("validate", &pl::PipelineConfig::validate)
      .def_readwrite("models", &pl::PipelineConfig::models)
      .def_readwrite("reports", &pl::PipelineConfig::reports)
      .def_readwrite("seed", &pl::PipelineConfig::seed);

  py::class_<pl::ModelSet>(m, "Models")
      .def_property_readonly("dpca_regions",
                             [](const pl::ModelSet& s) {
                               std::vector<int> out;
                               for (const auto& [r, _] : s.dpca) out.push_back(region_index(r));
                               return out;
                             })
      .def_property_readonly("has_ae", [](const pl::ModelSet& s) { return s.ae.has_value(); })
      .def("save",
           [](const pl::ModelSet& s, const pl::PipelineConfig& c) {
             std::vector<std::string> out;
             for (const auto& p : pl::save_models(s, c)) out.push_back(p.string());
             return out;
           })
      .def_static("load", &pl::load_models, py::arg("config"));

  m.def(
      "train", [](const pl::PipelineConfig& c) { return pl::train_offline(c); }, py::arg("config"),
      py::call_guard<py::gil_scoped_release>(), "Offline stage: fit models, H0 statistics and GLR settings.");

  m.def(
      "monitor",
      [](const pl::PipelineConfig& c, const pl::ModelSet& s, const Eigen::MatrixXd& samples,
         std::optional<double> fault_time, const std::optional<std::vector<std::string>>& channels,
         double sample_period) {
        const SignalMatrix run(samples, channel_set(channels), sample_period);
        const pl::MonitorResult r = pl::monitor_online(c, s, run, fault_time);
        py::dict out;
        out["summary"] = py::module_::import("json").attr("loads")(pl::summary_json(r));
        py::dict traces;
        for (const auto& d : r.detectors) traces[py::str(d.method + "_" + d.detector)] = trace_dict(d.trace);
        out["traces"] = traces;
        out["warnings"] = r.warnings;
        return out;
      },
      py::arg("config"), py::arg("models"), py::arg("samples"), py::arg("fault_time") = py::none(),
      py::arg("channels") = py::none(), py::arg("sample_period") = kDefaultSamplePeriod);

  m.def(
      "campaign",
      [](const pl::PipelineConfig& c, const pl::ModelSet& s) {
        std::vector<pl::CampaignResult> results;
        {
          py::gil_scoped_release release;
          results = pl::run_campaign(c, s);
        }
        py::list out;
        for (const auto& r : results) out.append(result_dict(r));
        return py::make_tuple(out, pl::report_csv(results));
      },
      py::arg("config"), py::arg("models"), "Fault-injection campaign: (rows, csv text).");
}
