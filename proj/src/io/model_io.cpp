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

#include "bladecm/io/model_io.hpp"

#include "bladecm/error.hpp"

namespace bladecm::io {

namespace {

void write_header(Document& doc, const char* type) {
  doc.set("", "format", kModelFormatName);
  doc.set("", "version", std::to_string(kModelFormatVersion));
  doc.set("", "type", type);
}

void check_header(const Document& doc, const char* type) {
  require(doc.find("", "format") == std::string(kModelFormatName), Errc::MalformedModel,
          doc.origin() + ": not a model file");
  const auto version = parse_integer(doc.get("", "version"), "version");
  require(version == kModelFormatVersion, Errc::ModelVersionMismatch,
          doc.origin() + ": model version " + std::to_string(version) + ", expected " +
              std::to_string(kModelFormatVersion));
  require(doc.get("", "type") == type, Errc::MalformedModel,
          doc.origin() + ": expected a " + std::string(type) + " model, found " +
              doc.get("", "type"));
}

std::string join_channels(const ChannelSet& c) {
  std::string out;
  for (const auto& n : c.names()) out += (out.empty() ? "" : ",") + n;
  return out;
}

ChannelSet split_channels(const std::string& s) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = std::min(s.find(',', pos), s.size());
    names.push_back(s.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return ChannelSet(std::move(names));
}

void write_normalizer(Document& doc, const NormalizerState& n) {
  doc.set("normalizer", "channels", join_channels(n.channels()));
  doc.set("normalizer", "mean", format_vector(n.mean()));
  doc.set("normalizer", "stddev", format_vector(n.stddev()));
}

NormalizerState read_normalizer(const Document& doc) {
  return NormalizerState(split_channels(doc.get("normalizer", "channels")),
                         parse_vector(doc.get("normalizer", "mean"), "normalizer mean"),
                         parse_vector(doc.get("normalizer", "stddev"), "normalizer stddev"));
}

void write_glr(Document& doc, const std::optional<glr::GlrConfig>& glr) {
  if (!glr) return;
  doc.set("glr", "mu0", format_exact(glr->mu0));
  doc.set("glr", "sigma", format_exact(glr->sigma));
  doc.set("glr", "window", std::to_string(glr->window));
  doc.set("glr", "threshold", format_exact(glr->threshold));
}

std::optional<glr::GlrConfig> read_glr(const Document& doc) {
  if (!doc.has_section("glr")) return std::nullopt;
  glr::GlrConfig g;
  g.mu0 = parse_number(doc.get("glr", "mu0"), "glr mu0");
  g.sigma = parse_number(doc.get("glr", "sigma"), "glr sigma");
  g.window = parse_integer(doc.get("glr", "window"), "glr window");
  g.threshold = parse_number(doc.get("glr", "threshold"), "glr threshold");
  return g;
}

}  // namespace

Document to_document(const dpca::DpcaModel& model) {
  model.validate();
  Document doc;
  write_header(doc, "dpca");
  doc.set("model", "region", std::string(to_string(model.region)));
  doc.set("model", "window", std::to_string(model.window));
  doc.set("model", "retained", std::to_string(model.retained()));
  doc.set("model", "spe_threshold", format_exact(model.spe_threshold));
  doc.set("model", "lpf_alpha", format_exact(model.lpf_alpha));
  write_normalizer(doc, model.normalizer);
  doc.set("arrays", "eigenvalues", format_vector(model.eigenvalues));
  doc.set("arrays", "loadings", format_matrix(model.loadings));
  write_glr(doc, model.glr);
  return doc;
}

dpca::DpcaModel dpca_from_document(const Document& doc) {
  check_header(doc, "dpca");
  dpca::DpcaModel m;
  m.region = parse_region(doc.get("model", "region"));
  m.window = parse_integer(doc.get("model", "window"), "window");
  m.spe_threshold = parse_number(doc.get("model", "spe_threshold"), "spe_threshold");
  m.lpf_alpha = parse_number(doc.get("model", "lpf_alpha"), "lpf_alpha");
  m.normalizer = read_normalizer(doc);
  m.eigenvalues = parse_vector(doc.get("arrays", "eigenvalues"), "eigenvalues");
  m.loadings = parse_matrix(doc.get("arrays", "loadings"), "loadings");
  m.glr = read_glr(doc);
  require(m.retained() == parse_integer(doc.get("model", "retained"), "retained"),
          Errc::MalformedModel, doc.origin() + ": retained count disagrees with loadings");
  m.validate();
  return m;
}

Document to_document(const ae::AeModel& model) {
  model.validate();
  Document doc;
  write_header(doc, "ae");
  const auto& net = model.network;
  doc.set("model", "window", std::to_string(model.window));
  doc.set("model", "mae_threshold", format_exact(model.mae_threshold));
  doc.set("model", "lpf_alpha", format_exact(model.lpf_alpha));
  doc.set("training", "epochs", std::to_string(model.epochs));
  doc.set("training", "seed", std::to_string(model.seed));
  doc.set("training", "final_train_loss", format_exact(model.final_train_loss));
  doc.set("training", "final_val_loss", format_exact(model.final_val_loss));
  write_normalizer(doc, model.normalizer);
  doc.set("network", "input", std::to_string(net.input_shape().steps) + ' ' +
                                  std::to_string(net.input_shape().channels));
  doc.set("network", "layers", std::to_string(net.layers().size()));
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    doc.set("network", "layer" + std::to_string(i), ae::format_layer(net.layers()[i]));
  }
  const auto& params = net.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    doc.set("weights", "p" + std::to_string(p), format_matrix(params[p]));
  }
  write_glr(doc, model.glr);
  for (const auto& [r, h0] : model.region_h0) {
    doc.set("h0", std::string(to_string(r)), format_exact(h0.mean) + ' ' + format_exact(h0.stddev));
  }
  return doc;
}

ae::AeModel ae_from_document(const Document& doc) {
  check_header(doc, "ae");
  ae::AeModel m;
  m.window = parse_integer(doc.get("model", "window"), "window");
  m.mae_threshold = parse_number(doc.get("model", "mae_threshold"), "mae_threshold");
  m.lpf_alpha = parse_number(doc.get("model", "lpf_alpha"), "lpf_alpha");
  m.epochs = static_cast<int>(parse_integer(doc.get("training", "epochs"), "epochs"));
  m.seed = std::stoull(doc.get("training", "seed"));
  m.final_train_loss = parse_number(doc.get("training", "final_train_loss"), "final_train_loss");
  m.final_val_loss = parse_number(doc.get("training", "final_val_loss"), "final_val_loss");
  m.normalizer = read_normalizer(doc);

  const std::string& input = doc.get("network", "input");
  const auto space = input.find(' ');
  require(space != std::string::npos, Errc::MalformedModel, doc.origin() + ": bad network input");
  const ae::Shape shape{parse_integer(input.substr(0, space), "input steps"),
                        parse_integer(input.substr(space + 1), "input channels")};
  const auto count = parse_integer(doc.get("network", "layers"), "layer count");
  std::vector<ae::LayerSpec> layers;
  for (long long i = 0; i < count; ++i) {
    layers.push_back(ae::parse_layer(doc.get("network", "layer" + std::to_string(i))));
  }
  m.network = ae::Network(shape, std::move(layers));
  auto& params = m.network.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    Eigen::MatrixXd w = parse_matrix(doc.get("weights", "p" + std::to_string(p)), "weights");
    require(w.rows() == params[p].rows() && w.cols() == params[p].cols(), Errc::MalformedModel,
            doc.origin() + ": weight tensor p" + std::to_string(p) + " has the wrong shape");
    params[p] = std::move(w);
  }
  m.glr = read_glr(doc);
  if (doc.has_section("h0")) {
    for (Region r : kAllRegions) {
      const std::string key(to_string(r));
      const std::optional<std::string> entry = doc.find("h0", key);
      if (!entry) continue;
      const std::string& text = *entry;
      const auto sp = text.find(' ');
      require(sp != std::string::npos, Errc::MalformedModel, doc.origin() + ": bad h0 entry " + key);
      const glr::H0Stats h0{parse_number(text.substr(0, sp), "h0 mean"),
                            parse_number(text.substr(sp + 1), "h0 stddev")};
      require(h0.stddev > 0.0, Errc::MalformedModel, doc.origin() + ": h0 stddev must be positive");
      m.region_h0[r] = h0;
    }
  }
  m.validate();
  return m;
}

void save_model(const dpca::DpcaModel& model, const std::filesystem::path& path) {
  to_document(model).write(path);
}

void save_model(const ae::AeModel& model, const std::filesystem::path& path) {
  to_document(model).write(path);
}

dpca::DpcaModel load_dpca_model(const std::filesystem::path& path) {
  return dpca_from_document(Document::read(path));
}

ae::AeModel load_ae_model(const std::filesystem::path& path) {
  return ae_from_document(Document::read(path));
}

std::string model_type(const std::filesystem::path& path) {
  return Document::read(path).get("", "type");
}

std::string format_train_report(const ae::TrainReport& report) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < report.train_loss.size(); ++e) {
    out += std::to_string(e + 1) + ',' + format_exact(report.train_loss[e]) + ',' +
           format_exact(report.val_loss[e]) + '\n';
  }
  return out;
}

}  // namespace bladecm::io
