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

#include "bladecm/dpca/dpca.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bladecm/core/embedding.hpp"
#include "bladecm/dpca/filters.hpp"
#include "bladecm/dpca/spectral.hpp"
#include "bladecm/error.hpp"

namespace bladecm::dpca {

namespace {

// Rows per block when embedding long segments; bounds peak memory.
constexpr Index kBlockRows = 2048;

}  // namespace

void DpcaModel::validate() const {
  const Index dim = channel_count() * window;
  require(window >= 1, Errc::MalformedModel, "window must be positive");
  require(loadings.rows() == dim && eigenvalues.size() == dim, Errc::MalformedModel,
          "loadings/eigenvalues do not match channels * window");
  require(retained() >= 1 && retained() <= dim, Errc::MalformedModel, "bad retained count");
  require(loadings.allFinite() && eigenvalues.allFinite(), Errc::NonFiniteWeights,
          "model contains non-finite numbers");
  require(std::isfinite(spe_threshold) && spe_threshold > 0.0, Errc::MalformedModel,
          "SPE threshold must be positive");
  require(lpf_alpha > 0.0 && lpf_alpha < 1.0, Errc::MalformedModel, "lpf_alpha out of range");
  if (glr) glr->validate();
}

DpcaModel fit_dpca(std::span<const SignalMatrix> segments, Region region, const DpcaOptions& opts) {
  require(!segments.empty(), Errc::InsufficientData, "no training segments");
  require(opts.window >= 1, Errc::InvalidConfig, "window must be positive");
  require(opts.lpf_alpha > 0.0 && opts.lpf_alpha < 1.0, Errc::InvalidConfig,
          "lpf_alpha must be in (0, 1)");

  const NormalizerState norm = fit_normalizer(segments);
  const Index m = static_cast<Index>(norm.channels().size());
  const Index dim = m * opts.window;

  std::vector<Eigen::MatrixXd> normalized;
  Index rows = 0;
  for (const auto& seg : segments) {
    if (seg.rows() < opts.window) continue;
    normalized.push_back(norm.apply(seg.samples()));
    rows += seg.rows() - opts.window + 1;
  }
  require(rows >= dim + 1, Errc::InsufficientData,
          "need at least " + std::to_string(dim + 1) + " embedded rows, have " +
              std::to_string(rows));

  // Lower triangle of X_d^T X_d, accumulated block by block.
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& x : normalized) {
    const Index count = x.rows() - opts.window + 1;
    for (Index start = 0; start < count; start += kBlockRows) {
      const Index block = std::min(kBlockRows, count - start);
      const Eigen::MatrixXd xd = embed_rows(x, opts.window, opts.window - 1 + start, block);
      cov.selfadjointView<Eigen::Lower>().rankUpdate(xd.transpose());
    }
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= static_cast<double>(rows - 1);

  EigenDecomposition eig = symmetric_eigendecomposition(cov);
  eig.values = eig.values.cwiseMax(0.0);
  const Index l = select_components(eig.values, opts.cv_target);

  DpcaModel model;
  model.region = region;
  model.normalizer = norm;
  model.window = opts.window;
  model.loadings = eig.vectors.leftCols(l);
  model.eigenvalues = std::move(eig.values);
  model.lpf_alpha = opts.lpf_alpha;

  std::vector<double> filtered;
  filtered.reserve(static_cast<std::size_t>(rows));
  for (const auto& x : normalized) {
    const Index count = x.rows() - opts.window + 1;
    const Eigen::VectorXd s = spe_windows(model, x, opts.window - 1, count);
    LowPass lpf(opts.lpf_alpha);
    for (Index i = 0; i < s.size(); ++i) filtered.push_back(lpf.push(s(i)));
  }
  model.spe_threshold = quantile_threshold(filtered, opts.pf);
  // A perfectly reconstructed training set still needs a usable threshold.
  if (!(model.spe_threshold > 0.0)) model.spe_threshold = std::numeric_limits<double>::min();
  return model;
}

DpcaModel fit_dpca(const SignalMatrix& train, Region region, const DpcaOptions& opts) {
  return fit_dpca(std::span<const SignalMatrix>(&train, 1), region, opts);
}

double spe(const DpcaModel& model, const Eigen::Ref<const Eigen::VectorXd>& row) {
  require(row.size() == model.embedded_dim(), Errc::DimensionMismatch,
          "row length " + std::to_string(row.size()) + " != " +
              std::to_string(model.embedded_dim()));
  const Eigen::VectorXd residual = row - model.loadings * (model.loadings.transpose() * row);
  return residual.squaredNorm();
}

Eigen::VectorXd spe_rows(const DpcaModel& model, const Eigen::MatrixXd& rows) {
  require(rows.cols() == model.embedded_dim(), Errc::DimensionMismatch,
          "embedded row width does not match model");
  const Eigen::MatrixXd scores = rows * model.loadings;
  return (rows - scores * model.loadings.transpose()).rowwise().squaredNorm();
}

Eigen::VectorXd spe_windows(const DpcaModel& model, const Eigen::MatrixXd& normalized,
                            Index first_end, Index count) {
  require(normalized.cols() == model.channel_count(), Errc::DimensionMismatch,
          "channel count does not match model");
  Eigen::VectorXd out(count);
  for (Index start = 0; start < count; start += kBlockRows) {
    const Index block = std::min(kBlockRows, count - start);
    out.segment(start, block) =
        spe_rows(model, embed_rows(normalized, model.window, first_end + start, block));
  }
  return out;
}

SpeTrace dpca_monitor(const DpcaModelSet& models, const SignalMatrix& run,
                      const RegionBoundaries& bounds) {
  const auto labels = segment_regions(run, bounds);
  return dpca_monitor(models, run, labels);
}

SpeTrace dpca_monitor(const DpcaModelSet& models, const SignalMatrix& run,
                      std::span<const Region> labels) {
  require(static_cast<Index>(labels.size()) == run.rows(), Errc::DimensionMismatch,
          "one region label per sample required");
  for (Region r : kMonitoredRegions) {
    require(models.contains(r), Errc::MissingModel,
            "no dPCA model for region " + std::string(to_string(r)));
  }
  const auto n = static_cast<std::size_t>(run.rows());
  SpeTrace trace;
  trace.raw.assign(n, 0.0);
  trace.filtered.assign(n, 0.0);
  trace.threshold.assign(n, 0.0);
  trace.valid.assign(n, 0);
  trace.flags.assign(n, 0);
  trace.regions.assign(labels.begin(), labels.end());

  // Normalized copies are made once per model that is actually visited.
  std::map<Region, Eigen::MatrixXd> normalized;
  for (const RegionRun& rr : region_runs(labels)) {
    if (rr.region == Region::I) continue;
    const DpcaModel& model = models.at(rr.region);
    for (Index k = rr.begin; k < rr.end; ++k) trace.threshold[static_cast<std::size_t>(k)] = model.spe_threshold;
    if (rr.length() < model.window) continue;
    auto it = normalized.find(rr.region);
    if (it == normalized.end()) {
      it = normalized.emplace(rr.region, model.normalizer.apply(
                                             run.select(model.normalizer.channels()).samples()))
               .first;
    }
    const Index first_end = rr.begin + model.window - 1;
    const Eigen::VectorXd s = spe_windows(model, it->second, first_end, rr.end - first_end);
    LowPass lpf(model.lpf_alpha);
    for (Index i = 0; i < s.size(); ++i) {
      const auto k = static_cast<std::size_t>(first_end + i);
      trace.raw[k] = s(i);
      trace.filtered[k] = lpf.push(s(i));
      trace.valid[k] = 1;
      trace.flags[k] = trace.filtered[k] > model.spe_threshold ? 1 : 0;
    }
  }
  return trace;
}

}  // namespace bladecm::dpca
