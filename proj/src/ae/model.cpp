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

#include "bladecm/ae/model.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>

#include "bladecm/core/embedding.hpp"
#include "bladecm/dpca/filters.hpp"
#include "bladecm/error.hpp"

namespace bladecm::ae {

namespace {

constexpr Index kChunk = 10;        // conv kernel and stride of the default stack
constexpr Index kEvalBlock = 256;   // windows per forward pass when scoring

double mean_batch_loss(const Network& net, const Eigen::MatrixXd& windows) {
  double total = 0.0;
  for (Index start = 0; start < windows.cols(); start += kEvalBlock) {
    const Index n = std::min(kEvalBlock, windows.cols() - start);
    const Eigen::MatrixXd block = windows.middleCols(start, n);
    total += (net.forward(block) - block).squaredNorm();
  }
  return total / static_cast<double>(windows.cols());
}

}  // namespace

void AeOptions::validate() const {
  require(window >= 1, Errc::InvalidConfig, "window must be positive");
  require(epochs >= 1, Errc::InvalidConfig, "epochs must be at least 1");
  require(batch_size >= 1, Errc::InvalidConfig, "batch size must be positive");
  require(train_hop >= 1, Errc::InvalidConfig, "training hop must be positive");
  require(learning_rate > 0.0 && beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 &&
              epsilon > 0.0,
          Errc::InvalidConfig, "bad optimizer settings");
  require(pf > 0.0 && pf < 1.0, Errc::InvalidConfig, "pf must be in (0, 1)");
  require(lpf_alpha > 0.0 && lpf_alpha < 1.0, Errc::InvalidConfig, "lpf_alpha must be in (0, 1)");
}

void AeModel::validate() const {
  require(network.all_finite(), Errc::NonFiniteWeights, "network weights are not finite");
  require(window >= 1 && network.input_shape() == Shape{window, channel_count()},
          Errc::ShapeMismatch, "network input does not match window and channels");
  require(std::isfinite(mae_threshold) && mae_threshold > 0.0, Errc::MalformedModel,
          "MAE threshold must be positive");
  require(lpf_alpha > 0.0 && lpf_alpha < 1.0, Errc::MalformedModel, "lpf_alpha out of range");
  if (glr) glr->validate();
}

std::vector<LayerSpec> default_architecture(Index window, Index channels) {
  require(window >= kChunk && window % kChunk == 0, Errc::InvalidConfig,
          "default autoencoder needs a window that is a multiple of 10");
  require(channels >= 1, Errc::InvalidConfig, "channels must be positive");
  const Index steps = window / kChunk;
  const Index hidden = 16;
  return {
      LayerSpec::conv1d(8, kChunk, kChunk, Activation::Tanh),
      LayerSpec::lstm(hidden),
      LayerSpec::flatten(),
      LayerSpec::dense(12, Activation::Tanh),
      LayerSpec::dense(hidden * steps, Activation::Tanh),
      LayerSpec::reshape(steps, hidden),
      LayerSpec::lstm(hidden),
      LayerSpec::dense(kChunk * channels, Activation::Linear),
      LayerSpec::reshape(window, channels),
  };
}

std::vector<LayerSpec> compact_architecture(Index window, Index channels, Index width) {
  require(window >= 2 && window % 2 == 0, Errc::InvalidConfig, "compact autoencoder needs an even window");
  require(channels >= 1 && width >= 1, Errc::InvalidConfig, "channels and width must be positive");
  const Index steps = window / 2;
  return {
      LayerSpec::conv1d(width, 2, 2, Activation::Tanh),
      LayerSpec::lstm(width),
      LayerSpec::flatten(),
      LayerSpec::dense(width, Activation::Tanh),
      LayerSpec::dense(width * steps, Activation::Tanh),
      LayerSpec::reshape(steps, width),
      LayerSpec::lstm(width),
      LayerSpec::dense(2 * channels, Activation::Linear),
      LayerSpec::reshape(window, channels),
  };
}

Eigen::MatrixXd window_batch(const Eigen::MatrixXd& normalized, Index window, Index first_end,
                             Index count, Index hop) {
  return embed_columns(normalized, window, first_end, count, hop);
}

std::pair<AeModel, TrainReport> train_ae(const SignalMatrix& train, const SignalMatrix& val,
                                         const std::vector<LayerSpec>& layers,
                                         const AeOptions& opts) {
  return train_ae(std::span<const SignalMatrix>(&train, 1), std::span<const SignalMatrix>(&val, 1),
                  layers, opts);
}

std::pair<AeModel, TrainReport> train_ae(std::span<const SignalMatrix> train,
                                         std::span<const SignalMatrix> val,
                                         const std::vector<LayerSpec>& layers,
                                         const AeOptions& opts) {
  opts.validate();
  require(!train.empty() && !val.empty(), Errc::InsufficientData,
          "training and validation data are required");
  for (const auto& v : val) {
    require(v.channels() == train.front().channels(), Errc::ChannelMismatch,
            "training and validation channels differ");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Index w = opts.window;

  AeModel model;
  model.network = Network(Shape{w, train.front().cols()}, layers);
  model.normalizer = fit_normalizer(train);
  model.window = w;
  model.lpf_alpha = opts.lpf_alpha;
  model.epochs = opts.epochs;
  model.seed = opts.seed;
  model.network.initialize(opts.seed);

  auto gather = [&](std::span<const SignalMatrix> parts) {
    std::vector<Eigen::MatrixXd> pieces;
    Index total = 0;
    for (const auto& part : parts) {
      if (part.rows() < w) continue;
      const Eigen::MatrixXd x = model.normalizer.apply(part.samples());
      pieces.push_back(window_batch(x, w, w - 1, (part.rows() - w) / opts.train_hop + 1, opts.train_hop));
      total += pieces.back().cols();
    }
    require(total >= 1, Errc::InsufficientData, "no piece holds a full window");
    Eigen::MatrixXd all(w * model.channel_count(), total);
    Index at = 0;
    for (const auto& p : pieces) {
      all.middleCols(at, p.cols()) = p;
      at += p.cols();
    }
    return all;
  };
  const Eigen::MatrixXd train_windows = gather(train);
  const Eigen::MatrixXd val_windows = gather(val);
  const Index n = train_windows.cols();

  auto& params = model.network.parameters();
  std::vector<Eigen::MatrixXd> m1, m2, grads;
  for (const auto& p : params) {
    m1.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    m2.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
  }

  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  TrainReport report;
  report.seed = opts.seed;
  double b1t = 1.0, b2t = 1.0;
  Eigen::MatrixXd batch;
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (Index start = 0; start < n; start += opts.batch_size) {
      const Index b = std::min(opts.batch_size, n - start);
      batch.resize(train_windows.rows(), b);
      for (Index j = 0; j < b; ++j) batch.col(j) = train_windows.col(order[static_cast<std::size_t>(start + j)]);
      const double loss = model.network.loss_and_gradient(batch, grads);
      require(std::isfinite(loss), Errc::DivergedLoss,
              "training loss became non-finite in epoch " + std::to_string(epoch + 1));
      epoch_loss += loss * static_cast<double>(b);
      b1t *= opts.beta1;
      b2t *= opts.beta2;
      const double step = opts.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
      for (std::size_t p = 0; p < params.size(); ++p) {
        m1[p] = opts.beta1 * m1[p] + (1.0 - opts.beta1) * grads[p];
        m2[p] = opts.beta2 * m2[p] + (1.0 - opts.beta2) * grads[p].cwiseAbs2();
        params[p].array() -= step * m1[p].array() / (m2[p].array().sqrt() + opts.epsilon);
      }
    }
    require(model.network.all_finite(), Errc::NonFiniteWeights,
            "weights became non-finite in epoch " + std::to_string(epoch + 1));
    report.train_loss.push_back(epoch_loss / static_cast<double>(n));
    report.val_loss.push_back(mean_batch_loss(model.network, val_windows));
  }
  model.final_train_loss = report.train_loss.back();
  model.final_val_loss = report.val_loss.back();

  std::vector<double> filtered;
  for (const auto& part : train) {
    if (part.rows() < w) continue;
    const Eigen::MatrixXd x = model.normalizer.apply(part.samples());
    const Eigen::VectorXd mae = mae_windows(model, x, w - 1, part.rows() - w + 1);
    dpca::LowPass lpf(opts.lpf_alpha);
    for (Index i = 0; i < mae.size(); ++i) filtered.push_back(lpf.push(mae(i)));
  }
  model.mae_threshold = dpca::quantile_threshold(filtered, opts.pf);
  if (!(model.mae_threshold > 0.0)) model.mae_threshold = std::numeric_limits<double>::min();

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(model), std::move(report)};
}

Eigen::VectorXd mae_windows(const AeModel& model, const Eigen::MatrixXd& normalized,
                            Index first_end, Index count) {
  require(normalized.cols() == model.channel_count(), Errc::DimensionMismatch,
          "channel count does not match model");
  Eigen::VectorXd out(count);
  const double scale = 1.0 / static_cast<double>(model.window * model.channel_count());
  for (Index start = 0; start < count; start += kEvalBlock) {
    const Index n = std::min(kEvalBlock, count - start);
    const Eigen::MatrixXd x = window_batch(normalized, model.window, first_end + start, n);
    out.segment(start, n) =
        scale * (model.network.forward(x) - x).cwiseAbs().colwise().sum().transpose();
  }
  return out;
}

MaeTrace mae_statistic(const AeModel& model, const SignalMatrix& run) {
  const SignalMatrix sel = run.select(model.normalizer.channels());
  const auto n = static_cast<std::size_t>(run.rows());
  MaeTrace trace;
  trace.raw.assign(n, 0.0);
  trace.filtered.assign(n, 0.0);
  trace.valid.assign(n, 0);
  trace.flags.assign(n, 0);
  trace.threshold = model.mae_threshold;
  if (run.rows() < model.window) return trace;
  const Eigen::MatrixXd x = model.normalizer.apply(sel.samples());
  const Index first_end = model.window - 1;
  const Eigen::VectorXd mae = mae_windows(model, x, first_end, run.rows() - first_end);
  dpca::LowPass lpf(model.lpf_alpha);
  for (Index i = 0; i < mae.size(); ++i) {
    const auto k = static_cast<std::size_t>(first_end + i);
    trace.raw[k] = mae(i);
    trace.filtered[k] = lpf.push(mae(i));
    trace.valid[k] = 1;
    trace.flags[k] = trace.filtered[k] > model.mae_threshold ? 1 : 0;
  }
  return trace;
}

std::vector<GradCheckResult> gradient_check(const Network& net, const Eigen::MatrixXd& batch,
                                            double step, Index max_entries_per_tensor) {
  std::vector<Eigen::MatrixXd> grads;
  net.loss_and_gradient(batch, grads);
  Network probe = net;
  auto& params = probe.parameters();
  std::vector<GradCheckResult> results;
  for (std::size_t p = 0; p < params.size(); ++p) {
    GradCheckResult r;
    r.parameter = p;
    r.layer = net.parameter_layer(p);
    r.kind = net.layers()[r.layer].kind;
    const Index total = params[p].size();
    // Entries far below the tensor's scale only measure round-off in the
    // difference quotient, so the denominator is floored relative to it.
    const double floor = std::max(1e-3 * grads[p].cwiseAbs().maxCoeff(), 1e-8);
    const Index stride =
        max_entries_per_tensor > 0 ? std::max<Index>(1, total / max_entries_per_tensor) : 1;
    for (Index e = 0; e < total; e += stride) {
      double& w = params[p].data()[e];
      const double saved = w;
      w = saved + step;
      const double up = mse_loss(batch, probe.forward(batch));
      w = saved - step;
      const double down = mse_loss(batch, probe.forward(batch));
      w = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = grads[p].data()[e];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      r.max_rel_error = std::max(r.max_rel_error, std::abs(analytic - numeric) / denom);
      ++r.checked;
    }
    results.push_back(r);
  }
  return results;
}

}  // namespace bladecm::ae
