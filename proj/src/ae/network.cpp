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

#include "bladecm/ae/network.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "bladecm/error.hpp"

namespace bladecm::ae {

namespace {

using Eigen::Map;
using Eigen::MatrixXd;

Index conv_out_steps(Index steps, Index stride) { return (steps + stride - 1) / stride; }

// Left zero padding for "same" convolution.
Index conv_pad_left(Index steps, Index kernel, Index stride) {
  const Index total = std::max<Index>((conv_out_steps(steps, stride) - 1) * stride + kernel - steps, 0);
  return total / 2;
}

MatrixXd sigmoid(const MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

std::string shape_text(Shape s) {
  return "(" + std::to_string(s.steps) + ", " + std::to_string(s.channels) + ")";
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Conv1D: return "conv1d";
    case LayerKind::Lstm: return "lstm";
    case LayerKind::Flatten: return "flatten";
    case LayerKind::Reshape: return "reshape";
  }
  return "?";
}

LayerSpec LayerSpec::dense(Index units, Activation act) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.units = units;
  s.activation = act;
  return s;
}

LayerSpec LayerSpec::conv1d(Index filters, Index kernel, Index stride, Activation act) {
  LayerSpec s;
  s.kind = LayerKind::Conv1D;
  s.units = filters;
  s.kernel = kernel;
  s.stride = stride;
  s.activation = act;
  return s;
}

LayerSpec LayerSpec::lstm(Index hidden) {
  LayerSpec s;
  s.kind = LayerKind::Lstm;
  s.units = hidden;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::Flatten;
  s.activation = Activation::Linear;
  return s;
}

LayerSpec LayerSpec::reshape(Index steps, Index channels) {
  LayerSpec s;
  s.kind = LayerKind::Reshape;
  s.steps = steps;
  s.channels = channels;
  s.activation = Activation::Linear;
  return s;
}

std::string format_layer(const LayerSpec& spec) {
  const char* act = spec.activation == Activation::Tanh ? "tanh" : "linear";
  std::ostringstream os;
  os << to_string(spec.kind);
  switch (spec.kind) {
    case LayerKind::Dense: os << ' ' << spec.units << ' ' << act; break;
    case LayerKind::Conv1D:
      os << ' ' << spec.units << ' ' << spec.kernel << ' ' << spec.stride << ' ' << act;
      break;
    case LayerKind::Lstm: os << ' ' << spec.units; break;
    case LayerKind::Flatten: break;
    case LayerKind::Reshape: os << ' ' << spec.steps << ' ' << spec.channels; break;
  }
  return os.str();
}

LayerSpec parse_layer(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string kind;
  is >> kind;
  auto read_act = [&] {
    std::string a;
    is >> a;
    if (a == "tanh") return Activation::Tanh;
    if (a == "linear") return Activation::Linear;
    raise(Errc::MalformedModel, "bad activation in layer '" + std::string(text) + "'");
  };
  LayerSpec s;
  if (kind == "dense") {
    Index units = 0;
    is >> units;
    s = LayerSpec::dense(units, read_act());
  } else if (kind == "conv1d") {
    Index f = 0, k = 0, st = 0;
    is >> f >> k >> st;
    s = LayerSpec::conv1d(f, k, st, read_act());
  } else if (kind == "lstm") {
    Index h = 0;
    is >> h;
    s = LayerSpec::lstm(h);
  } else if (kind == "flatten") {
    s = LayerSpec::flatten();
  } else if (kind == "reshape") {
    Index t = 0, c = 0;
    is >> t >> c;
    s = LayerSpec::reshape(t, c);
  } else {
    raise(Errc::MalformedModel, "unknown layer '" + std::string(text) + "'");
  }
  require(!is.fail(), Errc::MalformedModel, "malformed layer '" + std::string(text) + "'");
  std::string extra;
  require(!(is >> extra), Errc::MalformedModel, "trailing text in layer '" + std::string(text) + "'");
  return s;
}

Network::Network(Shape input, std::vector<LayerSpec> layers)
    : input_(input), specs_(std::move(layers)) {
  require(input_.steps >= 1 && input_.channels >= 1, Errc::ShapeMismatch, "empty input shape");
  require(!specs_.empty(), Errc::ShapeMismatch, "network has no layers");
  Shape s = input_;
  shapes_.push_back(s);
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& l = specs_[i];
    const std::string where = "layer " + std::to_string(i) + " (" + format_layer(l) + ")";
    first_param_.push_back(params_.size());
    switch (l.kind) {
      case LayerKind::Dense:
        require(l.units >= 1, Errc::ShapeMismatch, where + ": units must be positive");
        params_.emplace_back(MatrixXd::Zero(l.units, s.channels));
        params_.emplace_back(MatrixXd::Zero(l.units, 1));
        s = {s.steps, l.units};
        break;
      case LayerKind::Conv1D:
        require(l.units >= 1 && l.kernel >= 1 && l.stride >= 1, Errc::ShapeMismatch,
                where + ": filters, kernel and stride must be positive");
        params_.emplace_back(MatrixXd::Zero(l.units, l.kernel * s.channels));
        params_.emplace_back(MatrixXd::Zero(l.units, 1));
        s = {conv_out_steps(s.steps, l.stride), l.units};
        break;
      case LayerKind::Lstm:
        require(l.units >= 1, Errc::ShapeMismatch, where + ": hidden size must be positive");
        params_.emplace_back(MatrixXd::Zero(4 * l.units, s.channels));
        params_.emplace_back(MatrixXd::Zero(4 * l.units, l.units));
        params_.emplace_back(MatrixXd::Zero(4 * l.units, 1));
        s = {s.steps, l.units};
        break;
      case LayerKind::Flatten:
        s = {1, s.size()};
        break;
      case LayerKind::Reshape:
        require(l.steps >= 1 && l.channels >= 1 && l.steps * l.channels == s.size(),
                Errc::ShapeMismatch,
                where + ": cannot reshape " + shape_text(s) + " to " +
                    shape_text({l.steps, l.channels}));
        s = {l.steps, l.channels};
        break;
    }
    for (std::size_t p = first_param_.back(); p < params_.size(); ++p) param_layer_.push_back(i);
    shapes_.push_back(s);
  }
  first_param_.push_back(params_.size());
  require(s == input_, Errc::ShapeMismatch,
          "stack maps " + shape_text(input_) + " to " + shape_text(s) + "; a reconstruction is required");
}

Index Network::scalar_parameter_count() const {
  Index n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

bool Network::all_finite() const {
  for (const auto& p : params_) {
    if (!p.allFinite()) return false;
  }
  return true;
}

void Network::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto glorot = [&rng](MatrixXd& w, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Index j = 0; j < w.cols(); ++j) {
      for (Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
    }
  };
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& l = specs_[i];
    const Shape in = shapes_[i];
    const std::size_t p = first_param_[i];
    switch (l.kind) {
      case LayerKind::Dense:
        glorot(params_[p], static_cast<double>(in.channels), static_cast<double>(l.units));
        params_[p + 1].setZero();
        break;
      case LayerKind::Conv1D:
        glorot(params_[p], static_cast<double>(l.kernel * in.channels),
               static_cast<double>(l.kernel * l.units));
        params_[p + 1].setZero();
        break;
      case LayerKind::Lstm:
        glorot(params_[p], static_cast<double>(in.channels), static_cast<double>(4 * l.units));
        glorot(params_[p + 1], static_cast<double>(l.units), static_cast<double>(4 * l.units));
        params_[p + 2].setZero();
        params_[p + 2].middleRows(l.units, l.units).setOnes();
        break;
      case LayerKind::Flatten:
      case LayerKind::Reshape:
        break;
    }
  }
}

struct Network::Cache {
  struct LstmTape {
    std::vector<MatrixXd> i, f, g, o, c, tc;
  };
  std::vector<MatrixXd> inputs;
  std::vector<MatrixXd> outputs;
  std::vector<MatrixXd> columns;  // conv im2col buffers
  std::vector<LstmTape> lstm;
};

MatrixXd Network::run_forward(const MatrixXd& batch, Cache* cache) const {
  require(batch.rows() == input_.size(), Errc::ShapeMismatch,
          "batch rows " + std::to_string(batch.rows()) + " != input size " +
              std::to_string(input_.size()));
  require(batch.cols() >= 1, Errc::ShapeMismatch, "empty batch");
  require(batch.allFinite(), Errc::NonFiniteInput, "batch contains non-finite values");
  require(all_finite(), Errc::NonFiniteWeights, "network weights are not finite");
  const Index batch_size = batch.cols();
  if (cache) {
    cache->inputs.resize(specs_.size());
    cache->outputs.resize(specs_.size());
    cache->columns.resize(specs_.size());
    cache->lstm.resize(specs_.size());
  }

  MatrixXd x = batch;
  for (std::size_t li = 0; li < specs_.size(); ++li) {
    const LayerSpec& l = specs_[li];
    const Shape in = shapes_[li];
    const Shape out = shapes_[li + 1];
    const std::size_t p = first_param_[li];
    MatrixXd y;
    switch (l.kind) {
      case LayerKind::Dense: {
        y.resize(out.size(), batch_size);
        Map<const MatrixXd> xm(x.data(), in.channels, in.steps * batch_size);
        Map<MatrixXd> ym(y.data(), out.channels, out.steps * batch_size);
        ym.noalias() = params_[p] * xm;
        ym.colwise() += params_[p + 1].col(0);
        if (l.activation == Activation::Tanh) ym = ym.array().tanh();
        break;
      }
      case LayerKind::Conv1D: {
        const Index c = in.channels;
        const Index pad = conv_pad_left(in.steps, l.kernel, l.stride);
        MatrixXd cols = MatrixXd::Zero(l.kernel * c, out.steps * batch_size);
        for (Index b = 0; b < batch_size; ++b) {
          for (Index t = 0; t < out.steps; ++t) {
            const Index start = t * l.stride - pad;
            const Index j0 = std::max<Index>(0, -start);
            const Index j1 = std::min<Index>(l.kernel, in.steps - start);
            if (j1 > j0) {
              cols.col(b * out.steps + t).segment(j0 * c, (j1 - j0) * c) =
                  x.col(b).segment((start + j0) * c, (j1 - j0) * c);
            }
          }
        }
        y.resize(out.size(), batch_size);
        Map<MatrixXd> ym(y.data(), out.channels, out.steps * batch_size);
        ym.noalias() = params_[p] * cols;
        ym.colwise() += params_[p + 1].col(0);
        if (l.activation == Activation::Tanh) ym = ym.array().tanh();
        if (cache) cache->columns[li] = std::move(cols);
        break;
      }
      case LayerKind::Lstm: {
        const Index h_dim = l.units;
        const Index c = in.channels;
        const MatrixXd& w = params_[p];
        const MatrixXd& u = params_[p + 1];
        const auto bias = params_[p + 2].col(0);
        MatrixXd h = MatrixXd::Zero(h_dim, batch_size);
        MatrixXd cell = MatrixXd::Zero(h_dim, batch_size);
        y.resize(out.size(), batch_size);
        Cache::LstmTape* tape = cache ? &cache->lstm[li] : nullptr;
        if (tape) *tape = {};
        MatrixXd gates(4 * h_dim, batch_size);
        for (Index t = 0; t < in.steps; ++t) {
          gates.noalias() = w * x.middleRows(t * c, c);
          gates.noalias() += u * h;
          gates.colwise() += bias;
          MatrixXd gi = sigmoid(gates.topRows(h_dim));
          MatrixXd gf = sigmoid(gates.middleRows(h_dim, h_dim));
          MatrixXd gg = gates.middleRows(2 * h_dim, h_dim).array().tanh();
          MatrixXd go = sigmoid(gates.bottomRows(h_dim));
          cell = gf.cwiseProduct(cell) + gi.cwiseProduct(gg);
          MatrixXd tc = cell.array().tanh();
          h = go.cwiseProduct(tc);
          y.middleRows(t * h_dim, h_dim) = h;
          if (tape) {
            tape->i.push_back(std::move(gi));
            tape->f.push_back(std::move(gf));
            tape->g.push_back(std::move(gg));
            tape->o.push_back(std::move(go));
            tape->c.push_back(cell);
            tape->tc.push_back(std::move(tc));
          }
        }
        break;
      }
      case LayerKind::Flatten:
      case LayerKind::Reshape:
        y = x;
        break;
    }
    if (cache) {
      cache->inputs[li] = std::move(x);
      cache->outputs[li] = y;
    }
    x = std::move(y);
  }
  return x;
}

MatrixXd Network::forward(const MatrixXd& batch) const { return run_forward(batch, nullptr); }

std::vector<MatrixXd> Network::activations(const MatrixXd& batch) const {
  Cache cache;
  run_forward(batch, &cache);
  return cache.outputs;
}

double Network::loss_and_gradient(const MatrixXd& batch, std::vector<MatrixXd>& grads) const {
  Cache cache;
  const MatrixXd recon = run_forward(batch, &cache);
  const Index batch_size = batch.cols();
  const MatrixXd diff = recon - batch;
  const double loss = diff.squaredNorm() / static_cast<double>(batch_size);

  grads.resize(params_.size());
  for (std::size_t p = 0; p < params_.size(); ++p) grads[p] = MatrixXd::Zero(params_[p].rows(), params_[p].cols());

  MatrixXd dy = (2.0 / static_cast<double>(batch_size)) * diff;
  for (std::size_t li = specs_.size(); li-- > 0;) {
    const LayerSpec& l = specs_[li];
    const Shape in = shapes_[li];
    const Shape out = shapes_[li + 1];
    const std::size_t p = first_param_[li];
    const MatrixXd& x = cache.inputs[li];
    const MatrixXd& y = cache.outputs[li];
    MatrixXd dx;
    switch (l.kind) {
      case LayerKind::Dense: {
        MatrixXd dz = dy;
        if (l.activation == Activation::Tanh) dz.array() *= 1.0 - y.array().square();
        Map<const MatrixXd> dzm(dz.data(), out.channels, out.steps * batch_size);
        Map<const MatrixXd> xm(x.data(), in.channels, in.steps * batch_size);
        grads[p].noalias() += dzm * xm.transpose();
        grads[p + 1].noalias() += dzm.rowwise().sum();
        dx.resize(in.size(), batch_size);
        Map<MatrixXd> dxm(dx.data(), in.channels, in.steps * batch_size);
        dxm.noalias() = params_[p].transpose() * dzm;
        break;
      }
      case LayerKind::Conv1D: {
        MatrixXd dz = dy;
        if (l.activation == Activation::Tanh) dz.array() *= 1.0 - y.array().square();
        Map<const MatrixXd> dzm(dz.data(), out.channels, out.steps * batch_size);
        const MatrixXd& cols = cache.columns[li];
        grads[p].noalias() += dzm * cols.transpose();
        grads[p + 1].noalias() += dzm.rowwise().sum();
        const MatrixXd dcols = params_[p].transpose() * dzm;
        const Index c = in.channels;
        const Index pad = conv_pad_left(in.steps, l.kernel, l.stride);
        dx = MatrixXd::Zero(in.size(), batch_size);
        for (Index b = 0; b < batch_size; ++b) {
          for (Index t = 0; t < out.steps; ++t) {
            const Index start = t * l.stride - pad;
            const Index j0 = std::max<Index>(0, -start);
            const Index j1 = std::min<Index>(l.kernel, in.steps - start);
            if (j1 > j0) {
              dx.col(b).segment((start + j0) * c, (j1 - j0) * c) +=
                  dcols.col(b * out.steps + t).segment(j0 * c, (j1 - j0) * c);
            }
          }
        }
        break;
      }
      case LayerKind::Lstm: {
        const Index h_dim = l.units;
        const Index c = in.channels;
        const MatrixXd& w = params_[p];
        const MatrixXd& u = params_[p + 1];
        const Cache::LstmTape& tape = cache.lstm[li];
        MatrixXd dh_next = MatrixXd::Zero(h_dim, batch_size);
        MatrixXd dc_next = MatrixXd::Zero(h_dim, batch_size);
        MatrixXd dz(4 * h_dim, batch_size);
        dx.resize(in.size(), batch_size);
        for (Index t = in.steps; t-- > 0;) {
          const auto ts = static_cast<std::size_t>(t);
          const MatrixXd& gi = tape.i[ts];
          const MatrixXd& gf = tape.f[ts];
          const MatrixXd& gg = tape.g[ts];
          const MatrixXd& go = tape.o[ts];
          const MatrixXd& tc = tape.tc[ts];
          const MatrixXd dh = dy.middleRows(t * h_dim, h_dim) + dh_next;
          const MatrixXd dc =
              dh.cwiseProduct(go).cwiseProduct((1.0 - tc.array().square()).matrix()) + dc_next;
          dz.topRows(h_dim) = dc.cwiseProduct(gg).array() * gi.array() * (1.0 - gi.array());
          if (t > 0) {
            dz.middleRows(h_dim, h_dim) =
                dc.cwiseProduct(tape.c[ts - 1]).array() * gf.array() * (1.0 - gf.array());
          } else {
            dz.middleRows(h_dim, h_dim).setZero();
          }
          dz.middleRows(2 * h_dim, h_dim) = dc.cwiseProduct(gi).array() * (1.0 - gg.array().square());
          dz.bottomRows(h_dim) = dh.cwiseProduct(tc).array() * go.array() * (1.0 - go.array());
          dc_next = dc.cwiseProduct(gf);

          grads[p].noalias() += dz * x.middleRows(t * c, c).transpose();
          if (t > 0) grads[p + 1].noalias() += dz * y.middleRows((t - 1) * h_dim, h_dim).transpose();
          grads[p + 2].noalias() += dz.rowwise().sum();
          dh_next.noalias() = u.transpose() * dz;
          dx.middleRows(t * c, c).noalias() = w.transpose() * dz;
        }
        break;
      }
      case LayerKind::Flatten:
      case LayerKind::Reshape:
        dx = std::move(dy);
        break;
    }
    dy = std::move(dx);
  }
  return loss;
}

double mse_loss(const MatrixXd& batch, const MatrixXd& reconstruction) {
  require(batch.rows() == reconstruction.rows() && batch.cols() == reconstruction.cols(),
          Errc::ShapeMismatch, "batch and reconstruction shapes differ");
  require(batch.cols() >= 1, Errc::ShapeMismatch, "empty batch");
  return (batch - reconstruction).squaredNorm() / static_cast<double>(batch.cols());
}

LstmState lstm_step(const MatrixXd& w, const MatrixXd& u, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& x, const LstmState& prev) {
  const Index h_dim = u.cols();
  require(u.rows() == 4 * h_dim && w.rows() == 4 * h_dim && b.size() == 4 * h_dim &&
              w.cols() == x.size() && prev.h.size() == h_dim && prev.c.size() == h_dim,
          Errc::ShapeMismatch, "inconsistent LSTM step shapes");
  const Eigen::VectorXd z = w * x + u * prev.h + b;
  auto logistic = [](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return (1.0 + (-v.array()).exp()).inverse().matrix();
  };
  const Eigen::VectorXd i = logistic(z.segment(0, h_dim));
  const Eigen::VectorXd f = logistic(z.segment(h_dim, h_dim));
  const Eigen::VectorXd g = z.segment(2 * h_dim, h_dim).array().tanh();
  const Eigen::VectorXd o = logistic(z.segment(3 * h_dim, h_dim));
  LstmState next;
  next.c = f.cwiseProduct(prev.c) + i.cwiseProduct(g);
  next.h = o.cwiseProduct(next.c.array().tanh().matrix());
  return next;
}

}  // namespace bladecm::ae
