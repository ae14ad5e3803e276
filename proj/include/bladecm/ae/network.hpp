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

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bladecm::ae {

using Index = Eigen::Index;

enum class LayerKind { Dense, Conv1D, Lstm, Flatten, Reshape };
enum class Activation { Tanh, Linear };

std::string_view to_string(LayerKind kind);

// One layer of a sequence network operating on (steps, channels) tensors.
//
// Dense acts on the channel axis of every step. Conv1D uses "same" zero
// padding, so it yields ceil(steps / stride) steps. LSTM returns its hidden
// state at every step and always uses the standard sigmoid/tanh gates.
// Flatten maps (T, C) to (1, T*C); Reshape regroups the same values.
struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  Index units = 0;  // Dense outputs, Conv1D filters, LSTM hidden size
  Index kernel = 1;
  Index stride = 1;
  Index steps = 0;     // Reshape target
  Index channels = 0;  // Reshape target
  Activation activation = Activation::Tanh;

  static LayerSpec dense(Index units, Activation act = Activation::Tanh);
  static LayerSpec conv1d(Index filters, Index kernel, Index stride = 1,
                          Activation act = Activation::Tanh);
  static LayerSpec lstm(Index hidden);
  static LayerSpec flatten();
  static LayerSpec reshape(Index steps, Index channels);

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Single-line text form used in model files, e.g. "conv1d 8 10 10 tanh".
std::string format_layer(const LayerSpec& spec);
LayerSpec parse_layer(std::string_view text);

struct Shape {
  Index steps = 0;
  Index channels = 0;
  Index size() const { return steps * channels; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Encoder-decoder stack that reconstructs its input.
//
// A batch is a (steps*channels) x B matrix: each column is one sample laid
// out time-major, the oldest step first. All parameter tensors live in one
// flat list in layer order:
//   Dense  W (units x C), b (units x 1)
//   Conv1D W (filters x kernel*C), column j*C + c for tap j and channel c; b
//   LSTM   W (4H x C), U (4H x H), b (4H x 1), gate blocks ordered i, f, g, o
class Network {
 public:
  // Throws ShapeMismatch unless every layer is well formed and the stack
  // maps `input` back to `input`. Parameters start at zero.
  Network(Shape input, std::vector<LayerSpec> layers);

  Shape input_shape() const { return input_; }
  const std::vector<LayerSpec>& layers() const { return specs_; }
  // Input shape of layer i; layer_shape(layers().size()) is the output.
  Shape layer_shape(std::size_t i) const { return shapes_[i]; }

  std::vector<Eigen::MatrixXd>& parameters() { return params_; }
  const std::vector<Eigen::MatrixXd>& parameters() const { return params_; }
  // Index of the layer owning parameter tensor p.
  std::size_t parameter_layer(std::size_t p) const { return param_layer_[p]; }
  Index scalar_parameter_count() const;
  bool all_finite() const;

  // Glorot-uniform weights from a seeded generator; zero biases except the
  // LSTM forget gate, which starts at one.
  void initialize(std::uint64_t seed);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& batch) const;

  // Mean over the batch of the squared reconstruction error, and its exact
  // gradient with respect to every parameter tensor.
  double loss_and_gradient(const Eigen::MatrixXd& batch, std::vector<Eigen::MatrixXd>& grads) const;

  // Activations after each layer, for inspection (layer i output at [i]).
  std::vector<Eigen::MatrixXd> activations(const Eigen::MatrixXd& batch) const;

 private:
  struct Cache;
  Eigen::MatrixXd run_forward(const Eigen::MatrixXd& batch, Cache* cache) const;

  Shape input_;
  std::vector<LayerSpec> specs_;
  std::vector<Shape> shapes_;
  std::vector<std::size_t> first_param_;
  std::vector<Eigen::MatrixXd> params_;
  std::vector<std::size_t> param_layer_;
};

// (1/n) * sum over samples of the squared error norm; columns are samples.
double mse_loss(const Eigen::MatrixXd& batch, const Eigen::MatrixXd& reconstruction);

// One LSTM step for a single sample (column vectors).
struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};
LstmState lstm_step(const Eigen::MatrixXd& w, const Eigen::MatrixXd& u, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& x, const LstmState& prev);

}  // namespace bladecm::ae
