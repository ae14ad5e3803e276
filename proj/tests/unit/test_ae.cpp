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

#include <cmath>

#include "../acceptance/oracles.hpp"
#include "bladecm/ae/model.hpp"
#include "bladecm/ae/network.hpp"
#include "bladecm/core/normalizer.hpp"
#include "bladecm/sim/turbine.hpp"
#include "test_util.hpp"

using namespace bladecm;
using namespace bladecm::ae;

namespace {

double worst_error(const Network& net, const Eigen::MatrixXd& batch) {
  double worst = 0.0;
  for (const auto& r : gradient_check(net, batch)) worst = std::max(worst, r.max_rel_error);
  return worst;
}

// AE model whose network is a single linear dense layer W = I, b = offset.
AeModel identity_model(Index window, double offset) {
  AeModel m;
  m.network = Network({window, 9}, {LayerSpec::dense(9, Activation::Linear)});
  m.network.parameters()[0] = Eigen::MatrixXd::Identity(9, 9);
  m.network.parameters()[1] = Eigen::VectorXd::Constant(9, offset);
  m.normalizer = NormalizerState(ChannelSet::autoencoder(), Eigen::VectorXd::Zero(9), Eigen::VectorXd::Ones(9));
  m.window = window;
  m.mae_threshold = 1.0;
  return m;
}

SignalMatrix ae_run(double wind, double duration, std::uint64_t seed) {
  sim::SimConfig c;
  c.mean_wind = wind;
  c.duration = duration;
  c.seed = seed;
  return sim::generate_healthy(c).data.select(ChannelSet::autoencoder());
}

}  // namespace

TEST(Network, ZeroWeightsGiveZeroOutput) {
  Network net({4, 3}, {LayerSpec::dense(5), LayerSpec::dense(3)});
  const Eigen::MatrixXd out = net.forward(testutil::gaussian(12, 2, 1));
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Network, IdentityDenseAndConv) {
  Network dense({5, 3}, {LayerSpec::dense(3, Activation::Linear)});
  dense.parameters()[0] = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::MatrixXd x = testutil::gaussian(15, 4, 2);
  EXPECT_EQ(dense.forward(x), x);

  Network conv({6, 1}, {LayerSpec::conv1d(1, 1, 1, Activation::Linear)});
  conv.parameters()[0](0, 0) = 1.0;
  const Eigen::MatrixXd s = testutil::gaussian(6, 3, 3);
  EXPECT_EQ(conv.forward(s), s);
}

TEST(Network, ShapeContractEnforcedAtConstruction) {
  EXPECT_ERRC(Network({4, 3}, {LayerSpec::dense(2)}), Errc::ShapeMismatch);
  EXPECT_ERRC(Network({4, 3}, {LayerSpec::flatten(), LayerSpec::reshape(5, 3)}), Errc::ShapeMismatch);
  EXPECT_NO_THROW(Network({100, 9}, default_architecture(100)));
  EXPECT_ERRC(default_architecture(95), Errc::InvalidConfig);
  Network net({4, 3}, {LayerSpec::dense(3)});
  EXPECT_ERRC(net.forward(Eigen::MatrixXd::Zero(11, 1)), Errc::ShapeMismatch);
}

TEST(Network, LayerTextRoundTrip) {
  for (const auto& spec : default_architecture(100)) EXPECT_EQ(parse_layer(format_layer(spec)), spec);
  EXPECT_EQ(format_layer(LayerSpec::conv1d(8, 10, 10)), "conv1d 8 10 10 tanh");
}

TEST(Network, TanhActivationsStayInsideUnitInterval) {
  Network net({20, 9}, default_architecture(20));
  net.initialize(4);
  const auto acts = net.activations(3.0 * testutil::gaussian(180, 8, 5));
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const auto& spec = net.layers()[i];
    const bool squashed = spec.kind == LayerKind::Lstm ||
        ((spec.kind == LayerKind::Dense || spec.kind == LayerKind::Conv1D) && spec.activation == Activation::Tanh);
    if (squashed) EXPECT_LT(acts[i].cwiseAbs().maxCoeff(), 1.0) << "layer " << i;
  }
}

TEST(Lstm, ZeroParameters) {
  const Index h = 3, c = 2;
  const auto s = lstm_step(Eigen::MatrixXd::Zero(4 * h, c), Eigen::MatrixXd::Zero(4 * h, h),
                           Eigen::VectorXd::Zero(4 * h), Eigen::VectorXd::Ones(c),
                           {Eigen::VectorXd::Zero(h), Eigen::VectorXd::Zero(h)});
  EXPECT_EQ(s.c.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.h.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lstm, SaturatedForgetGateKeepsCell) {
  const Index h = 2, c = 2;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(4 * h);
  b.segment(h, h).setConstant(50.0);
  const Eigen::VectorXd c_prev = Eigen::Vector2d(0.7, -1.3);
  const auto s = lstm_step(Eigen::MatrixXd::Zero(4 * h, c), Eigen::MatrixXd::Zero(4 * h, h), b,
                           Eigen::VectorXd::Zero(c), {Eigen::VectorXd::Zero(h), c_prev});
  EXPECT_LT((s.c - c_prev).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Lstm, MatchesScalarOracleOverThreeSteps) {
  const Index h = 4, c = 3;
  const Eigen::MatrixXd w = 0.5 * testutil::gaussian(4 * h, c, 6);
  const Eigen::MatrixXd u = 0.5 * testutil::gaussian(4 * h, h, 7);
  const Eigen::VectorXd b = 0.5 * testutil::gaussian(4 * h, 1, 8);
  const Eigen::MatrixXd xs = testutil::gaussian(c, 3, 9);
  LstmState s{Eigen::VectorXd::Zero(h), Eigen::VectorXd::Zero(h)};
  oracle::ScalarLstm ref{std::vector<double>(h, 0.0), std::vector<double>(h, 0.0)};
  for (Index t = 0; t < 3; ++t) {
    s = lstm_step(w, u, b, xs.col(t), s);
    ref = oracle::scalar_lstm_step(w, u, b, std::vector<double>(xs.col(t).data(), xs.col(t).data() + c), ref);
    for (Index j = 0; j < h; ++j) {
      EXPECT_NEAR(s.h(j), ref.h[j], 1e-12);
      EXPECT_NEAR(s.c(j), ref.c[j], 1e-12);
    }
  }
}

TEST(Loss, Examples) {
  const Eigen::MatrixXd x = testutil::gaussian(6, 4, 10);
  EXPECT_EQ(mse_loss(x, x), 0.0);
  EXPECT_DOUBLE_EQ(mse_loss(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Constant(1, 1, 2.0)), 4.0);
  const Eigen::MatrixXd y = testutil::gaussian(6, 4, 11);
  EXPECT_NEAR(mse_loss(x, y), oracle::naive_mse(x, y), 1e-12);
  EXPECT_ERRC(mse_loss(x, y.leftCols(3)), Errc::ShapeMismatch);
}

TEST(Backward, ZeroBatchZeroWeights) {
  Network net({8, 9}, compact_architecture(8, 9, 4));
  std::vector<Eigen::MatrixXd> grads;
  net.loss_and_gradient(Eigen::MatrixXd::Zero(72, 3), grads);
  for (const auto& g : grads) EXPECT_EQ(g.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, LinearDenseClosedForm) {
  Network net({1, 3}, {LayerSpec::dense(3, Activation::Linear)});
  net.parameters()[0] = testutil::gaussian(3, 3, 12);
  const Eigen::Vector3d x(0.3, -1.1, 2.0);
  std::vector<Eigen::MatrixXd> grads;
  net.loss_and_gradient(x, grads);
  const Eigen::MatrixXd& w = net.parameters()[0];
  const Eigen::MatrixXd expected = 2.0 * (w * x - x) * x.transpose();
  EXPECT_LT((grads[0] - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((grads[1] - 2.0 * (w * x - x)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Backward, FiniteDifferencesTenSeeds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Network net({8, 9}, compact_architecture(8, 9, 6));
    net.initialize(seed);
    const double err = worst_error(net, testutil::gaussian(72, 3, 100 + seed));
    EXPECT_LT(err, 1e-4) << "seed " << seed;
  }
}

TEST(Backward, IndependentDifferenceQuotient) {
  Network net({8, 9}, compact_architecture(8, 9, 5));
  net.initialize(21);
  const Eigen::MatrixXd batch = testutil::gaussian(72, 2, 22);
  std::vector<Eigen::MatrixXd> grads;
  net.loss_and_gradient(batch, grads);
  Network probe = net;
  const double h = 1e-5;
  for (std::size_t p = 0; p < grads.size(); ++p) {
    double& w = probe.parameters()[p].data()[0];
    const double saved = w;
    w = saved + h;
    const double up = oracle::naive_mse(batch, probe.forward(batch));
    w = saved - h;
    const double down = oracle::naive_mse(batch, probe.forward(batch));
    w = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(numeric), 1e-3 * grads[p].cwiseAbs().maxCoeff(), 1e-8});
    EXPECT_LT(std::abs(grads[p].data()[0] - numeric) / scale, 1e-4) << "tensor " << p;
  }
}

TEST(Training, FirstEpochIndependentOfEpochCount) {
  const SignalMatrix train = ae_run(9.0, 60.0, 1), val = ae_run(9.0, 20.0, 2);
  AeOptions opts;
  opts.window = 8;
  opts.train_hop = 4;
  opts.epochs = 1;
  const auto a = train_ae(train, val, compact_architecture(8, 9, 4), opts);
  opts.epochs = 2;
  const auto b = train_ae(train, val, compact_architecture(8, 9, 4), opts);
  ASSERT_EQ(a.second.train_loss.size(), 1u);
  ASSERT_EQ(b.second.train_loss.size(), 2u);
  EXPECT_EQ(a.second.train_loss[0], b.second.train_loss[0]);
  EXPECT_EQ(a.second.val_loss[0], b.second.val_loss[0]);
  const auto c = train_ae(train, val, compact_architecture(8, 9, 4), opts);
  EXPECT_EQ(c.second.train_loss, b.second.train_loss);
  EXPECT_EQ(c.first.network.parameters(), b.first.network.parameters());
  EXPECT_GT(a.first.mae_threshold, 0.0);
}

TEST(Training, MemorizesRepeatedWindow) {
  const Index window = 8, reps = 400;
  const Eigen::MatrixXd pattern = testutil::gaussian(window, 9, 23);
  Eigen::MatrixXd x(window * reps, 9);
  for (Index r = 0; r < reps; ++r) x.middleRows(r * window, window) = pattern;
  const SignalMatrix data(x, ChannelSet::autoencoder());
  AeOptions opts;
  opts.window = window;
  opts.train_hop = window;  // every training window is the same pattern
  opts.epochs = 200;
  opts.batch_size = 16;
  opts.learning_rate = 1e-2;
  const auto [model, report] = train_ae(data, data.slice(0, 4 * window), compact_architecture(window, 9, 6), opts);
  EXPECT_LT(report.train_loss.back(), 1e-4);
  EXPECT_LT(report.train_loss.back(), report.train_loss.front());
}

TEST(Training, DivergenceDetected) {
  const SignalMatrix train = ae_run(9.0, 30.0, 3);
  AeOptions opts;
  opts.window = 8;
  opts.epochs = 3;
  opts.learning_rate = 1e300;
  try {
    train_ae(train, train, compact_architecture(8, 9, 4), opts);
    ADD_FAILURE() << "training with a huge step did not fail";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == Errc::DivergedLoss || e.code() == Errc::NonFiniteWeights) << e.what();
  }
}

TEST(Mae, ExactReconstructionAndConstantOffset) {
  const SignalMatrix run = ae_run(9.0, 20.0, 4);
  const auto exact = mae_statistic(identity_model(10, 0.0), run);
  ASSERT_EQ(exact.raw.size(), static_cast<std::size_t>(run.rows()));
  for (std::size_t k = 0; k < exact.raw.size(); ++k) {
    EXPECT_EQ(exact.valid[k], k >= 9 ? 1 : 0);
    EXPECT_LT(exact.raw[k], 1e-9);
  }
  const auto shifted = mae_statistic(identity_model(10, -0.25), run);
  for (std::size_t k = 9; k < shifted.raw.size(); ++k) EXPECT_NEAR(shifted.raw[k], 0.25, 1e-9);
  EXPECT_NEAR(shifted.filtered.back(), 0.25, 1e-9);
  EXPECT_EQ(shifted.flags.back(), 0);
}
