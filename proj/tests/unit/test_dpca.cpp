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
#include "bladecm/core/embedding.hpp"
#include "bladecm/core/normalizer.hpp"
#include "bladecm/dpca/dpca.hpp"
#include "bladecm/dpca/filters.hpp"
#include "bladecm/dpca/spectral.hpp"
#include "bladecm/sim/turbine.hpp"
#include "test_util.hpp"

using namespace bladecm;
using namespace bladecm::dpca;

namespace {

ChannelSet names(Index m) {
  std::vector<std::string> v;
  for (Index i = 0; i < m; ++i) v.push_back("c" + std::to_string(i));
  return ChannelSet(v);
}

// Model with the given orthonormal loadings and an identity normalizer.
DpcaModel model_with(const Eigen::MatrixXd& p, Index m, Index window) {
  DpcaModel model;
  model.normalizer = NormalizerState(names(m), Eigen::VectorXd::Zero(m), Eigen::VectorXd::Ones(m));
  model.window = window;
  model.loadings = p;
  model.eigenvalues = Eigen::VectorXd::Ones(p.rows());
  model.spe_threshold = 1.0;
  return model;
}

Eigen::MatrixXd orthonormal(Index d, Index l, std::uint64_t seed) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(testutil::gaussian(d, l, seed));
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, l);
}

}  // namespace

TEST(Eigen, IdentityAndDiagonal) {
  auto e = symmetric_eigendecomposition(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_LT((e.values - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((e.vectors.transpose() * e.vectors - Eigen::Matrix3d::Identity()).norm(), 1e-12);

  Eigen::Matrix2d d;
  d << 1, 0, 0, 4;
  e = symmetric_eigendecomposition(d);
  EXPECT_DOUBLE_EQ(e.values(0), 4.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
  EXPECT_EQ(e.vectors.col(0), Eigen::Vector2d(0, 1));  // sign convention: largest entry positive
  EXPECT_EQ(e.vectors.col(1), Eigen::Vector2d(1, 0));
}

TEST(Eigen, SmallCasesMatchJacobi) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::MatrixXd s = testutil::random_symmetric(4, seed);
    const auto e = symmetric_eigendecomposition(s);
    const auto ref = oracle::jacobi_eigenvalues(s);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.values(i), ref[i], 1e-10);
  }
}

TEST(Eigen, LargeReconstructionAndDeterminism) {
  const Eigen::MatrixXd s = testutil::random_symmetric(50, 77);
  const auto e = symmetric_eigendecomposition(s);
  const Eigen::MatrixXd rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LE((s - rebuilt).norm(), 1e-8 * s.norm());
  EXPECT_LE((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(50, 50)).cwiseAbs().maxCoeff(), 1e-10);
  for (Index i = 1; i < 50; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
  const auto again = symmetric_eigendecomposition(s);
  EXPECT_EQ(again.vectors, e.vectors);
}

TEST(Eigen, RejectsAsymmetric) {
  Eigen::Matrix2d a;
  a << 1, 2, 0, 1;
  EXPECT_ERRC(symmetric_eigendecomposition(a), Errc::NotSymmetric);
}

TEST(SelectComponents, Examples) {
  EXPECT_EQ(select_components(std::vector<double>{9, 1}, 0.9), 1);
  EXPECT_EQ(select_components(std::vector<double>{5, 3, 2}, 0.9), 3);
  EXPECT_ERRC(select_components(std::vector<double>{0, 0}, 0.9), Errc::AllZeroSpectrum);
}

TEST(SelectComponents, MonotoneInTarget) {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> ex(1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(20);
    for (double& x : v) x = ex(rng);
    std::sort(v.begin(), v.end(), std::greater<>());
    Index prev = 0;
    for (double cv = 0.05; cv <= 1.0; cv += 0.05) {
      const Index l = select_components(v, cv);
      EXPECT_GE(l, prev);
      prev = l;
    }
  }
}

TEST(Lowpass, Examples) {
  const std::vector<double> c(10, 3.5);
  for (double y : lowpass(c, 0.9)) EXPECT_DOUBLE_EQ(y, 3.5);
  const auto y = lowpass(std::vector<double>{1, 0, 0}, 0.5);
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], 0.5);
  EXPECT_DOUBLE_EQ(y[2], 0.25);
  LowPass lp(0.5);
  EXPECT_DOUBLE_EQ(lp.push(1.0), 1.0);
  EXPECT_DOUBLE_EQ(lp.push(0.0), 0.5);
}

TEST(Lowpass, WhiteNoiseVarianceMatchesAr1) {
  const double alpha = 0.9;
  const Eigen::MatrixXd u = testutil::gaussian(200000, 1, 4);
  const auto y = lowpass(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())), alpha);
  const auto [mean, sd] = oracle::two_pass(std::span<const double>(y).subspan(1000));
  const double expected = (1.0 - alpha) / (1.0 + alpha);
  EXPECT_NEAR(sd * sd, expected, 0.1 * expected);
}

TEST(Quantile, Examples) {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  EXPECT_DOUBLE_EQ(quantile_threshold(v, 0.01), 99.0);
  EXPECT_DOUBLE_EQ(quantile_threshold(std::vector<double>{7.5}, 0.3), 7.5);
  EXPECT_ERRC(quantile_threshold(std::vector<double>{}, 0.01), Errc::EmptyInput);
}

TEST(Quantile, GaussianTailAndOracle) {
  const Eigen::MatrixXd g = testutil::gaussian(100000, 1, 5);
  const std::vector<double> v(g.data(), g.data() + g.size());
  const double q = quantile_threshold(v, 0.01);
  EXPECT_NEAR(q, 2.326, 0.05);
  EXPECT_EQ(q, oracle::nearest_rank(v, 0.01));
  for (double pf : {0.5, 0.1, 0.033, 0.001}) EXPECT_EQ(quantile_threshold(v, pf), oracle::nearest_rank(v, pf));
}

TEST(Spe, MatchesNaiveLoopAndIdentities) {
  const Index m = 3, window = 4, d = m * window;
  const Eigen::MatrixXd p = orthonormal(d, 1, 6);
  const auto model = model_with(p, m, window);
  const Eigen::MatrixXd xs = testutil::gaussian(d, 20, 7);
  for (Index j = 0; j < xs.cols(); ++j) {
    const Eigen::VectorXd x = xs.col(j);
    const double s = spe(model, x);
    EXPECT_NEAR(s, oracle::naive_spe(p, x), 1e-12 * x.squaredNorm());
    EXPECT_NEAR(s + (p * p.transpose() * x).squaredNorm(), x.squaredNorm(), 1e-10 * x.squaredNorm());
  }
  const Eigen::VectorXd inside = p * 2.5;
  EXPECT_LT(spe(model, inside), 1e-12);
  const auto full = model_with(orthonormal(d, d, 8), m, window);
  EXPECT_LT(spe(full, xs.col(0)), 1e-12 * xs.col(0).squaredNorm());
  EXPECT_ERRC(spe(model, Eigen::VectorXd::Zero(d + 1)), Errc::DimensionMismatch);
  const Eigen::MatrixXd proj = p * p.transpose();
  EXPECT_LT((proj * proj - proj).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitDpca, LowRankDataKeepsTwoComponents) {
  const Index m = 6, n = 400;
  const Eigen::MatrixXd loadings = testutil::gaussian(2, m, 9);
  const Eigen::MatrixXd scores = testutil::gaussian(n, 2, 10);
  const SignalMatrix data(scores * loadings, names(m));
  DpcaOptions opts;
  opts.window = 1;
  opts.cv_target = 0.99;
  const auto model = fit_dpca(data, Region::II, opts);
  EXPECT_EQ(model.retained(), 2);
  const Eigen::MatrixXd z = normalize(data, model.normalizer).samples();
  const Eigen::VectorXd s = spe_rows(model, z);
  EXPECT_LT(s.maxCoeff(), 1e-16 * z.squaredNorm() / n);
  EXPECT_LT((model.loadings.transpose() * model.loadings - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitDpca, TrainingExceedanceAtMostPf) {
  const SignalMatrix data(testutil::gaussian(3000, 3, 11), names(3));
  DpcaOptions opts;
  opts.window = 5;
  opts.pf = 0.01;
  const auto model = fit_dpca(data, Region::III, opts);
  EXPECT_EQ(model.embedded_dim(), 15);
  const Eigen::MatrixXd z = normalize(data, model.normalizer).samples();
  const Eigen::VectorXd raw = spe_windows(model, z, opts.window - 1, data.rows() - opts.window + 1);
  const auto filtered = lowpass(std::span<const double>(raw.data(), static_cast<std::size_t>(raw.size())), opts.lpf_alpha);
  const auto above = std::count_if(filtered.begin(), filtered.end(), [&](double v) { return v > model.spe_threshold; });
  EXPECT_LE(static_cast<double>(above) / filtered.size(), 0.01);
  for (Index i = 1; i < model.eigenvalues.size(); ++i) EXPECT_GE(model.eigenvalues(i - 1), model.eigenvalues(i));
  EXPECT_GE(model.eigenvalues.minCoeff(), 0.0);
}

TEST(FitDpca, EmbeddedDimensionForFullChannelSet) {
  sim::SimConfig c;
  c.mean_wind = 9.0;
  c.duration = 300.0;
  const auto run = sim::generate_healthy(c);
  const auto model = fit_dpca(run.data, Region::III, DpcaOptions{});
  EXPECT_EQ(model.embedded_dim(), 1200);
  EXPECT_EQ(model.eigenvalues.size(), 1200);
  EXPECT_ERRC(fit_dpca(run.data.slice(0, 500), Region::III, DpcaOptions{}), Errc::InsufficientData);
}

TEST(FitDpca, ConstantChannelRejected) {
  Eigen::MatrixXd x = testutil::gaussian(200, 2, 12);
  x.col(1).setConstant(4.0);
  DpcaOptions opts;
  opts.window = 2;
  EXPECT_ERRC(fit_dpca(SignalMatrix(x, names(2)), Region::II, opts), Errc::ZeroVarianceChannel);
}

TEST(DpcaMonitor, RegionOneEmitsNothingAndWarmupRespected) {
  sim::SimConfig c;
  c.mean_wind = 9.0;
  c.duration = 300.0;
  const auto train = sim::generate_healthy(c);
  DpcaOptions opts;
  opts.window = 10;
  DpcaModelSet models;
  for (Region r : kMonitoredRegions) models.emplace(r, fit_dpca(train.data, r, opts));

  c.mean_wind = 1.5;
  c.duration = 60.0;
  const auto idle = sim::generate_healthy(c);
  const auto tr = dpca_monitor(models, idle.data, idle.regions);
  for (std::size_t k = 0; k < tr.valid.size(); ++k) {
    EXPECT_EQ(tr.valid[k], 0);
    EXPECT_EQ(tr.flags[k], 0);
    EXPECT_EQ(tr.raw[k], 0.0);
  }

  const auto busy = dpca_monitor(models, train.data, train.regions);
  for (const auto& run : region_runs(busy.regions)) {
    for (Index k = run.begin; k < std::min(run.end, run.begin + opts.window - 1); ++k) EXPECT_EQ(busy.valid[k], 0);
    if (run.length() >= opts.window) EXPECT_EQ(busy.valid[run.begin + opts.window - 1], 1);
  }
  for (std::size_t k = 0; k < busy.flags.size(); ++k) {
    EXPECT_EQ(busy.flags[k], busy.valid[k] && busy.filtered[k] > busy.threshold[k] ? 1 : 0);
  }

  DpcaModelSet partial = models;
  partial.erase(Region::III);
  EXPECT_ERRC(dpca_monitor(partial, train.data, train.regions), Errc::MissingModel);
}
