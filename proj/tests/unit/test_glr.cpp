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
#include <random>

#include "../acceptance/oracles.hpp"
#include "bladecm/glr/glr.hpp"
#include "test_util.hpp"

using namespace bladecm;
using namespace bladecm::glr;

namespace {

std::vector<double> normal_stream(std::size_t n, double mu, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mu, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(GlrStatistic, ConstantAtMeanIsZero) {
  const std::vector<double> z(500, 3.5);
  for (double g : glr_statistic(z, 3.5, 0.7, 50)) EXPECT_EQ(g, 0.0);
}

TEST(GlrStatistic, PersistentShiftClosedForm) {
  const double mu0 = 1.0, sigma = 0.5, delta = 0.3;
  const Index m = 40;
  const std::vector<double> z(300, mu0 + delta);
  const auto g = glr_statistic(z, mu0, sigma, m);
  const double expected = m * delta * delta / (2 * sigma * sigma);
  for (Index k = m - 1; k < 300; ++k) EXPECT_NEAR(g[k], expected, 1e-9 * expected);
  // Truncated window at the start.
  EXPECT_NEAR(g[9], 10 * delta * delta / (2 * sigma * sigma), 1e-12);
}

TEST(GlrStatistic, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto z = normal_stream(700, 0.2, 1.3, seed);
    const auto g = glr_statistic(z, 0.2, 1.3, 60);
    const auto ref = oracle::brute_force_glr(z, 0.2, 1.3, 60);
    EXPECT_LT(max_abs_diff(g, ref), 1e-12) << "seed " << seed;
    for (double v : g) EXPECT_GE(v, 0.0);
  }
}

TEST(GlrStatistic, StreamingEqualsBatch) {
  const auto z = normal_stream(1000, -0.4, 2.0, 11);
  const auto batch = glr_statistic(z, -0.4, 2.0, 75);
  GlrStream s(-0.4, 2.0, 75);
  std::vector<double> stream;
  for (double x : z) stream.push_back(s.push(x));
  EXPECT_LT(max_abs_diff(stream, batch), 1e-12);
  s.reset();
  EXPECT_EQ(s.push(z[0]), batch[0]);
}

TEST(GlrStatistic, ScaleConsistent) {
  const auto z = normal_stream(800, 0.0, 1.0, 5);
  const double a = 3.7, b = -12.0;
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = a * z[i] + b;
  const auto g1 = glr_statistic(z, 0.1, 0.9, 100);
  const auto g2 = glr_statistic(y, a * 0.1 + b, a * 0.9, 100);
  for (std::size_t k = 0; k < g1.size(); ++k) {
    EXPECT_LE(std::abs(g1[k] - g2[k]), 1e-10 * std::max(1.0, std::abs(g1[k])));
  }
}

TEST(GlrStatistic, NestedWindowsDominateChiSquare) {
  // P(2 g(k) > 3.841) >= 0.05 because g is a max over nested windows.
  int above = 0;
  const int runs = 400;
  for (int r = 0; r < runs; ++r) {
    const auto z = normal_stream(600, 0.0, 1.0, 1000 + r);
    const auto g = glr_statistic(z, 0.0, 1.0, 600);
    if (2 * g.back() > 3.841) ++above;
  }
  EXPECT_GT(above, runs * 0.05);
}

TEST(GlrStatistic, Errors) {
  std::vector<double> z(10, 0.0);
  z[4] = std::nan("");
  EXPECT_ERRC(glr_statistic(z, 0.0, 1.0, 5), Errc::NonFiniteInput);
  EXPECT_ERRC((GlrConfig{0.0, 0.0, 10, 1.0}.validate()), Errc::InvalidConfig);
  EXPECT_ERRC((GlrConfig{0.0, 1.0, 0, 1.0}.validate()), Errc::InvalidConfig);
  EXPECT_ERRC((GlrConfig{0.0, 1.0, 10, 0.0}.validate()), Errc::InvalidConfig);
}

TEST(EstimateH0, Examples) {
  std::vector<double> alt;
  for (int i = 0; i < 1000; ++i) alt.push_back(i % 2 ? 2.0 : 0.0);
  const H0Stats h = estimate_h0(alt);
  EXPECT_NEAR(h.mean, 1.0, 1e-15);
  EXPECT_NEAR(h.stddev, std::sqrt(1000.0 / 999.0), 1e-12);

  const H0Stats flat = estimate_h0(std::vector<double>(1000, 4.0));
  EXPECT_EQ(flat.stddev, 0.0);
  EXPECT_ERRC((GlrConfig{flat.mean, flat.stddev, 10, 1.0}.validate()), Errc::InvalidConfig);

  EXPECT_ERRC(estimate_h0(std::vector<double>(999, 1.0)), Errc::InsufficientData);
}

TEST(EstimateH0, TwoPassOracle) {
  const auto z = normal_stream(5000, 1e3, 0.01, 9);
  const H0Stats h = estimate_h0(z);
  const auto [mean, sd] = oracle::two_pass(z);
  EXPECT_NEAR(h.mean, mean, 1e-12 * std::abs(mean));
  EXPECT_NEAR(h.stddev, sd, 1e-12 * sd);
}

TEST(Calibration, LargeShiftStopsAtInitialWindow) {
  CalibrationOptions o;
  o.runs = 200;
  o.run_length = 1500;
  o.onset = 500;
  const GlrConfig c = calibrate_glr(0.0, 1.0, 10.0, o);
  EXPECT_EQ(c.window, 100);
  EXPECT_GT(c.threshold, 0.0);
}

TEST(Calibration, TargetsHoldOnFreshRuns) {
  CalibrationOptions o;
  o.runs = 1000;
  o.run_length = 1000;
  o.onset = 300;
  o.initial_window = 25;
  o.seed = 3;
  const GlrConfig c = calibrate_glr(0.25, 0.25, 0.5, o);

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> n(0.0, 1.0);
  int fa = 0, det = 0;
  const int runs = 1000;
  for (int r = 0; r < runs; ++r) {
    GlrStream h0(c.mu0, c.sigma, c.window), h1(c.mu0, c.sigma, c.window);
    bool a0 = false, a1 = false;
    for (Index k = 0; k < o.run_length; ++k) {
      const double e = 0.25 * n(rng);
      a0 |= h0.push(0.25 + e) > c.threshold;
      const double g1 = h1.push((k >= o.onset ? 0.5 : 0.25) + e);
      a1 |= k >= o.onset && g1 > c.threshold;
    }
    fa += a0;
    det += a1;
  }
  EXPECT_GE(fa, 3);
  EXPECT_LE(fa, 30);
  EXPECT_GE(det, 985);
}

TEST(Calibration, Errors) {
  CalibrationOptions o;
  o.runs = 50;
  o.run_length = 150;
  o.onset = 50;
  EXPECT_ERRC(calibrate_glr(0.0, 1.0, 0.01, o), Errc::NoFeasibleWindow);
  EXPECT_ERRC(calibrate_glr(1.0, 1.0, 0.5, o), Errc::InvalidConfig);
}

TEST(CalibrateStreams, UsesRecordedStreams) {
  std::vector<CalibrationStream> streams;
  for (std::uint64_t i = 0; i < 200; ++i) {
    CalibrationStream s;
    s.z = normal_stream(1200, 0.0, 1.0, 500 + i);
    s.shift.assign(s.z.size(), 1.0);
    s.onset = 400;
    streams.push_back(std::move(s));
  }
  const StreamCalibration c = calibrate_glr_streams(streams, 0.01, 0.99, 50);
  EXPECT_EQ(c.window, 50);
  EXPECT_GE(c.detection_rate, 0.99);
  // h is the nearest-rank quantile of the per-run maxima at the chosen M.
  std::vector<double> maxima;
  for (const auto& s : streams) {
    const auto g = glr_statistic(s.z, 0.0, 1.0, c.window);
    maxima.push_back(*std::max_element(g.begin(), g.end()));
  }
  EXPECT_NEAR(c.threshold, oracle::nearest_rank(maxima, 0.01), 1e-12);
}

TEST(Detect, NoAlarms) {
  const auto t = detect(std::vector<double>(100, 0.0), 1.0, Index{50});
  EXPECT_TRUE(t.alarms.empty());
  EXPECT_FALSE(t.detected);
  EXPECT_FALSE(t.false_alarm);
  EXPECT_FALSE(t.first_alarm.has_value());
}

TEST(Detect, StepIsStrongDetection) {
  std::vector<double> g(100, 0.0);
  for (int k = 50; k < 100; ++k) g[k] = 2.0;
  const auto t = detect(g, 1.0, Index{50});
  EXPECT_TRUE(t.detected);
  EXPECT_TRUE(t.strongly_detected);
  EXPECT_FALSE(t.false_alarm);
  ASSERT_EQ(t.alarms.size(), 1u);
  EXPECT_EQ(t.alarms[0], 50);
  EXPECT_EQ(t.first_detection(), Index{50});
}

TEST(Detect, DipMakesWeakDetection) {
  std::vector<double> g(100, 0.0);
  for (int k = 60; k < 70; ++k) g[k] = 2.0;
  for (int k = 80; k < 100; ++k) g[k] = 2.0;
  const auto t = detect(g, 1.0, Index{50});
  EXPECT_TRUE(t.detected);
  EXPECT_FALSE(t.strongly_detected);
  EXPECT_EQ(t.alarms, (std::vector<Index>{60, 80}));
}

TEST(Detect, PreFaultAlarmIsFalseAlarm) {
  std::vector<double> g(100, 0.0);
  g[10] = 5.0;
  const auto t = detect(g, 1.0, Index{50});
  EXPECT_TRUE(t.false_alarm);
  EXPECT_FALSE(t.detected);
  EXPECT_EQ(t.first_alarm, Index{10});
  EXPECT_TRUE(detect(g, 1.0).false_alarm);
}

TEST(Detect, AboveAtFaultCountsAsDetection) {
  std::vector<double> g(100, 2.0);
  const auto t = detect(g, 1.0, Index{50});
  EXPECT_TRUE(t.false_alarm);
  EXPECT_TRUE(t.detected);
  EXPECT_TRUE(t.strongly_detected);
  EXPECT_EQ(t.first_detection(), Index{50});
}

TEST(Detect, InvalidSamplesAreSkipped) {
  std::vector<double> g(20, 2.0);
  std::vector<double> h(20, 1.0);
  std::vector<std::uint8_t> valid(20, 1);
  for (int k = 0; k < 5; ++k) valid[k] = 0;
  g[10] = 0.0;
  valid[10] = 0;
  const auto t = detect(g, h, valid, std::nullopt);
  EXPECT_EQ(t.alarms, (std::vector<Index>{5}));
}

TEST(Detect, Pure) {
  const auto g = normal_stream(300, 0.0, 1.0, 2);
  const auto a = detect(g, 1.5, Index{100});
  const auto b = detect(g, 1.5, Index{100});
  EXPECT_EQ(a.alarms, b.alarms);
  EXPECT_EQ(a.strongly_detected, b.strongly_detected);
  EXPECT_EQ(a.statistic, b.statistic);
  for (std::size_t i = 1; i < a.alarms.size(); ++i) EXPECT_LT(a.alarms[i - 1], a.alarms[i]);
}
