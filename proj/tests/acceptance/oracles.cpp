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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, double tol, int max_sweeps) {
  const long n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (long i = 0; i < n; ++i) {
      diag += a(i, i) * a(i, i);
      for (long j = 0; j < n; ++j) {
        if (i != j) off += a(i, j) * a(i, j);
      }
    }
    if (off <= tol * tol * std::max(diag, 1e-300)) break;
    for (long p = 0; p < n - 1; ++p) {
      for (long q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (long k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (long k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double naive_spe(const Eigen::MatrixXd& p, const Eigen::VectorXd& x) {
  const long d = p.rows(), l = p.cols();
  std::vector<double> score(static_cast<std::size_t>(l), 0.0);
  for (long j = 0; j < l; ++j) {
    for (long i = 0; i < d; ++i) score[static_cast<std::size_t>(j)] += p(i, j) * x(i);
  }
  double total = 0.0;
  for (long i = 0; i < d; ++i) {
    double proj = 0.0;
    for (long j = 0; j < l; ++j) proj += p(i, j) * score[static_cast<std::size_t>(j)];
    const double e = x(i) - proj;
    total += e * e;
  }
  return total;
}

std::vector<double> brute_force_glr(std::span<const double> z, double mu0, double sigma, long window) {
  const long n = static_cast<long>(z.size());
  std::vector<double> g(z.size(), 0.0);
  for (long k = 0; k < n; ++k) {
    double best = 0.0;
    for (long j = std::max(0L, k - window + 1); j <= k; ++j) {
      double sum = 0.0;
      for (long i = j; i <= k; ++i) sum += z[static_cast<std::size_t>(i)] - mu0;
      best = std::max(best, sum * sum / (2.0 * sigma * sigma * static_cast<double>(k - j + 1)));
    }
    g[static_cast<std::size_t>(k)] = best;
  }
  return g;
}

ScalarLstm scalar_lstm_step(const Eigen::MatrixXd& w, const Eigen::MatrixXd& u, const Eigen::VectorXd& b,
                            const std::vector<double>& x, const ScalarLstm& prev) {
  const long h = u.cols();
  auto pre = [&](long row) {
    double s = b(row);
    for (long c = 0; c < w.cols(); ++c) s += w(row, c) * x[static_cast<std::size_t>(c)];
    for (long c = 0; c < h; ++c) s += u(row, c) * prev.h[static_cast<std::size_t>(c)];
    return s;
  };
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  ScalarLstm out{std::vector<double>(static_cast<std::size_t>(h)), std::vector<double>(static_cast<std::size_t>(h))};
  for (long j = 0; j < h; ++j) {
    const double i = sigmoid(pre(j));
    const double f = sigmoid(pre(h + j));
    const double g = std::tanh(pre(2 * h + j));
    const double o = sigmoid(pre(3 * h + j));
    const auto s = static_cast<std::size_t>(j);
    out.c[s] = f * prev.c[s] + i * g;
    out.h[s] = o * std::tanh(out.c[s]);
  }
  return out;
}

double naive_mse(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  double total = 0.0;
  for (long j = 0; j < x.cols(); ++j) {
    for (long i = 0; i < x.rows(); ++i) {
      const double d = x(i, j) - y(i, j);
      total += d * d;
    }
  }
  return total / static_cast<double>(x.cols());
}

std::pair<double, double> two_pass(std::span<const double> v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  const double mean = static_cast<double>(s / static_cast<long double>(v.size()));
  long double ss = 0.0L;
  for (double x : v) ss += static_cast<long double>(x - mean) * (x - mean);
  return {mean, std::sqrt(static_cast<double>(ss / static_cast<long double>(v.size() - 1)))};
}

double nearest_rank(std::vector<double> v, double pf) {
  std::sort(v.begin(), v.end());
  // Smallest 1-based rank r with r / n >= 1 - pf (tolerating rounding).
  const double n = static_cast<double>(v.size());
  std::size_t r = 1;
  while (r < v.size() && static_cast<double>(r) / n < (1.0 - pf) - 1e-12) ++r;
  return v[r - 1];
}

}  // namespace oracle
