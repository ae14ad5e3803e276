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

#include "bladecm/dpca/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "bladecm/error.hpp"

namespace bladecm::dpca {

EigenDecomposition symmetric_eigendecomposition(const Eigen::MatrixXd& s) {
  require(s.rows() == s.cols() && s.rows() >= 1, Errc::DimensionMismatch,
          "eigendecomposition needs a non-empty square matrix");
  require(s.allFinite(), Errc::NonFiniteInput, "matrix has non-finite entries");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-10 * scale, Errc::NotSymmetric,
          "max |S - S^T| = " + std::to_string(asym));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::ComputeEigenvectors);
  require(solver.info() == Eigen::Success, Errc::NoConvergence,
          "symmetric eigensolver did not converge");

  // The solver returns ascending order; reverse it.
  const Index n = s.rows();
  EigenDecomposition out{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
  for (Index j = 0; j < n; ++j) {
    Index arg = 0;
    out.vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.vectors(arg, j) < 0.0) out.vectors.col(j) = -out.vectors.col(j);
  }
  return out;
}

Index select_components(std::span<const double> eigenvalues, double cv_target) {
  require(!eigenvalues.empty(), Errc::EmptyInput, "no eigenvalues");
  require(std::isfinite(cv_target) && cv_target > 0.0 && cv_target <= 1.0, Errc::InvalidConfig,
          "cv_target must be in (0, 1]");
  double total = 0.0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double v = eigenvalues[i];
    require(std::isfinite(v) && v >= 0.0, Errc::InvalidConfig, "eigenvalues must be non-negative");
    require(i == 0 || v <= eigenvalues[i - 1], Errc::InvalidConfig,
            "eigenvalues must be sorted descending");
    total += v;
  }
  require(total > 0.0, Errc::AllZeroSpectrum, "all eigenvalues are zero");
  double cumulative = 0.0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    cumulative += eigenvalues[i];
    if (cumulative / total >= cv_target) return static_cast<Index>(i + 1);
  }
  return static_cast<Index>(eigenvalues.size());
}

Index select_components(const Eigen::VectorXd& eigenvalues, double cv_target) {
  return select_components(
      std::span<const double>(eigenvalues.data(), static_cast<std::size_t>(eigenvalues.size())),
      cv_target);
}

}  // namespace bladecm::dpca
