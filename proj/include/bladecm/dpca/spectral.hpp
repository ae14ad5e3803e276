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
#include <span>

namespace bladecm::dpca {

using Index = Eigen::Index;

struct EigenDecomposition {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // orthonormal columns, matching `values`
};

// Eigendecomposition of a symmetric matrix with eigenvalues sorted in
// descending order. Each eigenvector is signed so that its largest-magnitude
// entry is positive (first such entry on ties), which makes the output
// deterministic. Throws NotSymmetric or NoConvergence.
EigenDecomposition symmetric_eigendecomposition(const Eigen::MatrixXd& s);

// Smallest l whose leading eigenvalues reach `cv_target` of the total.
Index select_components(std::span<const double> eigenvalues, double cv_target);
Index select_components(const Eigen::VectorXd& eigenvalues, double cv_target);

}  // namespace bladecm::dpca
