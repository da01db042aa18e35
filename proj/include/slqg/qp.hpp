// Copyright 2026 The strategic-lqg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace slqg {

// Raised when the KKT system of an equality-constrained QP is singular:
// redundant/inconsistent constraint rows, or a curvature matrix that is
// not strictly definite on the constraint null space.
class DegenerateProgram : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QpSolution {
  Eigen::VectorXd z;            // unique maximizer
  Eigen::VectorXd multipliers;  // one per constraint row
  double value = 0.0;           // (1/2) z'Hz + f'z at the maximizer
};

// Maximizes (1/2) z'Hz + f'z subject to Cz = d, where H is negative
// definite on the null space of C, by solving the KKT linear system
//
//   [ H  C' ] [ z ]   [ -f ]
//   [ C  0  ] [ y ] = [  d ]
//
// with a full-pivot LU factorization. Stationarity and feasibility
// residuals are checked against 1e-9 (relative); violations throw
// DegenerateProgram.
QpSolution equality_qp_solve(const Eigen::MatrixXd& H,
                             const Eigen::VectorXd& f,
                             const Eigen::MatrixXd& C,
                             const Eigen::VectorXd& d);

// Top-left n-by-n block S of the inverse KKT matrix, so that the
// maximizer for any linear term is z = -S f (d = 0). Throws
// DegenerateProgram when the KKT matrix is singular.
Eigen::MatrixXd kkt_solution_map(const Eigen::MatrixXd& H,
                                 const Eigen::MatrixXd& C);

}  // namespace slqg
