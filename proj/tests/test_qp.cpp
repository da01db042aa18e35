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

#include "doctest.h"
#include "slqg/qp.hpp"
#include "test_util.hpp"

using namespace slqg;

TEST_SUITE("qp") {

TEST_CASE("balanced concave maximizer: H = -2I, f = (2,-2)") {
  Eigen::MatrixXd H = -2.0 * Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd f(2);
  f << 2.0, -2.0;
  Eigen::MatrixXd C(1, 2);
  C << 1.0, 1.0;
  const QpSolution sol = equality_qp_solve(H, f, C, Eigen::VectorXd::Zero(1));
  CHECK(sol.z[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.z[1] == doctest::Approx(-1.0).epsilon(1e-12));
  // interior stationarity: multiplier vanishes for the antisymmetric f
  CHECK(std::abs(sol.multipliers[0]) < 1e-12);
  // (1/2) z'Hz + f'z = -2 + 4
  CHECK(sol.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("zero linear term gives the origin") {
  Eigen::MatrixXd H = -3.0 * Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd C(1, 3);
  C << 1.0, 1.0, 1.0;
  const QpSolution sol = equality_qp_solve(H, Eigen::VectorXd::Zero(3), C,
                                           Eigen::VectorXd::Zero(1));
  CHECK(sol.z.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(sol.value == doctest::Approx(0.0));
}

TEST_CASE("inconsistent duplicated rows are degenerate") {
  Eigen::MatrixXd H = -Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd C(2, 2);
  C << 1.0, 1.0, 1.0, 1.0;
  Eigen::VectorXd d(2);
  d << 0.0, 1.0;
  CHECK_THROWS_AS(equality_qp_solve(H, Eigen::VectorXd::Zero(2), C, d),
                  DegenerateProgram);
}

TEST_CASE("redundant rows are degenerate even when consistent") {
  Eigen::MatrixXd H = -Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd C(2, 2);
  C << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(
      equality_qp_solve(H, Eigen::VectorXd::Zero(2), C, Eigen::VectorXd::Zero(2)),
      DegenerateProgram);
}

TEST_CASE("stationarity and feasibility residuals on random programs") {
  test::Rand rand(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rand.uniform_int(2, 6);
    const int m = rand.uniform_int(1, n - 1);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rand.uniform(-1.0, 1.0);
    const Eigen::MatrixXd H =
        -(A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd C(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) C(i, j) = rand.uniform(-1.0, 1.0);
    const Eigen::VectorXd f = rand.vector(n, -2.0, 2.0);
    const Eigen::VectorXd d = rand.vector(m, -1.0, 1.0);

    const QpSolution sol = equality_qp_solve(H, f, C, d);
    CHECK((C * sol.z - d).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK((H * sol.z + f + C.transpose() * sol.multipliers)
              .lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("solution map reproduces the homogeneous solve") {
  Eigen::MatrixXd H(2, 2);
  H << -2.0, 0.5, 0.5, -3.0;
  Eigen::MatrixXd C(1, 2);
  C << 1.0, -1.0;
  Eigen::VectorXd f(2);
  f << 1.0, 2.0;
  const Eigen::MatrixXd S = kkt_solution_map(H, C);
  const QpSolution sol = equality_qp_solve(H, f, C, Eigen::VectorXd::Zero(1));
  CHECK(((-S * f) - sol.z).lpNorm<Eigen::Infinity>() < 1e-12);
}

}  // TEST_SUITE
