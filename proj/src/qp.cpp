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

#include "slqg/qp.hpp"

namespace slqg {
namespace {

Eigen::MatrixXd kkt_matrix(const Eigen::MatrixXd& H, const Eigen::MatrixXd& C) {
  const Eigen::Index n = H.rows();
  const Eigen::Index m = C.rows();
  if (H.cols() != n) throw std::invalid_argument("H must be square");
  if (m > 0 && C.cols() != n)
    throw std::invalid_argument("C column count must match H");
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = H;
  if (m > 0) {
    K.topRightCorner(n, m) = C.transpose();
    K.bottomLeftCorner(m, n) = C;
  }
  return K;
}

}  // namespace

QpSolution equality_qp_solve(const Eigen::MatrixXd& H,
                             const Eigen::VectorXd& f,
                             const Eigen::MatrixXd& C,
                             const Eigen::VectorXd& d) {
  const Eigen::Index n = H.rows();
  const Eigen::Index m = C.rows();
  if (f.size() != n) throw std::invalid_argument("f size must match H");
  if (d.size() != m) throw std::invalid_argument("d size must match C rows");

  const Eigen::MatrixXd K = kkt_matrix(H, C);
  Eigen::VectorXd rhs(n + m);
  rhs.head(n) = -f;
  rhs.tail(m) = d;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible())
    throw DegenerateProgram("degenerate program: singular KKT system");
  const Eigen::VectorXd sol = lu.solve(rhs);

  QpSolution out;
  out.z = sol.head(n);
  out.multipliers = sol.tail(m);

  const double scale =
      std::max({1.0, f.lpNorm<Eigen::Infinity>(), out.z.lpNorm<Eigen::Infinity>()});
  const double stationarity =
      (H * out.z + f + (m > 0 ? Eigen::VectorXd(C.transpose() * out.multipliers)
                              : Eigen::VectorXd::Zero(n)))
          .lpNorm<Eigen::Infinity>();
  const double feasibility =
      m > 0 ? (C * out.z - d).lpNorm<Eigen::Infinity>() : 0.0;
  if (stationarity > 1e-9 * scale || feasibility > 1e-9 * scale)
    throw DegenerateProgram("degenerate program: KKT residual too large");

  out.value = 0.5 * out.z.dot(H * out.z) + f.dot(out.z);
  return out;
}

Eigen::MatrixXd kkt_solution_map(const Eigen::MatrixXd& H,
                                 const Eigen::MatrixXd& C) {
  const Eigen::Index n = H.rows();
  const Eigen::MatrixXd K = kkt_matrix(H, C);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (!lu.isInvertible())
    throw DegenerateProgram("degenerate program: singular KKT system");
  const Eigen::MatrixXd Kinv = lu.inverse();
  return Kinv.topLeftCorner(n, n);
}

}  // namespace slqg
