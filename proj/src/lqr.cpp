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

#include "slqg/lqr.hpp"

#include <cmath>
#include <stdexcept>

#include "slqg/qp.hpp"

namespace slqg {

Eigen::MatrixXd balance_nullspace_basis(int n) {
  if (n < 1) throw std::invalid_argument("basis dimension must be positive");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) M(i, k - 1) = scale;
    M(k, k - 1) = -static_cast<double>(k) * scale;
  }
  return M;
}

BalancedLqrSolution solve_balanced_lqr(const MarketModel& model) {
  validate_model(model);
  const int n = model.num_agents();
  const int T = model.horizon;
  const Eigen::MatrixXd A = model.a_vec().asDiagonal();
  const Eigen::MatrixXd Q = model.q_vec().asDiagonal();
  const Eigen::MatrixXd M = balance_nullspace_basis(n);
  const Eigen::MatrixXd Bred = model.b_vec().asDiagonal() * M;
  const Eigen::MatrixXd Rred = M.transpose() * model.r_vec().asDiagonal() * M;

  if (n > 1) {
    // R < 0 and M orthonormal imply M'RM < 0; a failure here means the
    // inputs were corrupted after validation.
    Eigen::LLT<Eigen::MatrixXd> llt(-Rred);
    if (llt.info() != Eigen::Success)
      throw DegenerateProgram("reduced control weight is not negative definite");
  }

  BalancedLqrSolution out;
  out.value.assign(T + 1, Eigen::MatrixXd::Zero(n, n));
  out.feedback.gains.assign(T, Eigen::MatrixXd::Zero(n, n));

  for (int t = T - 1; t >= 0; --t) {
    const Eigen::MatrixXd& Pnext = out.value[t + 1];
    if (n == 1) {
      // Balance pins u = 0; the state just drifts.
      out.value[t] = Q + A.transpose() * Pnext * A;
      continue;
    }
    const Eigen::MatrixXd G = Rred + Bred.transpose() * Pnext * Bred;
    const Eigen::MatrixXd Kred =
        -G.ldlt().solve(Bred.transpose() * Pnext * A);
    out.feedback.gains[t] = M * Kred;
    out.value[t] = Q + A.transpose() * Pnext * A +
                   A.transpose() * Pnext * Bred * Kred;
  }
  return out;
}

Trajectory simulate_closed_loop(const MarketModel& model,
                                const FeedbackGain& feedback,
                                const std::vector<Eigen::VectorXd>& noises,
                                const Eigen::VectorXd& x0) {
  const int n = model.num_agents();
  const int T = model.horizon;
  if (feedback.horizon() != T)
    throw std::invalid_argument("feedback horizon does not match model");
  if (x0.size() != n) throw std::invalid_argument("x0 dimension mismatch");
  const int needed = T - 1;
  if (static_cast<int>(noises.size()) != needed &&
      static_cast<int>(noises.size()) != T)
    throw std::invalid_argument("noise sequence length mismatch");
  for (const auto& w : noises)
    if (w.size() != n) throw std::invalid_argument("noise dimension mismatch");

  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();

  Trajectory traj;
  traj.states.reserve(T);
  traj.controls.reserve(T);
  traj.noises.assign(noises.begin(), noises.begin() + needed);
  Eigen::VectorXd x = x0;
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd u = feedback.gains[t] * x;
    traj.states.push_back(x);
    traj.controls.push_back(u);
    if (t + 1 < T)
      x = a.cwiseProduct(x) + b.cwiseProduct(u) + traj.noises[t];
  }
  return traj;
}

double random_social_welfare(const MarketModel& model, const Trajectory& traj) {
  if (traj.states.size() != traj.controls.size())
    throw std::invalid_argument("states/controls length mismatch");
  const Eigen::VectorXd q = model.q_vec();
  const Eigen::VectorXd r = model.r_vec();
  double welfare = 0.0;
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    if (traj.states[t].size() != q.size() || traj.controls[t].size() != r.size())
      throw std::invalid_argument("trajectory dimension mismatch");
    welfare += q.cwiseProduct(traj.states[t]).dot(traj.states[t]);
    welfare += r.cwiseProduct(traj.controls[t]).dot(traj.controls[t]);
  }
  return welfare;
}

double expected_social_welfare(const MarketModel& model,
                               const FeedbackGain& feedback) {
  const int T = model.horizon;
  if (feedback.horizon() != T)
    throw std::invalid_argument("feedback horizon does not match model");
  const Eigen::MatrixXd A = model.a_vec().asDiagonal();
  const Eigen::MatrixXd B = model.b_vec().asDiagonal();
  const Eigen::MatrixXd Q = model.q_vec().asDiagonal();
  const Eigen::MatrixXd R = model.r_vec().asDiagonal();
  const Eigen::MatrixXd Sigma = model.sigma_vec().asDiagonal();

  Eigen::MatrixXd S = model.zeta_vec().asDiagonal();  // second moment of X(t)
  double welfare = 0.0;
  for (int t = 0; t < T; ++t) {
    const Eigen::MatrixXd& K = feedback.gains[t];
    welfare += (Q * S).trace() + (K.transpose() * R * K * S).trace();
    if (t + 1 < T) {
      const Eigen::MatrixXd closed = A + B * K;
      S = closed * S * closed.transpose() + Sigma;
    }
  }
  return welfare;
}

double max_stage_gain_deviation(const MarketModel& model) {
  const BalancedLqrSolution full = solve_balanced_lqr(model);
  double worst = 0.0;
  for (int s = 1; s < model.horizon; ++s) {
    MarketModel sub = model;
    sub.horizon = model.horizon - s;
    const BalancedLqrSolution tail = solve_balanced_lqr(sub);
    for (int j = 0; j < sub.horizon; ++j) {
      const double diff = (tail.feedback.gains[j] - full.feedback.gains[s + j])
                              .cwiseAbs()
                              .maxCoeff();
      worst = std::max(worst, diff);
    }
  }
  return worst;
}

}  // namespace slqg
