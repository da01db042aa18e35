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

#include "slqg/mech_dyndet.hpp"

#include <stdexcept>
#include <string>

#include "slqg/qp.hpp"

namespace slqg {
namespace {

void check_det_bids(const std::vector<DetBid>& bids, int horizon) {
  if (bids.empty()) throw std::invalid_argument("at least one bid required");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (!(bids[i].q <= 0.0))
      throw std::invalid_argument("bid q must be non-positive (agent " +
                                  std::to_string(i) + ")");
    if (!(bids[i].r < 0.0))
      throw std::invalid_argument("bid r must be strictly negative (agent " +
                                  std::to_string(i) + ")");
  }
}

// Variables z stack stage blocks: z = [U(0); U(1); ...; U(T-1)], each
// block one control per agent. States are affine in z:
//   x_i(t) = a_i^t x0_i + sum_{tau < t} a_i^(t-1-tau) b_i u_i(tau).
DetTrajectory solve_stacked(const std::vector<DetBid>& bids, int horizon) {
  const int n = static_cast<int>(bids.size());
  const int T = horizon;
  const int nv = n * T;

  // Free state trajectory and control-to-state map.
  Eigen::MatrixXd free_states(n, T);   // a^t x0
  for (int i = 0; i < n; ++i) {
    double x = bids[i].x0;
    for (int t = 0; t < T; ++t) {
      free_states(i, t) = x;
      x *= bids[i].a;
    }
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nv, nv);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(nv);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < n; ++i)
      H(t * n + i, t * n + i) += 2.0 * bids[i].r;

  // Accumulate q-terms of x_i(t) = free + g' z with g supported on the
  // agent-i entries of stage blocks tau < t.
  for (int i = 0; i < n; ++i) {
    for (int t = 1; t < T; ++t) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(nv);
      double apow = 1.0;
      for (int tau = t - 1; tau >= 0; --tau) {
        g[tau * n + i] = apow * bids[i].b;
        apow *= bids[i].a;
      }
      H += 2.0 * bids[i].q * g * g.transpose();
      f += 2.0 * bids[i].q * free_states(i, t) * g;
    }
  }

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(T, nv);
  for (int t = 0; t < T; ++t) C.row(t).segment(t * n, n).setOnes();

  const QpSolution sol = equality_qp_solve(H, f, C, Eigen::VectorXd::Zero(T));

  DetTrajectory traj;
  traj.controls = Eigen::MatrixXd(n, T);
  for (int t = 0; t < T; ++t) traj.controls.col(t) = sol.z.segment(t * n, n);
  traj.states = Eigen::MatrixXd(n, T);
  for (int i = 0; i < n; ++i) {
    double x = bids[i].x0;
    for (int t = 0; t < T; ++t) {
      traj.states(i, t) = x;
      x = bids[i].a * x + bids[i].b * traj.controls(i, t);
    }
  }
  return traj;
}

std::vector<DetBid> without(const std::vector<DetBid>& bids, int excluded) {
  std::vector<DetBid> rest;
  rest.reserve(bids.size() - 1);
  for (int j = 0; j < static_cast<int>(bids.size()); ++j)
    if (j != excluded) rest.push_back(bids[j]);
  return rest;
}

}  // namespace

DetTrajectory clear_dynamic_det(const std::vector<DetBid>& bids, int horizon) {
  check_det_bids(bids, horizon);
  return solve_stacked(bids, horizon);
}

DetTrajectory exclude_clear_dynamic(const std::vector<DetBid>& bids,
                                    int excluded, int horizon) {
  check_det_bids(bids, horizon);
  if (excluded < 0 || excluded >= static_cast<int>(bids.size()))
    throw std::invalid_argument("excluded agent index out of range");
  if (bids.size() < 2)
    throw std::invalid_argument("excluded market needs at least two agents");
  return solve_stacked(without(bids, excluded), horizon);
}

double det_declared_welfare(const std::vector<DetBid>& bids,
                            const DetTrajectory& traj) {
  double value = 0.0;
  for (int i = 0; i < traj.states.rows(); ++i)
    for (int t = 0; t < traj.states.cols(); ++t)
      value += bids[i].q * traj.states(i, t) * traj.states(i, t) +
               bids[i].r * traj.controls(i, t) * traj.controls(i, t);
  return value;
}

Eigen::VectorXd payment_dynamic_det(const std::vector<DetBid>& bids, int horizon,
                                    DetH h) {
  check_det_bids(bids, horizon);
  const int n = static_cast<int>(bids.size());
  if (h == DetH::pivot && n < 2)
    throw std::invalid_argument("pivot payment needs at least two agents");
  const DetTrajectory star = solve_stacked(bids, horizon);

  Eigen::VectorXd payments(n);
  for (int i = 0; i < n; ++i) {
    double others_at_star = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      for (int t = 0; t < horizon; ++t)
        others_at_star += bids[j].q * star.states(j, t) * star.states(j, t) +
                          bids[j].r * star.controls(j, t) * star.controls(j, t);
    }
    double hi = 0.0;
    if (h == DetH::pivot) {
      const std::vector<DetBid> rest = without(bids, i);
      hi = det_declared_welfare(rest, solve_stacked(rest, horizon));
    }
    payments[i] = hi - others_at_star;
  }
  return payments;
}

Eigen::VectorXd det_net_utility(const std::vector<DetBid>& truths,
                                const std::vector<DetBid>& reported,
                                int horizon, DetH h) {
  if (truths.size() != reported.size())
    throw std::invalid_argument("truth/report count mismatch");
  const DetTrajectory assigned = clear_dynamic_det(reported, horizon);
  const Eigen::VectorXd payments = payment_dynamic_det(reported, horizon, h);
  const int n = static_cast<int>(truths.size());

  Eigen::VectorXd net(n);
  for (int i = 0; i < n; ++i) {
    // True state under assigned controls and true dynamics.
    double x = truths[i].x0;
    double value = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const double u = assigned.controls(i, t);
      value += truths[i].q * x * x + truths[i].r * u * u;
      x = truths[i].a * x + truths[i].b * u;
    }
    net[i] = value - payments[i];
  }
  return net;
}

}  // namespace slqg
