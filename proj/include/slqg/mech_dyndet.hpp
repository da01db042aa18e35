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
#include <functional>
#include <vector>

namespace slqg {

// Open-loop bid of one agent: linear scalar dynamics (a, b), quadratic
// stage weights (q <= 0, r < 0), and a declared initial state.
struct DetBid {
  double a = 1.0;
  double b = 1.0;
  double q = -1.0;
  double r = -1.0;
  double x0 = 0.0;
};

// Column t holds the stage-t vector; states and controls both span
// t = 0..T-1 (the post-horizon state never enters the objective).
struct DetTrajectory {
  Eigen::MatrixXd states;    // N x T
  Eigen::MatrixXd controls;  // N x T
};

// Maximizes sum_i sum_t [q_i x_i(t)^2 + r_i u_i(t)^2] subject to
// x_i(t+1) = a_i x_i(t) + b_i u_i(t), x_i(0) = x0_i, and per-stage
// balance sum_i u_i(t) = 0, as one stacked equality-constrained QP
// over all N*T controls.
DetTrajectory clear_dynamic_det(const std::vector<DetBid>& bids, int horizon);

// Same program over agents j != excluded with sum_{j != excluded}
// u_j(t) = 0. Rows follow the remaining agents in order.
DetTrajectory exclude_clear_dynamic(const std::vector<DetBid>& bids,
                                    int excluded, int horizon);

// Declared welfare sum_j sum_t [q_j x_j(t)^2 + r_j u_j(t)^2] of the
// given trajectory under the given bids (rows matched by position).
double det_declared_welfare(const std::vector<DetBid>& bids,
                            const DetTrajectory& traj);

enum class DetH { pivot, zero };

// Groves payments over the horizon. pivot uses the others-only optimal
// value as h_i; zero uses h = 0.
Eigen::VectorXd payment_dynamic_det(const std::vector<DetBid>& bids, int horizon,
                                    DetH h = DetH::pivot);

// Realized net utilities when the ISO clears `reported` but each agent
// lives its true parameters: states evolve with the true (a, b, x0)
// under the assigned controls, utilities use the true (q, r), and
// payments are those charged for `reported`.
Eigen::VectorXd det_net_utility(const std::vector<DetBid>& truths,
                                const std::vector<DetBid>& reported,
                                int horizon, DetH h = DetH::pivot);

}  // namespace slqg
