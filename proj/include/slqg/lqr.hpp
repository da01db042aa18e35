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
#include <vector>

#include "slqg/model.hpp"

namespace slqg {

// Deterministic orthonormal basis of the balance hyperplane
// {u : 1'u = 0}: the n x (n-1) Helmert matrix. Every column sums to
// zero; columns are orthonormal. n = 1 yields a 1 x 0 matrix.
Eigen::MatrixXd balance_nullspace_basis(int n);

// Per-stage feedback gains K(t), t = 0..T-1. Each K(t) maps the joint
// state to a balanced joint control: 1'K(t)x = 0 for every x.
struct FeedbackGain {
  std::vector<Eigen::MatrixXd> gains;
  int horizon() const { return static_cast<int>(gains.size()); }
};

struct BalancedLqrSolution {
  FeedbackGain feedback;
  // Value matrices P_t of the reduced Riccati recursion lifted to the
  // full state: value-to-go x'P_t x (noise constants excluded).
  // value[T] is the zero terminal matrix.
  std::vector<Eigen::MatrixXd> value;
};

// Maximizes E sum_t [X'QX + U'RU] subject to the joint linear dynamics
// and per-stage balance 1'U(t) = 0, by substituting U = Mv with M the
// Helmert basis and running the finite-horizon backward Riccati
// recursion on the reduced control. Gains are lifted as K(t) = M K_red(t).
// Throws DegenerateProgram if M'RM is not strictly negative definite.
BalancedLqrSolution solve_balanced_lqr(const MarketModel& model);

// Applies U(t) = K(t) X(t) through the linear recursion. noises may
// carry T-1 or T entries; only the first T-1 act.
Trajectory simulate_closed_loop(const MarketModel& model,
                                const FeedbackGain& feedback,
                                const std::vector<Eigen::VectorXd>& noises,
                                const Eigen::VectorXd& x0);

// sum_t [X(t)'Q X(t) + U(t)'R U(t)] over the stored stages.
double random_social_welfare(const MarketModel& model, const Trajectory& traj);

// Exact E[RSW] for the closed loop U(t) = K(t)X(t): propagates the
// second moment S_t of X(t) (S_0 = Z, S_{t+1} = (A+BK)S(A+BK)' + Sigma)
// and accumulates tr(Q S_t) + tr(K'RK S_t).
double expected_social_welfare(const MarketModel& model,
                               const FeedbackGain& feedback);

// Diagnostic for the time-invariance claim about the optimal gain: the
// stage-s subproblem over [s, T) has its own Riccati gains; this returns
// max_s max_t |K_sub(t) - K(t)| over matching absolute stage indices.
// Zero (up to roundoff) because gains depend only on time-to-go.
double max_stage_gain_deviation(const MarketModel& model);

}  // namespace slqg
