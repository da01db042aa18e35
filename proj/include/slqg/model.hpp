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

namespace slqg {

// Scalar-state LQG agent: x(t+1) = a x(t) + b u(t) + w(t), stage utility
// q x(t)^2 + r u(t)^2, w ~ N(0, sigma), x(0) ~ N(0, zeta).
struct AgentParams {
  double a = 1.0;
  double b = 1.0;
  double q = -1.0;      // q <= 0
  double r = -1.0;      // r < 0
  double sigma = 1.0;   // > 0
  double zeta = 1.0;    // > 0
};

// A market of N agents cleared over a finite horizon of T stages.
// All per-agent coefficients stack into diagonal matrices A, B, Q, R,
// Sigma, Z.
struct MarketModel {
  std::vector<AgentParams> agents;
  int horizon = 1;

  int num_agents() const { return static_cast<int>(agents.size()); }

  Eigen::VectorXd a_vec() const;
  Eigen::VectorXd b_vec() const;
  Eigen::VectorXd q_vec() const;
  Eigen::VectorXd r_vec() const;
  Eigen::VectorXd sigma_vec() const;
  Eigen::VectorXd zeta_vec() const;
};

// Returns the model unchanged iff every agent satisfies
// q <= 0, r < 0, sigma > 0, zeta > 0 and N >= 1, T >= 1.
// Throws std::invalid_argument naming the first violated invariant and
// the offending agent index.
const MarketModel& validate_model(const MarketModel& model);

MarketModel make_model(std::vector<AgentParams> agents, int horizon);

// Realized states, total controls, and acting noises of one rollout.
// states/controls hold t = 0..T-1; noises holds W(0)..W(T-2) (the draws
// that enter the recursion; X(T) is never formed).
struct Trajectory {
  std::vector<Eigen::VectorXd> states;
  std::vector<Eigen::VectorXd> controls;
  std::vector<Eigen::VectorXd> noises;
};

// Max norm of states[t+1] - (A states[t] + B controls[t] + noises[t]).
double recursion_residual(const MarketModel& model, const Trajectory& traj);

}  // namespace slqg
