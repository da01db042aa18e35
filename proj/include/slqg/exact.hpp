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
#include <cstdint>
#include <vector>

#include "slqg/mech_layered.hpp"
#include "slqg/model.hpp"

namespace slqg {

// Realized disturbance history a deviation is conditioned on. Rows
// 0..stage-1 are fully revealed past draws (all agents bid truthfully
// there); of row `stage` only the deviator's own entry is read — the
// opponents' stage draws stay random.
struct HistoryPrefix {
  Eigen::MatrixXd draws;  // (stage + 1) x N
};

HistoryPrefix history_from_seed(const MarketModel& model, int stage,
                                std::uint64_t seed, std::uint64_t episode = 0);

// Payment rule switch for the verification negative controls: the
// mutated rule omits the history cross terms from every bracket. Only
// the evaluated stages (>= the deviation stage) are affected.
enum class PaymentRule { groves, drop_cross_terms };

// Exact conditional expectation of agent `agent`'s net utility
//   J = sum_t [q x^2(t) + r u^2(t)] - sum_s p(s)
// when it bids (own draw + delta) at `stage` while everyone else, and
// its own future self, bids truthfully. The expectation is over the
// opponents' stage-`stage` draws and all later disturbances, which stay
// jointly Gaussian under the affine mechanism maps; means and second
// moments are propagated in closed form. Quadratic in delta by
// construction.
double exact_expected_net_utility(const MarketModel& model, int agent, int stage,
                                  double delta, HChoice h,
                                  const HistoryPrefix& prefix,
                                  PaymentRule rule = PaymentRule::groves);

struct IcRow {
  double delta = 0.0;
  double expected_net_utility = 0.0;
  bool flagged = false;  // beats the truthful payoff beyond tolerance
};

// Deviation sweep of the exact evaluator over `grid` (which must
// contain 0). Rows come back sorted by delta.
std::vector<IcRow> ic_sweep(const MarketModel& model, int agent, int stage,
                            std::vector<double> grid, HChoice h,
                            const HistoryPrefix& prefix, double tol = 1e-9);

// Quadratic c0 + c1 d + c2 d^2 interpolated through d = -1, 0, 1, with
// the evaluator's value at d = 2 as an exactness check.
struct DeviationQuadratic {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  double fourth_point_residual = 0.0;
  double vertex = 0.0;   // -c1 / (2 c2); 0 when flat
  bool flat = false;     // |c2| below 1e-12: payoff does not depend on delta
};

DeviationQuadratic fit_deviation_quadratic(const MarketModel& model, int agent,
                                           int stage, HChoice h,
                                           const HistoryPrefix& prefix,
                                           PaymentRule rule = PaymentRule::groves);

}  // namespace slqg
