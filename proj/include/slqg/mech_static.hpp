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

// One-shot quadratic bid: declared utility curvature*u^2 + linear*u.
// Strict concavity (curvature < 0) keeps the cleared allocation unique.
struct StaticQuadraticBid {
  double curvature = -1.0;
  double linear = 0.0;
};

double bid_value(const StaticQuadraticBid& bid, double u);

// Unique maximizer of sum_i bids[i](u_i) subject to sum_i u_i = 0:
// u_i = (lambda - beta_i) / (2 r_i) with
// lambda = (sum beta_i/r_i) / (sum 1/r_i).
Eigen::VectorXd clear_static(const std::vector<StaticQuadraticBid>& bids);

// Clears the market over agents j != excluded with sum_{j != excluded}
// u_j = 0. Returns the N-1 allocations of the remaining agents in
// order; empty when N = 1 (value 0 by convention, see StaticOutcome).
Eigen::VectorXd exclude_clear_static(const std::vector<StaticQuadraticBid>& bids,
                                     int excluded);

// Pivot (Clarke) payments: p_i = sum_{j != i} F_j(u^(i)) - sum_{j != i} F_j(u*).
Eigen::VectorXd vcg_payment_static(const std::vector<StaticQuadraticBid>& bids);

// Groves payment with an arbitrary h evaluated on the others' bids only:
// p_i = h(bids without entry i) - sum_{j != i} F_j(u*).
using GrovesH = std::function<double(const std::vector<StaticQuadraticBid>&)>;
Eigen::VectorXd groves_payment_static(const std::vector<StaticQuadraticBid>& bids,
                                      const GrovesH& h);

// Realized net utilities F_i(u*_i) - p_i with pivot payments, where
// true_utilities are the agents' actual quadratic preferences and the
// clearing uses the (possibly untruthful) bid profile.
Eigen::VectorXd static_net_utility(
    const std::vector<StaticQuadraticBid>& true_utilities,
    const std::vector<StaticQuadraticBid>& bids);

struct StaticOutcome {
  Eigen::VectorXd allocation;                  // u*
  std::vector<Eigen::VectorXd> excluded;       // u^(i) per excluded agent i
  Eigen::VectorXd payments;                    // pivot payments
  double welfare = 0.0;                        // reported welfare at u*
  bool excluded_defined = true;                // false when N = 1
};

StaticOutcome run_static_market(const std::vector<StaticQuadraticBid>& bids);

}  // namespace slqg
