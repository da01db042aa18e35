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

#include "slqg/mech_static.hpp"

#include <stdexcept>
#include <string>

namespace slqg {
namespace {

void check_bids(const std::vector<StaticQuadraticBid>& bids) {
  if (bids.empty()) throw std::invalid_argument("at least one bid required");
  for (std::size_t i = 0; i < bids.size(); ++i)
    if (!(bids[i].curvature < 0.0))
      throw std::invalid_argument("bid curvature must be strictly negative (agent " +
                                  std::to_string(i) + ")");
}

std::vector<StaticQuadraticBid> without(const std::vector<StaticQuadraticBid>& bids,
                                        int excluded) {
  std::vector<StaticQuadraticBid> rest;
  rest.reserve(bids.size() - 1);
  for (int j = 0; j < static_cast<int>(bids.size()); ++j)
    if (j != excluded) rest.push_back(bids[j]);
  return rest;
}

}  // namespace

double bid_value(const StaticQuadraticBid& bid, double u) {
  return bid.curvature * u * u + bid.linear * u;
}

Eigen::VectorXd clear_static(const std::vector<StaticQuadraticBid>& bids) {
  check_bids(bids);
  const int n = static_cast<int>(bids.size());
  if (n == 1) return Eigen::VectorXd::Zero(1);
  double num = 0.0, den = 0.0;
  for (const auto& b : bids) {
    num += b.linear / b.curvature;
    den += 1.0 / b.curvature;
  }
  const double lambda = num / den;
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i)
    u[i] = (lambda - bids[i].linear) / (2.0 * bids[i].curvature);
  return u;
}

Eigen::VectorXd exclude_clear_static(const std::vector<StaticQuadraticBid>& bids,
                                     int excluded) {
  check_bids(bids);
  if (excluded < 0 || excluded >= static_cast<int>(bids.size()))
    throw std::invalid_argument("excluded agent index out of range");
  if (bids.size() == 1) return Eigen::VectorXd(0);
  return clear_static(without(bids, excluded));
}

Eigen::VectorXd vcg_payment_static(const std::vector<StaticQuadraticBid>& bids) {
  return groves_payment_static(bids, [](const std::vector<StaticQuadraticBid>& rest) {
    if (rest.empty()) return 0.0;
    const Eigen::VectorXd u = clear_static(rest);
    double value = 0.0;
    for (std::size_t j = 0; j < rest.size(); ++j) value += bid_value(rest[j], u[j]);
    return value;
  });
}

Eigen::VectorXd groves_payment_static(const std::vector<StaticQuadraticBid>& bids,
                                      const GrovesH& h) {
  check_bids(bids);
  const int n = static_cast<int>(bids.size());
  const Eigen::VectorXd u = clear_static(bids);
  Eigen::VectorXd payments(n);
  for (int i = 0; i < n; ++i) {
    double others_at_star = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) others_at_star += bid_value(bids[j], u[j]);
    payments[i] = h(without(bids, i)) - others_at_star;
  }
  return payments;
}

Eigen::VectorXd static_net_utility(
    const std::vector<StaticQuadraticBid>& true_utilities,
    const std::vector<StaticQuadraticBid>& bids) {
  if (true_utilities.size() != bids.size())
    throw std::invalid_argument("true utility count must match bid count");
  const Eigen::VectorXd u = clear_static(bids);
  const Eigen::VectorXd p = vcg_payment_static(bids);
  Eigen::VectorXd net(u.size());
  for (int i = 0; i < u.size(); ++i)
    net[i] = bid_value(true_utilities[i], u[i]) - p[i];
  return net;
}

StaticOutcome run_static_market(const std::vector<StaticQuadraticBid>& bids) {
  StaticOutcome out;
  out.allocation = clear_static(bids);
  const int n = static_cast<int>(bids.size());
  out.excluded_defined = n > 1;
  out.excluded.reserve(n);
  for (int i = 0; i < n; ++i) out.excluded.push_back(exclude_clear_static(bids, i));
  out.payments = vcg_payment_static(bids);
  out.welfare = 0.0;
  for (int i = 0; i < n; ++i) out.welfare += bid_value(bids[i], out.allocation[i]);
  return out;
}

}  // namespace slqg
