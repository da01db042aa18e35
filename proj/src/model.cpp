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

#include "slqg/model.hpp"

#include <stdexcept>
#include <string>

namespace slqg {
namespace {

Eigen::VectorXd gather(const std::vector<AgentParams>& agents,
                       double AgentParams::*field) {
  Eigen::VectorXd v(static_cast<int>(agents.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = agents[i].*field;
  return v;
}

}  // namespace

Eigen::VectorXd MarketModel::a_vec() const { return gather(agents, &AgentParams::a); }
Eigen::VectorXd MarketModel::b_vec() const { return gather(agents, &AgentParams::b); }
Eigen::VectorXd MarketModel::q_vec() const { return gather(agents, &AgentParams::q); }
Eigen::VectorXd MarketModel::r_vec() const { return gather(agents, &AgentParams::r); }
Eigen::VectorXd MarketModel::sigma_vec() const { return gather(agents, &AgentParams::sigma); }
Eigen::VectorXd MarketModel::zeta_vec() const { return gather(agents, &AgentParams::zeta); }

const MarketModel& validate_model(const MarketModel& model) {
  if (model.agents.empty())
    throw std::invalid_argument("model must have at least one agent");
  if (model.horizon < 1)
    throw std::invalid_argument("horizon must be at least 1");
  for (int i = 0; i < model.num_agents(); ++i) {
    const AgentParams& p = model.agents[i];
    const std::string at = " (agent " + std::to_string(i) + ")";
    if (!(p.q <= 0.0)) throw std::invalid_argument("q must be non-positive" + at);
    if (!(p.r < 0.0)) throw std::invalid_argument("r must be strictly negative" + at);
    if (!(p.sigma > 0.0)) throw std::invalid_argument("sigma must be positive" + at);
    if (!(p.zeta > 0.0)) throw std::invalid_argument("zeta must be positive" + at);
  }
  return model;
}

MarketModel make_model(std::vector<AgentParams> agents, int horizon) {
  MarketModel m{std::move(agents), horizon};
  validate_model(m);
  return m;
}

double recursion_residual(const MarketModel& model, const Trajectory& traj) {
  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();
  double worst = 0.0;
  for (std::size_t t = 0; t + 1 < traj.states.size(); ++t) {
    Eigen::VectorXd predicted =
        a.cwiseProduct(traj.states[t]) + b.cwiseProduct(traj.controls[t]);
    if (t < traj.noises.size()) predicted += traj.noises[t];
    worst = std::max(worst,
                     (traj.states[t + 1] - predicted).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace slqg
