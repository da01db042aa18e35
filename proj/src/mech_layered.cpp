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

#include "slqg/mech_layered.hpp"

#include <stdexcept>
#include <string>

#include "slqg/lqr.hpp"
#include "slqg/qp.hpp"

namespace slqg {

LayerGrid::LayerGrid(int num_agents, int horizon)
    : num_agents_(num_agents), horizon_(horizon) {
  if (num_agents < 1 || horizon < 1)
    throw std::invalid_argument("layer grid needs N >= 1, T >= 1");
  x_hat_.resize(horizon);
  u_.resize(horizon);
}

const Eigen::VectorXd& LayerGrid::x_hat(int s, int t) const {
  if (s < 0 || s >= stages_solved_ || t < s || t >= horizon_)
    throw std::out_of_range("layer index (s,t) out of range");
  return x_hat_[s][t - s];
}

const Eigen::VectorXd& LayerGrid::u(int s, int t) const {
  if (s < 0 || s >= stages_solved_ || t < s || t >= horizon_)
    throw std::out_of_range("layer index (s,t) out of range");
  return u_[s][t - s];
}

const Eigen::VectorXd& LayerGrid::x_true(int s, int t) const {
  if (!has_true_layers()) throw std::logic_error("true layers not populated");
  if (s < 0 || s >= static_cast<int>(x_true_.size()) || t < s || t >= horizon_)
    throw std::out_of_range("layer index (s,t) out of range");
  return x_true_[s][t - s];
}

void LayerGrid::set_stage(int s, std::vector<Eigen::VectorXd> x_hat_row,
                          std::vector<Eigen::VectorXd> u_row) {
  if (s != stages_solved_)
    throw std::logic_error("stages must be installed in order");
  if (static_cast<int>(x_hat_row.size()) != horizon_ - s ||
      static_cast<int>(u_row.size()) != horizon_ - s)
    throw std::invalid_argument("layer row length must be T - s");
  x_hat_[s] = std::move(x_hat_row);
  u_[s] = std::move(u_row);
  ++stages_solved_;
}

void LayerGrid::set_true_layers(std::vector<std::vector<Eigen::VectorXd>> rows) {
  if (static_cast<int>(rows.size()) != horizon_)
    throw std::invalid_argument("true layers must cover every stage");
  x_true_ = std::move(rows);
}

Eigen::VectorXd LayerGrid::history_x_sum(int s, int t) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(num_agents_);
  for (int tau = 0; tau < s; ++tau) sum += x_hat(tau, t);
  return sum;
}

Eigen::VectorXd LayerGrid::history_u_sum(int s, int t) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(num_agents_);
  for (int tau = 0; tau < s; ++tau) sum += u(tau, t);
  return sum;
}

Eigen::VectorXd LayerGrid::total_control(int t) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(num_agents_);
  for (int s = 0; s <= t && s < stages_solved_; ++s) sum += u(s, t);
  return sum;
}

Eigen::VectorXd LayerGrid::total_x_hat(int t) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(num_agents_);
  for (int s = 0; s <= t && s < stages_solved_; ++s) sum += x_hat(s, t);
  return sum;
}

namespace detail {

StageMatrices build_stage_matrices(const MarketModel& model, int s,
                                   const std::vector<int>& agents) {
  const int T = model.horizon;
  if (s < 0 || s >= T) throw std::invalid_argument("stage out of range");
  const int n = static_cast<int>(agents.size());
  const int m = T - s;
  const int nv = n * m;

  StageMatrices sm;
  sm.stage = s;
  sm.blocks = m;
  sm.agents = agents;

  Eigen::VectorXd a(n), b(n), q(n), r(n);
  for (int j = 0; j < n; ++j) {
    const AgentParams& p = model.agents[agents[j]];
    a[j] = p.a;
    b[j] = p.b;
    q[j] = p.q;
    r[j] = p.r;
  }

  sm.Apow.resize(m);
  sm.Apow[0] = Eigen::VectorXd::Ones(n);
  for (int k = 1; k < m; ++k) sm.Apow[k] = sm.Apow[k - 1].cwiseProduct(a);

  sm.G.assign(m, Eigen::MatrixXd::Zero(n, nv));
  for (int k = 1; k < m; ++k)
    for (int j = 0; j < k; ++j)
      sm.G[k].block(0, j * n, n, n) =
          Eigen::MatrixXd(sm.Apow[k - 1 - j].cwiseProduct(b).asDiagonal());

  sm.H = Eigen::MatrixXd::Zero(nv, nv);
  for (int k = 0; k < m; ++k) {
    sm.H += 2.0 * sm.G[k].transpose() * q.asDiagonal() * sm.G[k];
    sm.H.block(k * n, k * n, n, n) += Eigen::MatrixXd(2.0 * r.asDiagonal());
  }

  sm.C = Eigen::MatrixXd::Zero(m, nv);
  for (int k = 0; k < m; ++k) sm.C.row(k).segment(k * n, n).setOnes();
  return sm;
}

StageMatrices build_stage_matrices(const MarketModel& model, int s) {
  std::vector<int> all(model.num_agents());
  for (int i = 0; i < model.num_agents(); ++i) all[i] = i;
  return build_stage_matrices(model, s, all);
}

Eigen::VectorXd assemble_stage_f(const StageMatrices& sm,
                                 const MarketModel& model,
                                 const Eigen::VectorXd& bid,
                                 const std::vector<Eigen::VectorXd>& cx,
                                 const std::vector<Eigen::VectorXd>& cu) {
  const int n = static_cast<int>(sm.agents.size());
  const int m = sm.blocks;
  Eigen::VectorXd q(n), r(n);
  for (int j = 0; j < n; ++j) {
    q[j] = model.agents[sm.agents[j]].q;
    r[j] = model.agents[sm.agents[j]].r;
  }
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n * m);
  for (int k = 0; k < m; ++k) {
    const Eigen::VectorXd alpha = sm.Apow[k].cwiseProduct(bid);
    f += 2.0 * sm.G[k].transpose() * q.cwiseProduct(alpha + cx[k]);
    f.segment(k * n, n) += 2.0 * r.cwiseProduct(cu[k]);
  }
  return f;
}

double stage_constant(const StageMatrices& sm, const MarketModel& model,
                      const Eigen::VectorXd& bid,
                      const std::vector<Eigen::VectorXd>& cx) {
  const int n = static_cast<int>(sm.agents.size());
  Eigen::VectorXd q(n);
  for (int j = 0; j < n; ++j) q[j] = model.agents[sm.agents[j]].q;
  double value = 0.0;
  for (int k = 0; k < sm.blocks; ++k) {
    const Eigen::VectorXd alpha = sm.Apow[k].cwiseProduct(bid);
    value += q.cwiseProduct(alpha).dot(alpha) +
             2.0 * q.cwiseProduct(cx[k]).dot(alpha);
  }
  return value;
}

}  // namespace detail

namespace {

// History cross sums restricted to a subset of agents.
void subset_history(const LayerGrid& grid, int s, const std::vector<int>& agents,
                    std::vector<Eigen::VectorXd>* cx,
                    std::vector<Eigen::VectorXd>* cu) {
  const int n = static_cast<int>(agents.size());
  const int m = grid.horizon() - s;
  cx->assign(m, Eigen::VectorXd::Zero(n));
  cu->assign(m, Eigen::VectorXd::Zero(n));
  for (int k = 0; k < m; ++k) {
    const Eigen::VectorXd fx = grid.history_x_sum(s, s + k);
    const Eigen::VectorXd fu = grid.history_u_sum(s, s + k);
    for (int j = 0; j < n; ++j) {
      (*cx)[k][j] = fx[agents[j]];
      (*cu)[k][j] = fu[agents[j]];
    }
  }
}

}  // namespace

double stage_objective(const MarketModel& model, int s, const LayerGrid& grid,
                       const std::vector<Eigen::VectorXd>& x_hat_row,
                       const std::vector<Eigen::VectorXd>& u_row) {
  const int T = model.horizon;
  const int m = T - s;
  if (static_cast<int>(x_hat_row.size()) != m ||
      static_cast<int>(u_row.size()) != m)
    throw std::invalid_argument("candidate layer rows must span t = s..T-1");
  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();
  const Eigen::VectorXd q = model.q_vec();
  const Eigen::VectorXd r = model.r_vec();

  for (int k = 1; k < m; ++k) {
    const Eigen::VectorXd predicted =
        a.cwiseProduct(x_hat_row[k - 1]) + b.cwiseProduct(u_row[k - 1]);
    const double err = (x_hat_row[k] - predicted).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, predicted.cwiseAbs().maxCoeff());
    if (err > 1e-9 * scale)
      throw std::invalid_argument(
          "candidate layers violate zero-noise propagation at offset " +
          std::to_string(k));
  }

  double value = 0.0;
  for (int k = 0; k < m; ++k) {
    const Eigen::VectorXd cx = grid.history_x_sum(s, s + k);
    const Eigen::VectorXd cu = grid.history_u_sum(s, s + k);
    value += q.cwiseProduct(x_hat_row[k]).dot(x_hat_row[k]) +
             r.cwiseProduct(u_row[k]).dot(u_row[k]) +
             2.0 * q.cwiseProduct(cx).dot(x_hat_row[k]) +
             2.0 * r.cwiseProduct(cu).dot(u_row[k]);
  }
  return value;
}

StageSolution solve_stage(const MarketModel& model, int s, const LayerGrid& grid,
                          const Eigen::VectorXd& bid) {
  const int n = model.num_agents();
  if (bid.size() != n) throw std::invalid_argument("bid dimension mismatch");
  if (grid.stages_solved() < s)
    throw std::logic_error("history layers missing for stage solve");

  const detail::StageMatrices sm = detail::build_stage_matrices(model, s);
  std::vector<Eigen::VectorXd> cx, cu;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  subset_history(grid, s, all, &cx, &cu);

  const Eigen::VectorXd f = detail::assemble_stage_f(sm, model, bid, cx, cu);
  const QpSolution sol = equality_qp_solve(
      sm.H, f, sm.C, Eigen::VectorXd::Zero(sm.blocks));

  StageSolution out;
  const int m = sm.blocks;
  out.u.resize(m);
  for (int k = 0; k < m; ++k) out.u[k] = sol.z.segment(k * n, n);
  out.x_hat.resize(m);
  out.x_hat[0] = bid;
  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();
  for (int k = 1; k < m; ++k)
    out.x_hat[k] = a.cwiseProduct(out.x_hat[k - 1]) + b.cwiseProduct(out.u[k - 1]);
  out.objective = sol.value + detail::stage_constant(sm, model, bid, cx);
  return out;
}

double others_stage_value(const MarketModel& model, int s, const LayerGrid& grid,
                          const Eigen::VectorXd& bid, int excluded) {
  const int n = model.num_agents();
  if (n < 2) throw std::invalid_argument("others-only value needs N >= 2");
  std::vector<int> rest;
  rest.reserve(n - 1);
  for (int j = 0; j < n; ++j)
    if (j != excluded) rest.push_back(j);

  const detail::StageMatrices sm = detail::build_stage_matrices(model, s, rest);
  std::vector<Eigen::VectorXd> cx, cu;
  subset_history(grid, s, rest, &cx, &cu);
  Eigen::VectorXd sub_bid(n - 1);
  for (int j = 0; j < n - 1; ++j) sub_bid[j] = bid[rest[j]];

  const Eigen::VectorXd f = detail::assemble_stage_f(sm, model, sub_bid, cx, cu);
  const QpSolution sol = equality_qp_solve(
      sm.H, f, sm.C, Eigen::VectorXd::Zero(sm.blocks));
  return sol.value + detail::stage_constant(sm, model, sub_bid, cx);
}

Eigen::VectorXd layered_payment(const MarketModel& model, int s,
                                const LayerGrid& grid, HChoice h,
                                bool* pivot_degenerate) {
  const int n = model.num_agents();
  const int T = model.horizon;
  if (grid.stages_solved() <= s)
    throw std::logic_error("stage must be solved before payments");
  const Eigen::VectorXd q = model.q_vec();
  const Eigen::VectorXd r = model.r_vec();

  // Per-agent share of L_s at the solved layers.
  Eigen::VectorXd bracket = Eigen::VectorXd::Zero(n);
  for (int t = s; t < T; ++t) {
    const Eigen::VectorXd& xh = grid.x_hat(s, t);
    const Eigen::VectorXd& uu = grid.u(s, t);
    const Eigen::VectorXd cx = grid.history_x_sum(s, t);
    const Eigen::VectorXd cu = grid.history_u_sum(s, t);
    for (int j = 0; j < n; ++j)
      bracket[j] += q[j] * xh[j] * xh[j] + r[j] * uu[j] * uu[j] +
                    2.0 * q[j] * cx[j] * xh[j] + 2.0 * r[j] * cu[j] * uu[j];
  }

  const double all = bracket.sum();
  Eigen::VectorXd payments(n);
  for (int i = 0; i < n; ++i) {
    double hi = 0.0;
    if (h == HChoice::pivot) {
      if (n == 1) {
        if (pivot_degenerate) *pivot_degenerate = true;
      } else {
        hi = others_stage_value(model, s, grid, grid.x_hat(s, s), i);
      }
    }
    payments[i] = hi - (all - bracket[i]);
  }
  return payments;
}

MechanismRun run_mechanism(const MarketModel& model,
                           const std::vector<Eigen::VectorXd>& bids, HChoice h) {
  validate_model(model);
  const int n = model.num_agents();
  const int T = model.horizon;
  if (static_cast<int>(bids.size()) != T)
    throw std::invalid_argument("one bid vector per stage required");

  MechanismRun run;
  run.grid = LayerGrid(n, T);
  run.ledger.payments = Eigen::MatrixXd::Zero(n, T);
  run.ledger.stage_values = Eigen::VectorXd::Zero(T);
  run.ledger.h_choice = h;

  for (int s = 0; s < T; ++s) {
    StageSolution stage = solve_stage(model, s, run.grid, bids[s]);
    run.ledger.stage_values[s] = stage.objective;
    run.grid.set_stage(s, std::move(stage.x_hat), std::move(stage.u));
    run.ledger.payments.col(s) = layered_payment(
        model, s, run.grid, h, &run.ledger.pivot_degenerate);
  }
  return run;
}

std::vector<std::vector<Eigen::VectorXd>> build_true_layers(
    const MarketModel& model, const Eigen::MatrixXd& draws,
    const LayerGrid& grid) {
  const int n = model.num_agents();
  const int T = model.horizon;
  if (draws.rows() != T || draws.cols() != n)
    throw std::invalid_argument("draws must be T x N");
  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();

  std::vector<std::vector<Eigen::VectorXd>> rows(T);
  for (int s = 0; s < T; ++s) {
    rows[s].resize(T - s);
    rows[s][0] = draws.row(s).transpose();
    for (int k = 1; k < T - s; ++k)
      rows[s][k] = a.cwiseProduct(rows[s][k - 1]) +
                   b.cwiseProduct(grid.u(s, s + k - 1));
  }
  return rows;
}

DecompositionResidual decomposition_residual(const MarketModel& model,
                                             const LayerGrid& grid,
                                             const Trajectory& traj) {
  if (!grid.has_true_layers())
    throw std::invalid_argument("decomposition check needs true layers");
  const int T = model.horizon;
  const Eigen::VectorXd q = model.q_vec();
  const Eigen::VectorXd r = model.r_vec();

  DecompositionResidual res;
  double layered_welfare = 0.0;
  for (int s = 0; s < T; ++s) {
    for (int t = s; t < T; ++t) {
      Eigen::VectorXd cx = Eigen::VectorXd::Zero(model.num_agents());
      Eigen::VectorXd cu = Eigen::VectorXd::Zero(model.num_agents());
      for (int tau = 0; tau < s; ++tau) {
        cx += grid.x_true(tau, t);
        cu += grid.u(tau, t);
      }
      const Eigen::VectorXd& xs = grid.x_true(s, t);
      const Eigen::VectorXd& us = grid.u(s, t);
      layered_welfare += q.cwiseProduct(xs).dot(xs) + r.cwiseProduct(us).dot(us) +
                         2.0 * q.cwiseProduct(cx).dot(xs) +
                         2.0 * r.cwiseProduct(cu).dot(us);
    }
  }

  for (int t = 0; t < T; ++t) {
    Eigen::VectorXd xsum = Eigen::VectorXd::Zero(model.num_agents());
    for (int s = 0; s <= t; ++s) xsum += grid.x_true(s, t);
    res.state = std::max(res.state,
                         (xsum - traj.states[t]).cwiseAbs().maxCoeff());
    res.control = std::max(
        res.control,
        (grid.total_control(t) - traj.controls[t]).cwiseAbs().maxCoeff());
  }
  res.welfare = std::abs(layered_welfare - random_social_welfare(model, traj));
  return res;
}

}  // namespace slqg
