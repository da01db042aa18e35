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

#include "slqg/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slqg/qp.hpp"
#include "slqg/rng.hpp"

namespace slqg {
namespace {

// Affine function of the unresolved Gaussian vector eta: value = c + G eta.
struct AffineVec {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;

  static AffineVec constant(const Eigen::VectorXd& v, int eta_dim) {
    return {v, Eigen::MatrixXd::Zero(v.size(), eta_dim)};
  }
  static AffineVec zero(int dim, int eta_dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, eta_dim)};
  }
  AffineVec segment(int start, int len) const {
    return {c.segment(start, len), G.middleRows(start, len)};
  }
};

AffineVec operator+(const AffineVec& a, const AffineVec& b) {
  return {a.c + b.c, a.G + b.G};
}

AffineVec apply(const Eigen::MatrixXd& M, const AffineVec& v) {
  return {M * v.c, M * v.G};
}

AffineVec scale_rows(const Eigen::VectorXd& w, const AffineVec& v) {
  return {w.cwiseProduct(v.c), w.asDiagonal() * v.G};
}

struct AffineScalar {
  double c = 0.0;
  Eigen::RowVectorXd g;
};

AffineScalar at(const AffineVec& v, int j) { return {v.c[j], v.G.row(j)}; }

// E[x y] for jointly affine scalars over eta ~ N(0, diag(cov)).
double e_prod(const AffineScalar& x, const AffineScalar& y,
              const Eigen::VectorXd& cov) {
  return x.c * y.c + (x.g.transpose().cwiseProduct(y.g.transpose())).dot(cov);
}

// E[v' M v] for an affine vector.
double e_quadform(const AffineVec& v, const Eigen::MatrixXd& M,
                  const Eigen::VectorXd& cov) {
  double value = v.c.dot(M * v.c);
  for (int k = 0; k < v.G.cols(); ++k) {
    const Eigen::VectorXd col = v.G.col(k);
    value += cov[k] * col.dot(M * col);
  }
  return value;
}

struct EtaLayout {
  int dim = 0;
  Eigen::VectorXd cov;
  // index(row, agent) for the unresolved draw entries; -1 when resolved.
  Eigen::MatrixXi index;
};

EtaLayout build_eta(const MarketModel& model, int agent, int stage) {
  const int n = model.num_agents();
  const int T = model.horizon;
  EtaLayout layout;
  layout.index = Eigen::MatrixXi::Constant(T, n, -1);
  std::vector<double> cov;
  for (int j = 0; j < n; ++j) {
    if (j == agent) continue;
    layout.index(stage, j) = static_cast<int>(cov.size());
    cov.push_back(stage == 0 ? model.agents[j].zeta : model.agents[j].sigma);
  }
  for (int s = stage + 1; s < T; ++s)
    for (int j = 0; j < n; ++j) {
      layout.index(s, j) = static_cast<int>(cov.size());
      cov.push_back(model.agents[j].sigma);
    }
  layout.dim = static_cast<int>(cov.size());
  layout.cov = Eigen::Map<Eigen::VectorXd>(cov.data(), layout.dim);
  return layout;
}

AffineVec affine_draw_row(const MarketModel& model, const EtaLayout& eta,
                          const HistoryPrefix& prefix, int row) {
  const int n = model.num_agents();
  AffineVec v = AffineVec::zero(n, eta.dim);
  for (int j = 0; j < n; ++j) {
    const int k = eta.index(row, j);
    if (k >= 0)
      v.G(j, k) = 1.0;
    else
      v.c[j] = prefix.draws(row, j);
  }
  return v;
}

AffineVec affine_stage_f(const detail::StageMatrices& sm, const MarketModel& model,
                         const AffineVec& bid, const std::vector<AffineVec>& cx,
                         const std::vector<AffineVec>& cu, int eta_dim) {
  const int n = static_cast<int>(sm.agents.size());
  Eigen::VectorXd q(n), r(n);
  for (int j = 0; j < n; ++j) {
    q[j] = model.agents[sm.agents[j]].q;
    r[j] = model.agents[sm.agents[j]].r;
  }
  AffineVec f = AffineVec::zero(n * sm.blocks, eta_dim);
  for (int k = 0; k < sm.blocks; ++k) {
    const AffineVec alpha = scale_rows(sm.Apow[k], bid);
    const AffineVec term = apply(2.0 * sm.G[k].transpose() * q.asDiagonal(),
                                 alpha + cx[k]);
    f = f + term;
    const AffineVec cu_term = scale_rows(2.0 * r, cu[k]);
    f.c.segment(k * n, n) += cu_term.c;
    f.G.middleRows(k * n, n) += cu_term.G;
  }
  return f;
}

AffineVec restrict_agents(const AffineVec& v, const std::vector<int>& agents) {
  AffineVec out;
  out.c = Eigen::VectorXd(static_cast<int>(agents.size()));
  out.G = Eigen::MatrixXd(static_cast<int>(agents.size()), v.G.cols());
  for (std::size_t j = 0; j < agents.size(); ++j) {
    out.c[static_cast<int>(j)] = v.c[agents[j]];
    out.G.row(static_cast<int>(j)) = v.G.row(agents[j]);
  }
  return out;
}

// E of the others-only stage subproblem's optimal value: the QP part is
// f'(S H S / 2 - S) f at z = -S f, plus the z-independent constant
// sum_k sum_j q_j [alpha^2 + 2 cx alpha].
double e_pivot_value(const MarketModel& model, int s, int excluded,
                     const AffineVec& bid, const std::vector<AffineVec>& cx,
                     const std::vector<AffineVec>& cu, const EtaLayout& eta) {
  const int n = model.num_agents();
  std::vector<int> rest;
  for (int j = 0; j < n; ++j)
    if (j != excluded) rest.push_back(j);

  const detail::StageMatrices sm = detail::build_stage_matrices(model, s, rest);
  const AffineVec bid_o = restrict_agents(bid, rest);
  std::vector<AffineVec> cx_o, cu_o;
  for (int k = 0; k < sm.blocks; ++k) {
    cx_o.push_back(restrict_agents(cx[k], rest));
    cu_o.push_back(restrict_agents(cu[k], rest));
  }

  const AffineVec f = affine_stage_f(sm, model, bid_o, cx_o, cu_o, eta.dim);
  const Eigen::MatrixXd S = kkt_solution_map(sm.H, sm.C);
  const Eigen::MatrixXd M = 0.5 * S.transpose() * sm.H * S - S;
  double value = e_quadform(f, M, eta.cov);

  for (int k = 0; k < sm.blocks; ++k) {
    const AffineVec alpha = scale_rows(sm.Apow[k], bid_o);
    for (std::size_t j = 0; j < rest.size(); ++j) {
      const double qj = model.agents[rest[j]].q;
      const AffineScalar aj = at(alpha, static_cast<int>(j));
      const AffineScalar cj = at(cx_o[k], static_cast<int>(j));
      value += qj * e_prod(aj, aj, eta.cov) + 2.0 * qj * e_prod(cj, aj, eta.cov);
    }
  }
  return value;
}

}  // namespace

HistoryPrefix history_from_seed(const MarketModel& model, int stage,
                                std::uint64_t seed, std::uint64_t episode) {
  const int n = model.num_agents();
  HistoryPrefix prefix;
  prefix.draws = Eigen::MatrixXd(stage + 1, n);
  for (int s = 0; s <= stage; ++s)
    for (int i = 0; i < n; ++i) {
      const double sd = s == 0 ? std::sqrt(model.agents[i].zeta)
                               : std::sqrt(model.agents[i].sigma);
      prefix.draws(s, i) = sd * normal_draw(seed, episode,
                                            static_cast<std::uint32_t>(s),
                                            static_cast<std::uint32_t>(i));
    }
  return prefix;
}

double exact_expected_net_utility(const MarketModel& model, int agent, int stage,
                                  double delta, HChoice h,
                                  const HistoryPrefix& prefix, PaymentRule rule) {
  validate_model(model);
  const int n = model.num_agents();
  const int T = model.horizon;
  if (agent < 0 || agent >= n) throw std::invalid_argument("agent out of range");
  if (stage < 0 || stage >= T) throw std::invalid_argument("stage out of range");
  if (prefix.draws.rows() != stage + 1 || prefix.draws.cols() != n)
    throw std::invalid_argument("history prefix must be (stage+1) x N");

  // Truthful replay of the resolved stages.
  LayerGrid replay(n, T);
  Eigen::VectorXd replay_payments = Eigen::VectorXd::Zero(stage);
  for (int s = 0; s < stage; ++s) {
    StageSolution sol = solve_stage(model, s, replay,
                                    prefix.draws.row(s).transpose());
    replay.set_stage(s, std::move(sol.x_hat), std::move(sol.u));
    replay_payments[s] = layered_payment(model, s, replay, h)[agent];
  }

  const EtaLayout eta = build_eta(model, agent, stage);
  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();
  const Eigen::VectorXd q = model.q_vec();
  const Eigen::VectorXd r = model.r_vec();

  // Layer rows as affine functions of eta; resolved stages enter as
  // constants.
  std::vector<std::vector<AffineVec>> xh(T), ul(T);
  for (int s = 0; s < stage; ++s) {
    for (int t = s; t < T; ++t) {
      xh[s].push_back(AffineVec::constant(replay.x_hat(s, t), eta.dim));
      ul[s].push_back(AffineVec::constant(replay.u(s, t), eta.dim));
    }
  }

  double expected = -replay_payments.sum();

  for (int s = stage; s < T; ++s) {
    AffineVec bid = affine_draw_row(model, eta, prefix, s);
    if (s == stage) bid.c[agent] = prefix.draws(stage, agent) + delta;

    const detail::StageMatrices sm = detail::build_stage_matrices(model, s);
    std::vector<AffineVec> cx, cu;
    for (int k = 0; k < sm.blocks; ++k) {
      AffineVec sx = AffineVec::zero(n, eta.dim);
      AffineVec su = AffineVec::zero(n, eta.dim);
      for (int tau = 0; tau < s; ++tau) {
        sx = sx + xh[tau][s + k - tau];
        su = su + ul[tau][s + k - tau];
      }
      cx.push_back(std::move(sx));
      cu.push_back(std::move(su));
    }

    const AffineVec f = affine_stage_f(sm, model, bid, cx, cu, eta.dim);
    const Eigen::MatrixXd S = kkt_solution_map(sm.H, sm.C);
    const AffineVec z = apply(-S, f);

    ul[s].resize(sm.blocks);
    xh[s].resize(sm.blocks);
    for (int k = 0; k < sm.blocks; ++k) ul[s][k] = z.segment(k * n, n);
    xh[s][0] = bid;
    for (int k = 1; k < sm.blocks; ++k)
      xh[s][k] = scale_rows(a, xh[s][k - 1]) + scale_rows(b, ul[s][k - 1]);

    // E[p_agent(s)] = E[h] - sum_{j != agent} E[bracket_j].
    double e_payment = 0.0;
    if (h == HChoice::pivot && n > 1)
      e_payment += e_pivot_value(model, s, agent, bid, cx, cu, eta);
    for (int j = 0; j < n; ++j) {
      if (j == agent) continue;
      double ebr = 0.0;
      for (int k = 0; k < sm.blocks; ++k) {
        const AffineScalar xj = at(xh[s][k], j);
        const AffineScalar uj = at(ul[s][k], j);
        ebr += q[j] * e_prod(xj, xj, eta.cov) + r[j] * e_prod(uj, uj, eta.cov);
        if (rule == PaymentRule::groves) {
          const AffineScalar cxj = at(cx[k], j);
          const AffineScalar cuj = at(cu[k], j);
          ebr += 2.0 * q[j] * e_prod(cxj, xj, eta.cov) +
                 2.0 * r[j] * e_prod(cuj, uj, eta.cov);
        }
      }
      e_payment -= ebr;
    }
    expected -= e_payment;
  }

  // True state under the total allocations; the deviator's utility uses
  // its actual disturbances, not its bid.
  AffineVec x = affine_draw_row(model, eta, prefix, 0);
  for (int t = 0; t < T; ++t) {
    AffineVec u_tot = AffineVec::zero(n, eta.dim);
    for (int s = 0; s <= t; ++s) u_tot = u_tot + ul[s][t - s];
    const AffineScalar xi = at(x, agent);
    const AffineScalar ui = at(u_tot, agent);
    expected += q[agent] * e_prod(xi, xi, eta.cov) +
                r[agent] * e_prod(ui, ui, eta.cov);
    if (t + 1 < T) {
      x = scale_rows(a, x) + scale_rows(b, u_tot) +
          affine_draw_row(model, eta, prefix, t + 1);
    }
  }
  return expected;
}

std::vector<IcRow> ic_sweep(const MarketModel& model, int agent, int stage,
                            std::vector<double> grid, HChoice h,
                            const HistoryPrefix& prefix, double tol) {
  if (grid.empty()) throw std::invalid_argument("deviation grid is empty");
  std::sort(grid.begin(), grid.end());
  const bool has_zero =
      std::any_of(grid.begin(), grid.end(), [](double d) { return d == 0.0; });
  if (!has_zero) throw std::invalid_argument("deviation grid must contain 0");

  const double truthful =
      exact_expected_net_utility(model, agent, stage, 0.0, h, prefix);
  std::vector<IcRow> rows;
  rows.reserve(grid.size());
  for (double d : grid) {
    IcRow row;
    row.delta = d;
    row.expected_net_utility =
        d == 0.0 ? truthful
                 : exact_expected_net_utility(model, agent, stage, d, h, prefix);
    row.flagged = row.expected_net_utility > truthful + tol;
    rows.push_back(row);
  }
  return rows;
}

DeviationQuadratic fit_deviation_quadratic(const MarketModel& model, int agent,
                                           int stage, HChoice h,
                                           const HistoryPrefix& prefix,
                                           PaymentRule rule) {
  const auto eval = [&](double d) {
    return exact_expected_net_utility(model, agent, stage, d, h, prefix, rule);
  };
  const double em1 = eval(-1.0), e0 = eval(0.0), ep1 = eval(1.0), ep2 = eval(2.0);

  DeviationQuadratic fit;
  fit.c0 = e0;
  fit.c1 = 0.5 * (ep1 - em1);
  fit.c2 = 0.5 * (ep1 + em1) - e0;
  fit.fourth_point_residual =
      std::abs(ep2 - (fit.c0 + 2.0 * fit.c1 + 4.0 * fit.c2));
  const double scale = std::max(1.0, std::abs(e0));
  fit.flat = std::abs(fit.c2) < 1e-12 * scale;
  fit.vertex = fit.flat ? 0.0 : -fit.c1 / (2.0 * fit.c2);
  return fit;
}

}  // namespace slqg
