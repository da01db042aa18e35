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

#include "slqg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "slqg/rng.hpp"
#include "slqg/threads.hpp"

namespace slqg {
namespace {

constexpr std::uint64_t kMaxGridPoints = 20'000'000;

std::vector<std::uint64_t> axis_sizes(const std::vector<GridAxis>& axes) {
  std::vector<std::uint64_t> sizes;
  sizes.reserve(axes.size());
  for (const auto& ax : axes) {
    if (!(ax.step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (ax.hi < ax.lo) throw std::invalid_argument("empty grid axis");
    sizes.push_back(
        static_cast<std::uint64_t>(std::floor((ax.hi - ax.lo) / ax.step + 1e-9)) + 1);
  }
  return sizes;
}

Eigen::VectorXd point_at(const std::vector<GridAxis>& axes,
                         const std::vector<std::uint64_t>& sizes,
                         std::uint64_t flat) {
  Eigen::VectorXd p(static_cast<int>(axes.size()));
  for (int d = static_cast<int>(axes.size()) - 1; d >= 0; --d) {
    const std::uint64_t k = flat % sizes[d];
    flat /= sizes[d];
    p[d] = axes[d].lo + static_cast<double>(k) * axes[d].step;
  }
  return p;
}

}  // namespace

GridResult grid_qp_oracle_serial(
    const std::vector<GridAxis>& axes,
    const std::function<double(const Eigen::VectorXd&)>& objective) {
  if (axes.empty()) throw std::invalid_argument("empty grid");
  const auto sizes = axis_sizes(axes);
  std::uint64_t total = 1;
  for (auto s : sizes) {
    if (total > kMaxGridPoints / s) throw std::invalid_argument("grid too large");
    total *= s;
  }

  GridResult best;
  best.evaluations = total;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::uint64_t flat = 0; flat < total; ++flat) {
    const Eigen::VectorXd p = point_at(axes, sizes, flat);
    const double v = objective(p);
    if (v > best.value) {
      best.value = v;
      best.index = flat;
      best.argmax = p;
    }
  }
  return best;
}

GridResult grid_qp_oracle(const std::vector<GridAxis>& axes,
                          const std::function<double(const Eigen::VectorXd&)>& objective,
                          int threads) {
  if (axes.empty()) throw std::invalid_argument("empty grid");
  const auto sizes = axis_sizes(axes);
  std::uint64_t total = 1;
  for (auto s : sizes) {
    if (total > kMaxGridPoints / s) throw std::invalid_argument("grid too large");
    total *= s;
  }

  const int workers = resolve_thread_count(threads);
  std::vector<GridResult> local(workers);
  for (auto& l : local) l.value = -std::numeric_limits<double>::infinity();

#pragma omp parallel num_threads(workers)
  {
#ifdef _OPENMP
    const int me = omp_get_thread_num();
#else
    const int me = 0;
#endif
    GridResult mine;
    mine.value = -std::numeric_limits<double>::infinity();
#pragma omp for schedule(static)
    for (std::int64_t flat = 0; flat < static_cast<std::int64_t>(total); ++flat) {
      const Eigen::VectorXd p = point_at(axes, sizes, static_cast<std::uint64_t>(flat));
      const double v = objective(p);
      // Strict improvement or smaller index on ties: a total order, so
      // the merged result does not depend on the partitioning.
      if (v > mine.value ||
          (v == mine.value && static_cast<std::uint64_t>(flat) < mine.index)) {
        mine.value = v;
        mine.index = static_cast<std::uint64_t>(flat);
        mine.argmax = p;
      }
    }
    local[me] = mine;
  }

  GridResult best;
  best.evaluations = total;
  best.value = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (const auto& l : local) {
    if (l.argmax.size() == 0) continue;
    if (first || l.value > best.value ||
        (l.value == best.value && l.index < best.index)) {
      best.value = l.value;
      best.index = l.index;
      best.argmax = l.argmax;
      first = false;
    }
  }
  best.evaluations = total;
  if (first) throw std::logic_error("grid scan produced no candidate");
  return best;
}

Eigen::VectorXd balanced_embed(const Eigen::VectorXd& free_coords) {
  Eigen::VectorXd full(free_coords.size() + 1);
  full.head(free_coords.size()) = free_coords;
  full[free_coords.size()] = -free_coords.sum();
  return full;
}

ConstrainedGridProblem make_static_grid_problem(
    const std::vector<StaticQuadraticBid>& bids, double halfwidth, double step) {
  const int n = static_cast<int>(bids.size());
  if (n < 2) throw std::invalid_argument("grid problem needs N >= 2");
  const Eigen::VectorXd u_star = clear_static(bids);

  ConstrainedGridProblem prob;
  prob.kkt_free = u_star.head(n - 1);
  for (int i = 0; i < n - 1; ++i)
    prob.axes.push_back({u_star[i] - halfwidth, u_star[i] + halfwidth, step});
  prob.objective = [bids](const Eigen::VectorXd& free_coords) {
    const Eigen::VectorXd u = balanced_embed(free_coords);
    double v = 0.0;
    for (int i = 0; i < u.size(); ++i) v += bid_value(bids[i], u[i]);
    return v;
  };
  double kv = 0.0;
  for (int i = 0; i < n; ++i) kv += bid_value(bids[i], u_star[i]);
  prob.kkt_value = kv;
  return prob;
}

ConstrainedGridProblem make_dyndet_grid_problem(const std::vector<DetBid>& bids,
                                                int horizon, double halfwidth,
                                                double step) {
  const int n = static_cast<int>(bids.size());
  if (n < 2) throw std::invalid_argument("grid problem needs N >= 2");
  const DetTrajectory star = clear_dynamic_det(bids, horizon);

  ConstrainedGridProblem prob;
  prob.kkt_free = Eigen::VectorXd((n - 1) * horizon);
  for (int t = 0; t < horizon; ++t)
    for (int i = 0; i < n - 1; ++i) {
      const double center = star.controls(i, t);
      prob.kkt_free[t * (n - 1) + i] = center;
      prob.axes.push_back({center - halfwidth, center + halfwidth, step});
    }
  prob.objective = [bids, horizon, n](const Eigen::VectorXd& free_coords) {
    DetTrajectory traj;
    traj.controls = Eigen::MatrixXd(n, horizon);
    for (int t = 0; t < horizon; ++t)
      traj.controls.col(t) =
          balanced_embed(free_coords.segment(t * (n - 1), n - 1));
    traj.states = Eigen::MatrixXd(n, horizon);
    for (int i = 0; i < n; ++i) {
      double x = bids[i].x0;
      for (int t = 0; t < horizon; ++t) {
        traj.states(i, t) = x;
        x = bids[i].a * x + bids[i].b * traj.controls(i, t);
      }
    }
    return det_declared_welfare(bids, traj);
  };
  prob.kkt_value = det_declared_welfare(bids, star);
  return prob;
}

ConstrainedGridProblem make_stage_grid_problem(const MarketModel& model, int s,
                                               const LayerGrid& grid,
                                               const Eigen::VectorXd& bid,
                                               double halfwidth, double step) {
  const int n = model.num_agents();
  if (n < 2) throw std::invalid_argument("grid problem needs N >= 2");
  const int T = model.horizon;
  const int m = T - s;
  const StageSolution star = solve_stage(model, s, grid, bid);

  ConstrainedGridProblem prob;
  prob.kkt_free = Eigen::VectorXd((n - 1) * m);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n - 1; ++i) {
      const double center = star.u[k][i];
      prob.kkt_free[k * (n - 1) + i] = center;
      prob.axes.push_back({center - halfwidth, center + halfwidth, step});
    }

  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();
  prob.objective = [&model, s, &grid, bid, a, b, n, m](const Eigen::VectorXd& free_coords) {
    std::vector<Eigen::VectorXd> u_row(m), x_row(m);
    for (int k = 0; k < m; ++k)
      u_row[k] = balanced_embed(free_coords.segment(k * (n - 1), n - 1));
    x_row[0] = bid;
    for (int k = 1; k < m; ++k)
      x_row[k] = a.cwiseProduct(x_row[k - 1]) + b.cwiseProduct(u_row[k - 1]);
    return stage_objective(model, s, grid, x_row, u_row);
  };
  prob.kkt_value = star.objective;
  return prob;
}

OracleAgreement verify_against_grid(const ConstrainedGridProblem& problem,
                                    int threads, double tol) {
  const GridResult grid = grid_qp_oracle(problem.axes, problem.objective, threads);
  OracleAgreement out;
  out.best_grid_value = grid.value;
  out.kkt_value = problem.kkt_value;
  out.kkt_not_beaten = problem.kkt_value >= grid.value - tol;
  out.max_coordinate_gap =
      (grid.argmax - problem.kkt_free).cwiseAbs().maxCoeff();
  out.within_one_step = true;
  for (std::size_t d = 0; d < problem.axes.size(); ++d)
    if (std::abs(grid.argmax[static_cast<int>(d)] -
                 problem.kkt_free[static_cast<int>(d)]) >
        problem.axes[d].step + 1e-12)
      out.within_one_step = false;
  return out;
}

BestResponseResult best_response_search(
    const std::function<double(double)>& payoff, const std::vector<double>& grid,
    double truthful_bid, double tol) {
  if (grid.empty()) throw std::invalid_argument("empty bid grid");
  BestResponseResult out;
  out.best_value = -std::numeric_limits<double>::infinity();
  double spacing = std::numeric_limits<double>::infinity();
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k + 1 < sorted.size(); ++k)
    spacing = std::min(spacing, sorted[k + 1] - sorted[k]);
  if (sorted.size() == 1) spacing = 0.0;

  for (double b : sorted) {
    const double v = payoff(b);
    if (v > out.best_value) {
      out.best_value = v;
      out.best_point = b;
    }
  }
  out.truthful_value = payoff(truthful_bid);
  out.truthful_optimal =
      std::abs(out.best_point - truthful_bid) <= spacing + 1e-12 ||
      out.truthful_value >= out.best_value - tol;
  return out;
}

double fd_consistency(const std::function<double(double)>& expected_payoff,
                      double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  return (expected_payoff(step) - expected_payoff(-step)) / (2.0 * step);
}

LayerGrid random_balanced_decomposition(const MarketModel& model,
                                        const Eigen::MatrixXd& draws,
                                        const std::vector<Eigen::VectorXd>& totals,
                                        std::uint64_t seed, std::uint64_t episode) {
  const int n = model.num_agents();
  const int T = model.horizon;
  if (static_cast<int>(totals.size()) != T)
    throw std::invalid_argument("one control total per stage required");
  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();

  LayerGrid grid(n, T);
  for (int s = 0; s < T; ++s) {
    std::vector<Eigen::VectorXd> u_row(T - s), x_row(T - s);
    // The diagonal entry closes the column: whatever the later layers of
    // earlier stages took, the stage-s layer absorbs the remainder so
    // the column still sums to the total.
    Eigen::VectorXd remainder = totals[s];
    for (int tau = 0; tau < s; ++tau) remainder -= grid.u(tau, s);
    u_row[0] = remainder;
    for (int k = 1; k < T - s; ++k) {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i)
        v[i] = 2.0 * uniform_draw(seed, episode,
                                  static_cast<std::uint32_t>(1000 + s * T + k),
                                  static_cast<std::uint32_t>(i)) -
               1.0;
      v.array() -= v.mean();  // balanced
      u_row[k] = v;
    }
    x_row[0] = draws.row(s).transpose();
    for (int k = 1; k < T - s; ++k)
      x_row[k] = a.cwiseProduct(x_row[k - 1]) + b.cwiseProduct(u_row[k - 1]);
    grid.set_stage(s, x_row, u_row);
  }
  grid.set_true_layers(build_true_layers(model, draws, grid));
  return grid;
}

}  // namespace slqg
