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

// Triangular layer arrays over 0 <= s <= t <= T-1. Layer s carries the
// contribution of the disturbance revealed at stage s to every later
// stage:
//   x_hat(s,s) = bid, x_hat(s,t) = A x_hat(s,t-1) + B u(s,t-1)  (zero noise),
//   1'u(s,t) = 0,
// and the totals reconstruct as sum_{s<=t} x(s,t) = X(t),
// sum_{s<=t} u(s,t) = U(t).
//
// x_hat holds the ISO's bid-based layers; x_true, when populated, holds
// the layers seeded with the actual noise draws and propagated with the
// same allocations.
class LayerGrid {
 public:
  LayerGrid() = default;
  LayerGrid(int num_agents, int horizon);

  int horizon() const { return horizon_; }
  int num_agents() const { return num_agents_; }
  int stages_solved() const { return stages_solved_; }

  const Eigen::VectorXd& x_hat(int s, int t) const;
  const Eigen::VectorXd& u(int s, int t) const;
  const Eigen::VectorXd& x_true(int s, int t) const;
  bool has_true_layers() const { return !x_true_.empty(); }

  // Installs the solved layer for stage s (vectors indexed t = s..T-1).
  void set_stage(int s, std::vector<Eigen::VectorXd> x_hat_row,
                 std::vector<Eigen::VectorXd> u_row);
  void set_true_layers(std::vector<std::vector<Eigen::VectorXd>> rows);

  // History cross sums entering the stage-s objective:
  // sum_{tau < s} x_hat(tau, t) and sum_{tau < s} u(tau, t).
  Eigen::VectorXd history_x_sum(int s, int t) const;
  Eigen::VectorXd history_u_sum(int s, int t) const;

  // Totals over solved layers: sum_{s <= t} of the layer at (s, t).
  Eigen::VectorXd total_control(int t) const;
  Eigen::VectorXd total_x_hat(int t) const;

 private:
  int num_agents_ = 0;
  int horizon_ = 0;
  int stages_solved_ = 0;
  std::vector<std::vector<Eigen::VectorXd>> x_hat_, u_, x_true_;
};

enum class HChoice { zero, pivot };

struct LayeredLedger {
  Eigen::MatrixXd payments;      // payments(i, s) = p_i(s)
  Eigen::VectorXd stage_values;  // optimal L_s per stage
  HChoice h_choice = HChoice::zero;
  bool pivot_degenerate = false;  // pivot requested with a single agent
};

namespace detail {

// Stage-s subproblem in stacked form over z = [U(s,s); ...; U(s,T-1)]
// restricted to the given agents. The objective is
// (1/2) z'Hz + f'z + const with
//   f = sum_t 2 G_t' Q (Apow_t .* bid + cx_t) + stack_t(2 R cu_t),
// where G_t maps z to the control part of x_hat(s,t) and cx/cu are the
// history cross sums.
struct StageMatrices {
  int stage = 0;
  int blocks = 0;                      // T - s
  std::vector<int> agents;             // model indices, in order
  Eigen::MatrixXd H;
  Eigen::MatrixXd C;                   // one balance row per block
  std::vector<Eigen::MatrixXd> G;      // per block: n x (n*blocks)
  std::vector<Eigen::VectorXd> Apow;   // per block: diagonal of A^(t-s)
};

StageMatrices build_stage_matrices(const MarketModel& model, int s,
                                   const std::vector<int>& agents);
StageMatrices build_stage_matrices(const MarketModel& model, int s);

Eigen::VectorXd assemble_stage_f(const StageMatrices& sm,
                                 const MarketModel& model,
                                 const Eigen::VectorXd& bid,
                                 const std::vector<Eigen::VectorXd>& cx,
                                 const std::vector<Eigen::VectorXd>& cu);

// Objective terms independent of z: sum_t [alpha'Q alpha + 2 cx'Q alpha].
double stage_constant(const StageMatrices& sm, const MarketModel& model,
                      const Eigen::VectorXd& bid,
                      const std::vector<Eigen::VectorXd>& cx);

}  // namespace detail

// Evaluates L_s for candidate layers at stage s against the history in
// `grid` (stages < s must be solved). Throws std::invalid_argument when
// the candidate x_hat row violates the zero-noise propagation invariant.
double stage_objective(const MarketModel& model, int s, const LayerGrid& grid,
                       const std::vector<Eigen::VectorXd>& x_hat_row,
                       const std::vector<Eigen::VectorXd>& u_row);

struct StageSolution {
  std::vector<Eigen::VectorXd> x_hat;  // t = s..T-1
  std::vector<Eigen::VectorXd> u;      // t = s..T-1
  double objective = 0.0;              // optimal L_s
};

// Maximizes L_s over the stacked allocations with per-stage balance rows,
// propagating x_hat(s, .) zero-noise from the bid.
StageSolution solve_stage(const MarketModel& model, int s, const LayerGrid& grid,
                          const Eigen::VectorXd& bid);

// Others-only stage subproblem value used by the pivot h: maximal
// j != excluded part of L_s from initial condition bid_{-excluded},
// with the others' own history cross terms.
double others_stage_value(const MarketModel& model, int s, const LayerGrid& grid,
                          const Eigen::VectorXd& bid, int excluded);

// Per-agent stage-s Groves payments
//   p_i(s) = h_i - sum_{j != i} bracket_j(s),
// where bracket_j is agent j's share of L_s at the solved layers. Stage s
// must already be installed in `grid`. pivot with a single agent degrades
// to h = 0 and sets *pivot_degenerate.
Eigen::VectorXd layered_payment(const MarketModel& model, int s,
                                const LayerGrid& grid, HChoice h,
                                bool* pivot_degenerate = nullptr);

struct MechanismRun {
  LayerGrid grid;
  LayeredLedger ledger;
};

// Runs solve_stage and layered_payment for s = 0..T-1 on the given bid
// sequence (one N-vector per stage). The ISO sees bids only.
MechanismRun run_mechanism(const MarketModel& model,
                           const std::vector<Eigen::VectorXd>& bids, HChoice h);

// Layers seeded with the true draws (row s of `draws` is X(0) for s = 0,
// else W(s-1)) and propagated with the grid's allocations.
std::vector<std::vector<Eigen::VectorXd>> build_true_layers(
    const MarketModel& model, const Eigen::MatrixXd& draws,
    const LayerGrid& grid);

struct DecompositionResidual {
  double state = 0.0;    // max |sum_s x_true(s,t) - X(t)|
  double control = 0.0;  // max |sum_s u(s,t) - U(t)|
  double welfare = 0.0;  // |sum_s L_s(true layers) - RSW|
};

// Checks the reconstruction identities on a grid carrying true layers
// against the realized trajectory.
DecompositionResidual decomposition_residual(const MarketModel& model,
                                             const LayerGrid& grid,
                                             const Trajectory& traj);

}  // namespace slqg
