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
#include <functional>
#include <vector>

#include "slqg/mech_dyndet.hpp"
#include "slqg/mech_layered.hpp"
#include "slqg/mech_static.hpp"
#include "slqg/model.hpp"

namespace slqg {

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
};

struct GridResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
  std::uint64_t index = 0;  // flattened grid index of the argmax
  std::uint64_t evaluations = 0;
};

// Exhaustive scan of `objective` over the product grid. Ties break
// toward the smaller flattened index, so the result is independent of
// the partitioning. The parallel variant splits the flat range across
// OpenMP threads; the serial variant is the reference the tests compare
// against. Grids above ~2e7 points are refused.
GridResult grid_qp_oracle(const std::vector<GridAxis>& axes,
                          const std::function<double(const Eigen::VectorXd&)>& objective,
                          int threads = 0);
GridResult grid_qp_oracle_serial(
    const std::vector<GridAxis>& axes,
    const std::function<double(const Eigen::VectorXd&)>& objective);

// Lifts free coordinates (one per agent but the last) onto the balance
// hyperplane: the dropped coordinate is the negated sum.
Eigen::VectorXd balanced_embed(const Eigen::VectorXd& free_coords);

// A clearing problem reduced to free grid coordinates, with the KKT
// solution mapped into the same coordinates for comparison.
struct ConstrainedGridProblem {
  std::vector<GridAxis> axes;
  std::function<double(const Eigen::VectorXd&)> objective;
  Eigen::VectorXd kkt_free;
  double kkt_value = 0.0;
};

// Static clearing: free coordinates u_1..u_{N-1}, boxes centered on the
// KKT solution.
ConstrainedGridProblem make_static_grid_problem(
    const std::vector<StaticQuadraticBid>& bids, double halfwidth, double step);

// Open-loop deterministic clearing: free coordinates are the first N-1
// agents' controls at every stage.
ConstrainedGridProblem make_dyndet_grid_problem(const std::vector<DetBid>& bids,
                                                int horizon, double halfwidth,
                                                double step);

// Layered stage-s subproblem against the history in `grid`. The returned
// objective holds references to `model` and `grid`; keep both alive while
// scanning.
ConstrainedGridProblem make_stage_grid_problem(const MarketModel& model, int s,
                                               const LayerGrid& grid,
                                               const Eigen::VectorXd& bid,
                                               double halfwidth, double step);

struct OracleAgreement {
  bool kkt_not_beaten = false;    // no grid point exceeds the KKT value
  bool within_one_step = false;   // KKT solution within one step of argmax
  double best_grid_value = 0.0;
  double kkt_value = 0.0;
  double max_coordinate_gap = 0.0;
};

OracleAgreement verify_against_grid(const ConstrainedGridProblem& problem,
                                    int threads = 0, double tol = 1e-9);

struct BestResponseResult {
  double best_point = 0.0;
  double best_value = 0.0;
  double truthful_value = 0.0;
  bool truthful_optimal = false;  // within one grid step or payoff-tied
};

// Scans a scalar bid grid for the payoff maximizer; truth passes when it
// is within one grid step of the argmax or ties its payoff.
BestResponseResult best_response_search(
    const std::function<double(double)>& payoff, const std::vector<double>& grid,
    double truthful_bid, double tol = 1e-9);

// Central difference of an expected-payoff curve at 0.
double fd_consistency(const std::function<double(double)>& expected_payoff,
                      double step);

// A layer grid whose control layers are a random balanced decomposition
// of the given per-stage totals (keyed deterministically by seed and
// episode), with true layers propagated from the draws. The welfare
// identity RSW = sum_s L_s must hold for any such grid.
LayerGrid random_balanced_decomposition(const MarketModel& model,
                                        const Eigen::MatrixXd& draws,
                                        const std::vector<Eigen::VectorXd>& totals,
                                        std::uint64_t seed,
                                        std::uint64_t episode = 0);

}  // namespace slqg
