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
#include "slqg/strategy.hpp"

namespace slqg {

struct MCConfig {
  int episodes = 1;
  std::uint64_t master_seed = 0;
  // When set, paired comparisons (mc_compare) reuse identical draws per
  // episode index; otherwise the deviated run is re-seeded.
  bool common_random_numbers = true;
};

// Pins leading disturbance draws of every episode: rows 0..k-1 of the
// draw matrix are replaced wholesale, and optionally one agent's entry
// of row k. Used to condition Monte Carlo runs on a fixed history.
struct NoisePin {
  Eigen::MatrixXd rows;  // k x N
  int own_agent = -1;
  double own_value = 0.0;
};

struct EpisodeResult {
  Trajectory trajectory;            // true states / total controls / noises
  Eigen::MatrixXd draws;            // T x N; row s feeds the stage-s bid
  std::vector<Eigen::VectorXd> bids;
  LayerGrid grid;                   // with true layers attached
  LayeredLedger ledger;
  Eigen::VectorXd net_utilities;    // sum_t [q x^2 + r u^2] - sum_s p(s)
  double rsw = 0.0;
};

// Draw matrix for one episode: row 0 ~ N(0, Z), rows >= 1 ~ N(0, Sigma),
// every entry keyed by (seed, episode, row, agent).
Eigen::MatrixXd episode_draws(const MarketModel& model, std::uint64_t master_seed,
                              std::uint64_t episode, const NoisePin* pin = nullptr);

// One full mechanism episode: draws noise, queries each strategy for its
// stage bid (agents observe their own disturbance only), lets the ISO
// solve the stage and charge payments, and evolves the true state with
// the total assigned controls. Deterministic in (model, strategies,
// master_seed, episode).
EpisodeResult run_episode(const MarketModel& model,
                          const std::vector<Strategy>& strategies,
                          std::uint64_t master_seed, std::uint64_t episode = 0,
                          HChoice h = HChoice::zero,
                          const NoisePin* pin = nullptr);

// Episode batch. run_episodes partitions the loop across OpenMP threads
// (results land in per-episode slots, so output is independent of the
// schedule); run_episodes_serial is the reference implementation the
// tests compare against.
std::vector<EpisodeResult> run_episodes(const MarketModel& model,
                                        const std::vector<Strategy>& strategies,
                                        const MCConfig& mc,
                                        HChoice h = HChoice::zero,
                                        int threads = 0,
                                        const NoisePin* pin = nullptr);
std::vector<EpisodeResult> run_episodes_serial(
    const MarketModel& model, const std::vector<Strategy>& strategies,
    const MCConfig& mc, HChoice h = HChoice::zero, const NoisePin* pin = nullptr);

struct McSummary {
  Eigen::VectorXd net_mean;
  Eigen::VectorXd net_stderr;
  double rsw_mean = 0.0;
  double rsw_stderr = 0.0;
  double total_payments_mean = 0.0;
  int episodes = 0;
};

McSummary summarize(const std::vector<EpisodeResult>& episodes);

// Sample mean and standard error of per-agent net utilities (and RSW)
// over mc.episodes episodes.
McSummary expected_net_utility_mc(const MarketModel& model,
                                  const std::vector<Strategy>& strategies,
                                  const MCConfig& mc, HChoice h = HChoice::zero,
                                  int threads = 0, const NoisePin* pin = nullptr);

struct DeviationComparison {
  McSummary base;
  McSummary deviated;
};

// Paired comparison of two strategy profiles. With
// mc.common_random_numbers both runs share every draw per episode index.
DeviationComparison mc_compare(const MarketModel& model,
                               const std::vector<Strategy>& base,
                               const std::vector<Strategy>& deviated,
                               const MCConfig& mc, HChoice h = HChoice::zero,
                               int threads = 0, const NoisePin* pin = nullptr);

}  // namespace slqg
