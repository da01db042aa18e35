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

#include "slqg/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "slqg/lqr.hpp"
#include "slqg/rng.hpp"
#include "slqg/threads.hpp"

namespace slqg {

Eigen::MatrixXd episode_draws(const MarketModel& model, std::uint64_t master_seed,
                              std::uint64_t episode, const NoisePin* pin) {
  const int n = model.num_agents();
  const int T = model.horizon;
  Eigen::MatrixXd draws(T, n);
  for (int s = 0; s < T; ++s)
    for (int i = 0; i < n; ++i) {
      const double sd = s == 0 ? std::sqrt(model.agents[i].zeta)
                               : std::sqrt(model.agents[i].sigma);
      draws(s, i) = sd * normal_draw(master_seed, episode,
                                     static_cast<std::uint32_t>(s),
                                     static_cast<std::uint32_t>(i));
    }
  if (pin) {
    const int k = static_cast<int>(pin->rows.rows());
    if (k > T || (k > 0 && pin->rows.cols() != n))
      throw std::invalid_argument("noise pin shape mismatch");
    if (k > 0) draws.topRows(k) = pin->rows;
    if (pin->own_agent >= 0) {
      if (k >= T || pin->own_agent >= n)
        throw std::invalid_argument("noise pin own-entry out of range");
      draws(k, pin->own_agent) = pin->own_value;
    }
  }
  return draws;
}

EpisodeResult run_episode(const MarketModel& model,
                          const std::vector<Strategy>& strategies,
                          std::uint64_t master_seed, std::uint64_t episode,
                          HChoice h, const NoisePin* pin) {
  validate_model(model);
  const int n = model.num_agents();
  const int T = model.horizon;
  if (static_cast<int>(strategies.size()) != n)
    throw std::invalid_argument("one strategy per agent required");

  EpisodeResult out;
  out.draws = episode_draws(model, master_seed, episode, pin);

  out.grid = LayerGrid(n, T);
  LayeredLedger ledger;
  ledger.payments = Eigen::MatrixXd::Zero(n, T);
  ledger.stage_values = Eigen::VectorXd::Zero(T);
  ledger.h_choice = h;

  std::vector<Eigen::VectorXd> past_bids(n);  // per agent, grows by stage
  for (int i = 0; i < n; ++i) past_bids[i] = Eigen::VectorXd(0);

  for (int s = 0; s < T; ++s) {
    Eigen::VectorXd bid(n);
    for (int i = 0; i < n; ++i)
      bid[i] = strategies[i].bid(s, out.draws(s, i), past_bids[i]);
    StageSolution stage = solve_stage(model, s, out.grid, bid);
    ledger.stage_values[s] = stage.objective;
    out.grid.set_stage(s, std::move(stage.x_hat), std::move(stage.u));
    ledger.payments.col(s) =
        layered_payment(model, s, out.grid, h, &ledger.pivot_degenerate);
    out.bids.push_back(bid);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd grown(s + 1);
      grown.head(s) = past_bids[i];
      grown[s] = bid[i];
      past_bids[i] = std::move(grown);
    }
  }
  out.ledger = std::move(ledger);
  out.grid.set_true_layers(build_true_layers(model, out.draws, out.grid));

  // True trajectory under the total assigned controls.
  const Eigen::VectorXd a = model.a_vec();
  const Eigen::VectorXd b = model.b_vec();
  Eigen::VectorXd x = out.draws.row(0).transpose();
  for (int t = 0; t < T; ++t) {
    const Eigen::VectorXd u = out.grid.total_control(t);
    out.trajectory.states.push_back(x);
    out.trajectory.controls.push_back(u);
    if (t + 1 < T) {
      const Eigen::VectorXd w = out.draws.row(t + 1).transpose();
      out.trajectory.noises.push_back(w);
      x = a.cwiseProduct(x) + b.cwiseProduct(u) + w;
    }
  }

  out.rsw = random_social_welfare(model, out.trajectory);
  out.net_utilities = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double value = 0.0;
    for (int t = 0; t < T; ++t) {
      const double xt = out.trajectory.states[t][i];
      const double ut = out.trajectory.controls[t][i];
      value += model.agents[i].q * xt * xt + model.agents[i].r * ut * ut;
    }
    out.net_utilities[i] = value - out.ledger.payments.row(i).sum();
  }
  return out;
}

std::vector<EpisodeResult> run_episodes_serial(
    const MarketModel& model, const std::vector<Strategy>& strategies,
    const MCConfig& mc, HChoice h, const NoisePin* pin) {
  if (mc.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  std::vector<EpisodeResult> out(mc.episodes);
  for (int e = 0; e < mc.episodes; ++e)
    out[e] = run_episode(model, strategies, mc.master_seed,
                         static_cast<std::uint64_t>(e), h, pin);
  return out;
}

std::vector<EpisodeResult> run_episodes(const MarketModel& model,
                                        const std::vector<Strategy>& strategies,
                                        const MCConfig& mc, HChoice h,
                                        int threads, const NoisePin* pin) {
  if (mc.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  const int workers = resolve_thread_count(threads);
  std::vector<EpisodeResult> out(mc.episodes);
#pragma omp parallel for schedule(static) num_threads(workers)
  for (int e = 0; e < mc.episodes; ++e)
    out[e] = run_episode(model, strategies, mc.master_seed,
                         static_cast<std::uint64_t>(e), h, pin);
  return out;
}

McSummary summarize(const std::vector<EpisodeResult>& episodes) {
  if (episodes.empty()) throw std::invalid_argument("no episodes to summarize");
  const int n = static_cast<int>(episodes.front().net_utilities.size());
  const int m = static_cast<int>(episodes.size());

  McSummary s;
  s.episodes = m;
  s.net_mean = Eigen::VectorXd::Zero(n);
  s.net_stderr = Eigen::VectorXd::Zero(n);

  // Fixed-order reductions keep the summary independent of how the
  // episode batch was scheduled.
  for (const auto& e : episodes) {
    s.net_mean += e.net_utilities;
    s.rsw_mean += e.rsw;
    s.total_payments_mean += e.ledger.payments.sum();
  }
  s.net_mean /= m;
  s.rsw_mean /= m;
  s.total_payments_mean /= m;

  if (m > 1) {
    Eigen::VectorXd ss = Eigen::VectorXd::Zero(n);
    double rsw_ss = 0.0;
    for (const auto& e : episodes) {
      const Eigen::VectorXd d = e.net_utilities - s.net_mean;
      ss += d.cwiseProduct(d);
      rsw_ss += (e.rsw - s.rsw_mean) * (e.rsw - s.rsw_mean);
    }
    s.net_stderr = (ss / (m - 1)).cwiseSqrt() / std::sqrt(double(m));
    s.rsw_stderr = std::sqrt(rsw_ss / (m - 1)) / std::sqrt(double(m));
  }
  return s;
}

McSummary expected_net_utility_mc(const MarketModel& model,
                                  const std::vector<Strategy>& strategies,
                                  const MCConfig& mc, HChoice h, int threads,
                                  const NoisePin* pin) {
  return summarize(run_episodes(model, strategies, mc, h, threads, pin));
}

DeviationComparison mc_compare(const MarketModel& model,
                               const std::vector<Strategy>& base,
                               const std::vector<Strategy>& deviated,
                               const MCConfig& mc, HChoice h, int threads,
                               const NoisePin* pin) {
  DeviationComparison out;
  out.base = expected_net_utility_mc(model, base, mc, h, threads, pin);
  MCConfig dev_mc = mc;
  if (!mc.common_random_numbers) dev_mc.master_seed = mc.master_seed ^ 0x9E3779B97F4A7C15ull;
  out.deviated = expected_net_utility_mc(model, deviated, dev_mc, h, threads, pin);
  return out;
}

}  // namespace slqg
