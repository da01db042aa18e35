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

#include <cmath>

#include "doctest.h"
#include "slqg/lqr.hpp"
#include "slqg/sim.hpp"
#include "test_util.hpp"

using namespace slqg;

TEST_SUITE("sim") {

TEST_CASE("episodes are bitwise deterministic in (model, strategies, seed)") {
  test::Rand rand(61);
  const MarketModel m = test::random_model(rand, 3, 3, 2, 2);
  const std::vector<Strategy> strategies(m.num_agents(), Strategy::truthful());
  const EpisodeResult a = run_episode(m, strategies, 77, 5);
  const EpisodeResult b = run_episode(m, strategies, 77, 5);
  CHECK(a.net_utilities == b.net_utilities);
  CHECK(a.rsw == b.rsw);
  CHECK(a.draws == b.draws);
  for (int s = 0; s < m.horizon; ++s) CHECK(a.bids[s] == b.bids[s]);
  CHECK(a.ledger.payments == b.ledger.payments);
}

TEST_CASE("pinned zero-noise run reproduces the worked deterministic example") {
  const MarketModel m = test::reference_model();
  const std::vector<Strategy> strategies(2, Strategy::truthful());
  NoisePin pin;
  pin.rows = Eigen::MatrixXd(2, 2);
  pin.rows << 1.0, -1.0, 0.0, 0.0;
  const EpisodeResult ep = run_episode(m, strategies, 0, 0, HChoice::zero, &pin);
  CHECK(ep.net_utilities[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(ep.net_utilities[1] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(ep.rsw == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(ep.ledger.payments(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("a zero additive deviation is exactly the truthful strategy") {
  test::Rand rand(62);
  const MarketModel m = test::random_model(rand, 3, 3, 2, 2);
  std::vector<Strategy> truthful(m.num_agents(), Strategy::truthful());
  std::vector<Strategy> deviated = truthful;
  deviated[0] = Strategy::additive(0, 0.0);
  const EpisodeResult a = run_episode(m, truthful, 13, 2);
  const EpisodeResult b = run_episode(m, deviated, 13, 2);
  CHECK(a.net_utilities == b.net_utilities);
  CHECK(a.ledger.payments == b.ledger.payments);
  for (int s = 0; s < m.horizon; ++s) CHECK(a.bids[s] == b.bids[s]);
}

TEST_CASE("common random numbers share the draws across profiles") {
  test::Rand rand(63);
  const MarketModel m = test::random_model(rand, 3, 3, 2, 2);
  std::vector<Strategy> truthful(m.num_agents(), Strategy::truthful());
  std::vector<Strategy> deviated = truthful;
  deviated[1] = Strategy::additive(0, 0.8);
  MCConfig mc;
  mc.episodes = 4;
  mc.master_seed = 31;
  for (int e = 0; e < mc.episodes; ++e) {
    const EpisodeResult a = run_episode(m, truthful, mc.master_seed, e);
    const EpisodeResult b = run_episode(m, deviated, mc.master_seed, e);
    CHECK(a.draws == b.draws);  // identical noise, different bids
    CHECK(a.bids[0] != b.bids[0]);
  }
}

TEST_CASE("symmetric agents earn equal means") {
  MarketModel m = test::reference_model();
  const std::vector<Strategy> strategies(2, Strategy::truthful());
  MCConfig mc;
  mc.episodes = 4000;
  mc.master_seed = 5;
  const McSummary s = expected_net_utility_mc(m, strategies, mc);
  const double gap = std::abs(s.net_mean[0] - s.net_mean[1]);
  const double scale = std::hypot(s.net_stderr[0], s.net_stderr[1]);
  CHECK(gap < 3.0 * scale);
}

TEST_CASE("Monte Carlo welfare matches the moment-propagation oracle") {
  test::Rand rand(64);
  for (int trial = 0; trial < 3; ++trial) {
    const MarketModel m = test::random_model(rand, 3, 3, 2, 2);
    const std::vector<Strategy> strategies(m.num_agents(), Strategy::truthful());
    MCConfig mc;
    mc.episodes = 6000;
    mc.master_seed = 17 + trial;
    const McSummary s = expected_net_utility_mc(m, strategies, mc);
    const BalancedLqrSolution lqr = solve_balanced_lqr(m);
    const double analytic = expected_social_welfare(m, lqr.feedback);
    CHECK(std::abs(s.rsw_mean - analytic) < 3.0 * s.rsw_stderr);
  }
}

TEST_CASE("degenerate single-episode summary has zero stderr") {
  const MarketModel m = test::reference_model();
  const std::vector<Strategy> strategies(2, Strategy::truthful());
  MCConfig mc;
  mc.episodes = 1;
  mc.master_seed = 3;
  const McSummary s = expected_net_utility_mc(m, strategies, mc);
  CHECK(s.net_stderr.cwiseAbs().maxCoeff() == 0.0);
  const EpisodeResult ep = run_episode(m, strategies, 3, 0);
  CHECK(s.net_mean == ep.net_utilities);
}

TEST_CASE("mc_compare honors the common-random-numbers flag") {
  const MarketModel m = test::reference_model();
  std::vector<Strategy> truthful(2, Strategy::truthful());
  std::vector<Strategy> same = truthful;  // identical profile
  MCConfig mc;
  mc.episodes = 50;
  mc.master_seed = 9;
  mc.common_random_numbers = true;
  const DeviationComparison paired = mc_compare(m, truthful, same, mc);
  CHECK(paired.base.net_mean == paired.deviated.net_mean);

  mc.common_random_numbers = false;
  const DeviationComparison unpaired = mc_compare(m, truthful, same, mc);
  CHECK(unpaired.base.net_mean != unpaired.deviated.net_mean);
}

TEST_CASE("scaling strategy with factor one is truthful") {
  const MarketModel m = test::reference_model();
  std::vector<Strategy> truthful(2, Strategy::truthful());
  std::vector<Strategy> scaled = truthful;
  scaled[0] = Strategy::scaling(1, 1.0);
  const EpisodeResult a = run_episode(m, truthful, 21, 0);
  const EpisodeResult b = run_episode(m, scaled, 21, 0);
  CHECK(a.net_utilities == b.net_utilities);
}

TEST_CASE("custom strategies see their own bid history") {
  const MarketModel m = test::reference_model();
  std::vector<Strategy> strategies(2, Strategy::truthful());
  strategies[0] = Strategy::custom([](int stage, double noise,
                                      const Eigen::VectorXd& past) {
    CHECK(past.size() == stage);
    return stage == 0 ? noise : past[0];  // repeat the first bid
  });
  const EpisodeResult ep = run_episode(m, strategies, 2, 0);
  CHECK(ep.bids[1][0] == ep.bids[0][0]);
}

}  // TEST_SUITE
