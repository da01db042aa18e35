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

#include <vector>

#include "doctest.h"
#include "slqg/mech_static.hpp"
#include "test_util.hpp"

using namespace slqg;

namespace {

// The worked two-agent market: one eager producer, one eager consumer.
const std::vector<StaticQuadraticBid> kAntisymmetric = {{-0.5, 2.0},
                                                        {-0.5, -2.0}};

std::vector<StaticQuadraticBid> random_bids(test::Rand& rand, int n) {
  std::vector<StaticQuadraticBid> bids;
  for (int i = 0; i < n; ++i)
    bids.push_back({-rand.uniform(0.2, 2.0), rand.uniform(-3.0, 3.0)});
  return bids;
}

}  // namespace

TEST_SUITE("static") {

TEST_CASE("antisymmetric bids trade two units") {
  const Eigen::VectorXd u = clear_static(kAntisymmetric);
  CHECK(u[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(u[1] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("identical bids do not trade") {
  const std::vector<StaticQuadraticBid> bids(3, {-1.0, 1.5});
  CHECK(clear_static(bids).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single agent is pinned to zero; bad curvature rejected") {
  CHECK(clear_static({{-1.0, 3.0}})[0] == 0.0);
  CHECK_THROWS_AS(clear_static({{0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(clear_static({}), std::invalid_argument);
}

TEST_CASE("clearing satisfies balance and beats random feasible points") {
  test::Rand rand(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto bids = random_bids(rand, rand.uniform_int(2, 5));
    const Eigen::VectorXd u = clear_static(bids);
    CHECK(std::abs(u.sum()) < 1e-10);
    double best = 0.0;
    for (std::size_t i = 0; i < bids.size(); ++i) best += bid_value(bids[i], u[i]);
    for (int rep = 0; rep < 30; ++rep) {
      Eigen::VectorXd v = rand.vector(static_cast<int>(bids.size()), -3.0, 3.0);
      v.array() -= v.mean();
      double value = 0.0;
      for (std::size_t i = 0; i < bids.size(); ++i)
        value += bid_value(bids[i], v[i]);
      CHECK(best >= value - 1e-9);
    }
  }
}

TEST_CASE("excluded market drops the named agent") {
  SUBCASE("two agents leave a pinned singleton") {
    const Eigen::VectorXd rest = exclude_clear_static(kAntisymmetric, 0);
    REQUIRE(rest.size() == 1);
    CHECK(rest[0] == 0.0);
  }
  SUBCASE("three identical agents stay at zero") {
    const std::vector<StaticQuadraticBid> bids(3, {-1.0, 1.0});
    CHECK(exclude_clear_static(bids, 1).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("excluding the idle middle agent reproduces the two-agent trade") {
    const std::vector<StaticQuadraticBid> bids = {
        {-0.5, 2.0}, {-0.5, 0.0}, {-0.5, -2.0}};
    const Eigen::VectorXd rest = exclude_clear_static(bids, 1);
    CHECK(rest[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rest[1] == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("single agent yields the flagged empty allocation") {
    const StaticOutcome out = run_static_market({{-1.0, 2.0}});
    CHECK_FALSE(out.excluded_defined);
    CHECK(out.excluded[0].size() == 0);
    CHECK(out.payments[0] == 0.0);
  }
}

TEST_CASE("pivot payments on the antisymmetric market") {
  const Eigen::VectorXd p = vcg_payment_static(kAntisymmetric);
  CHECK(p[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(p.sum() == doctest::Approx(-4.0).epsilon(1e-12));  // ISO pays out
}

TEST_CASE("identical bids pay nothing") {
  const std::vector<StaticQuadraticBid> bids(4, {-1.0, 1.0});
  CHECK(vcg_payment_static(bids).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("payment is zero when removal does not move the others") {
  // Symmetric markets: u* and every u^(i) sit at the origin.
  const std::vector<StaticQuadraticBid> bids(3, {-0.7, 0.3});
  const Eigen::VectorXd p = vcg_payment_static(bids);
  CHECK(p.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("groves payments") {
  SUBCASE("h = 0 keeps only the others' welfare term") {
    const Eigen::VectorXd p = groves_payment_static(
        kAntisymmetric, [](const std::vector<StaticQuadraticBid>&) { return 0.0; });
    CHECK(p[0] == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("pivot h reduces to the VCG payment exactly") {
    test::Rand rand(32);
    for (int trial = 0; trial < 5; ++trial) {
      const auto bids = random_bids(rand, rand.uniform_int(2, 5));
      const auto pivot = [](const std::vector<StaticQuadraticBid>& rest) {
        const Eigen::VectorXd u = clear_static(rest);
        double v = 0.0;
        for (std::size_t j = 0; j < rest.size(); ++j)
          v += bid_value(rest[j], u[j]);
        return v;
      };
      const Eigen::VectorXd a = groves_payment_static(bids, pivot);
      const Eigen::VectorXd b = vcg_payment_static(bids);
      CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("constant h shifts payments by exactly that constant") {
    const double c = 3.25;
    const Eigen::VectorXd base = groves_payment_static(
        kAntisymmetric, [](const std::vector<StaticQuadraticBid>&) { return 0.0; });
    const Eigen::VectorXd shifted = groves_payment_static(
        kAntisymmetric, [c](const std::vector<StaticQuadraticBid>&) { return c; });
    CHECK((shifted - base).cwiseAbs().maxCoeff() ==
          doctest::Approx(c).epsilon(1e-15));
    CHECK((shifted - base).minCoeff() == doctest::Approx(c).epsilon(1e-15));
  }
}

TEST_CASE("net utility of the truthful antisymmetric market") {
  const Eigen::VectorXd net = static_net_utility(kAntisymmetric, kAntisymmetric);
  CHECK(net[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(net[1] == doctest::Approx(4.0).epsilon(1e-12));

  const std::vector<StaticQuadraticBid> same(3, {-1.0, 0.5});
  CHECK(static_net_utility(same, same).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("linear-term misreport sweep never beats truth") {
  // Agent 0's true type is (-0.5, 2); sweep its declared linear term.
  const double truthful_net = static_net_utility(kAntisymmetric, kAntisymmetric)[0];
  for (double beta = -4.0; beta <= 4.0 + 1e-12; beta += 0.01) {
    std::vector<StaticQuadraticBid> bids = kAntisymmetric;
    bids[0].linear = beta;
    const Eigen::VectorXd u = clear_static(bids);
    const Eigen::VectorXd p = vcg_payment_static(bids);
    const double net = bid_value(kAntisymmetric[0], u[0]) - p[0];
    CHECK(net <= truthful_net + 1e-9);
  }
}

TEST_CASE("dominance against random opponents and misreports") {
  test::Rand rand(33);
  for (int market = 0; market < 10; ++market) {
    const int n = rand.uniform_int(2, 5);
    const auto truths = random_bids(rand, n);
    auto bids = random_bids(rand, n);  // opponents bid arbitrarily
    for (int i = 0; i < n; ++i) {
      bids[i] = truths[i];
      const double truthful_net = static_net_utility(truths, bids)[i];
      for (int rep = 0; rep < 50; ++rep) {
        auto deviated = bids;
        deviated[i].curvature = truths[i].curvature * rand.uniform(0.3, 3.0);
        deviated[i].linear = truths[i].linear + rand.uniform(-4.0, 4.0);
        const double net = static_net_utility(truths, deviated)[i];
        CHECK(net <= truthful_net + 1e-9);
      }
    }
  }
}

TEST_CASE("outcome bundle is internally consistent") {
  const StaticOutcome out = run_static_market(kAntisymmetric);
  CHECK(std::abs(out.allocation.sum()) < 1e-10);
  CHECK(out.welfare == doctest::Approx(4.0).epsilon(1e-12));  // 2 + 2
  CHECK(out.excluded_defined);
  for (const auto& ex : out.excluded)
    if (ex.size() > 0) CHECK(std::abs(ex.sum()) < 1e-10);
}

}  // TEST_SUITE
