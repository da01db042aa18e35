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

#include <stdexcept>

#include "doctest.h"
#include "slqg/model.hpp"
#include "test_util.hpp"

using namespace slqg;

TEST_SUITE("model") {

TEST_CASE("reference model passes validation") {
  const MarketModel m = test::reference_model();
  CHECK_NOTHROW(validate_model(m));
  CHECK(m.num_agents() == 2);
  CHECK(m.horizon == 2);
}

TEST_CASE("r at the boundary is rejected") {
  MarketModel m = test::reference_model();
  m.agents[1].r = 0.0;
  CHECK_THROWS_WITH_AS(validate_model(m),
                       "r must be strictly negative (agent 1)",
                       std::invalid_argument);
}

TEST_CASE("negative sigma is rejected") {
  MarketModel m = test::reference_model();
  m.agents[0].sigma = -1.0;
  CHECK_THROWS_WITH_AS(validate_model(m), "sigma must be positive (agent 0)",
                       std::invalid_argument);
}

TEST_CASE("positive q, zero zeta, empty model, bad horizon are rejected") {
  MarketModel m = test::reference_model();
  m.agents[0].q = 0.5;
  CHECK_THROWS_AS(validate_model(m), std::invalid_argument);

  m = test::reference_model();
  m.agents[1].zeta = 0.0;
  CHECK_THROWS_AS(validate_model(m), std::invalid_argument);

  CHECK_THROWS_AS(validate_model(MarketModel{}), std::invalid_argument);

  m = test::reference_model();
  m.horizon = 0;
  CHECK_THROWS_AS(validate_model(m), std::invalid_argument);
}

TEST_CASE("q = 0 is allowed (non-strict inequality)") {
  MarketModel m = test::reference_model();
  m.agents[0].q = 0.0;
  CHECK_NOTHROW(validate_model(m));
}

}  // TEST_SUITE
