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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slqg/mech_layered.hpp"
#include "slqg/mech_static.hpp"
#include "slqg/model.hpp"
#include "slqg/strategy.hpp"

namespace slqg {

// Configuration problems (parse errors, unknown fields, invariant
// violations). The CLI maps these to exit code 2.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  MarketModel model;
  HChoice h = HChoice::zero;
  std::uint64_t seed = 0;
  int episodes = 1;
  std::vector<Strategy> strategies;  // defaults to all-truthful
  std::optional<std::vector<StaticQuadraticBid>> static_bids;
};

// Parses a scenario JSON file. Field names are fixed; unknown fields are
// rejected. Strategies default to truthful when omitted.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

}  // namespace slqg
