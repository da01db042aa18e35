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

#include "slqg/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace slqg {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ScenarioError("unknown field \"" + it.key() + "\" in " + where);
}

double require_number(const json& obj, const std::string& key,
                      const std::string& where) {
  if (!obj.contains(key))
    throw ScenarioError("missing field \"" + key + "\" in " + where);
  if (!obj[key].is_number())
    throw ScenarioError("field \"" + key + "\" in " + where + " must be a number");
  return obj[key].get<double>();
}

Strategy parse_strategy(const json& obj, int index) {
  const std::string where = "strategies[" + std::to_string(index) + "]";
  if (!obj.is_object()) throw ScenarioError(where + " must be an object");
  reject_unknown(obj, {"kind", "stage", "delta", "gamma"}, where);
  if (!obj.contains("kind") || !obj["kind"].is_string())
    throw ScenarioError(where + " needs a string \"kind\"");
  const std::string kind = obj["kind"].get<std::string>();

  const auto stage_of = [&]() {
    if (!obj.contains("stage"))
      throw ScenarioError(where + " needs \"stage\"");
    return obj["stage"].get<int>();
  };
  if (kind == "truthful") return Strategy::truthful();
  if (kind == "additive")
    return Strategy::additive(stage_of(), require_number(obj, "delta", where));
  if (kind == "scaling")
    return Strategy::scaling(stage_of(), require_number(obj, "gamma", where));
  throw ScenarioError(where + ": unsupported kind \"" + kind + "\"");
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    throw ScenarioError(std::string("scenario parse error: ") + err.what());
  }
  if (!root.is_object()) throw ScenarioError("scenario root must be an object");
  reject_unknown(root,
                 {"horizon", "agents", "h_function", "seed", "episodes",
                  "strategies", "static_bids"},
                 "scenario");

  ScenarioConfig cfg;
  if (!root.contains("horizon") || !root["horizon"].is_number_integer())
    throw ScenarioError("scenario needs an integer \"horizon\"");
  cfg.model.horizon = root["horizon"].get<int>();

  if (!root.contains("agents") || !root["agents"].is_array() ||
      root["agents"].empty())
    throw ScenarioError("scenario needs a non-empty \"agents\" array");
  for (std::size_t i = 0; i < root["agents"].size(); ++i) {
    const json& a = root["agents"][i];
    const std::string where = "agents[" + std::to_string(i) + "]";
    if (!a.is_object()) throw ScenarioError(where + " must be an object");
    reject_unknown(a, {"a", "b", "q", "r", "sigma", "zeta"}, where);
    AgentParams p;
    p.a = require_number(a, "a", where);
    p.b = require_number(a, "b", where);
    p.q = require_number(a, "q", where);
    p.r = require_number(a, "r", where);
    p.sigma = require_number(a, "sigma", where);
    p.zeta = require_number(a, "zeta", where);
    cfg.model.agents.push_back(p);
  }

  if (root.contains("h_function")) {
    const std::string h = root["h_function"].get<std::string>();
    if (h == "zero")
      cfg.h = HChoice::zero;
    else if (h == "pivot")
      cfg.h = HChoice::pivot;
    else
      throw ScenarioError("h_function must be \"zero\" or \"pivot\"");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer())
      throw ScenarioError("seed must be an integer");
    cfg.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("episodes")) {
    if (!root["episodes"].is_number_integer())
      throw ScenarioError("episodes must be an integer");
    cfg.episodes = root["episodes"].get<int>();
    if (cfg.episodes < 1) throw ScenarioError("episodes must be >= 1");
  }

  if (root.contains("strategies")) {
    if (!root["strategies"].is_array())
      throw ScenarioError("strategies must be an array");
    for (std::size_t i = 0; i < root["strategies"].size(); ++i)
      cfg.strategies.push_back(
          parse_strategy(root["strategies"][i], static_cast<int>(i)));
    if (cfg.strategies.size() != cfg.model.agents.size())
      throw ScenarioError("strategies list length must equal agent count");
  } else {
    cfg.strategies.assign(cfg.model.agents.size(), Strategy::truthful());
  }

  if (root.contains("static_bids")) {
    if (!root["static_bids"].is_array())
      throw ScenarioError("static_bids must be an array");
    std::vector<StaticQuadraticBid> bids;
    for (std::size_t i = 0; i < root["static_bids"].size(); ++i) {
      const json& b = root["static_bids"][i];
      const std::string where = "static_bids[" + std::to_string(i) + "]";
      if (!b.is_object()) throw ScenarioError(where + " must be an object");
      reject_unknown(b, {"curvature", "linear"}, where);
      StaticQuadraticBid bid;
      bid.curvature = require_number(b, "curvature", where);
      bid.linear = require_number(b, "linear", where);
      if (!(bid.curvature < 0.0))
        throw ScenarioError(where + ": curvature must be strictly negative");
      bids.push_back(bid);
    }
    if (bids.size() != cfg.model.agents.size())
      throw ScenarioError("static_bids length must equal agent count");
    cfg.static_bids = std::move(bids);
  }

  try {
    validate_model(cfg.model);
  } catch (const std::invalid_argument& err) {
    throw ScenarioError(std::string("invalid model: ") + err.what());
  }
  for (const auto& s : cfg.strategies)
    if (s.kind != Strategy::Kind::truthful &&
        (s.stage < 0 || s.stage >= cfg.model.horizon))
      throw ScenarioError("strategy stage out of range");
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

}  // namespace slqg
