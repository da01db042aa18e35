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
#include <functional>

namespace slqg {

// Per-agent bid policy for the layered mechanism. truthful reports the
// observed disturbance exactly; additive/scaling perturb it at one
// chosen stage; custom maps (stage, true noise, own past bids) freely.
struct Strategy {
  enum class Kind { truthful, additive, scaling, custom };

  Kind kind = Kind::truthful;
  int stage = 0;
  double param = 0.0;  // delta for additive, gamma for scaling
  std::function<double(int stage, double true_noise,
                       const Eigen::VectorXd& own_past_bids)>
      custom_fn;

  static Strategy truthful() { return {}; }
  static Strategy additive(int stage, double delta) {
    Strategy s;
    s.kind = Kind::additive;
    s.stage = stage;
    s.param = delta;
    return s;
  }
  static Strategy scaling(int stage, double gamma) {
    Strategy s;
    s.kind = Kind::scaling;
    s.stage = stage;
    s.param = gamma;
    return s;
  }
  static Strategy custom(
      std::function<double(int, double, const Eigen::VectorXd&)> fn) {
    Strategy s;
    s.kind = Kind::custom;
    s.custom_fn = std::move(fn);
    return s;
  }

  double bid(int at_stage, double true_noise,
             const Eigen::VectorXd& own_past_bids) const {
    switch (kind) {
      case Kind::truthful:
        return true_noise;
      case Kind::additive:
        return at_stage == stage ? true_noise + param : true_noise;
      case Kind::scaling:
        return at_stage == stage ? true_noise * param : true_noise;
      case Kind::custom:
        return custom_fn(at_stage, true_noise, own_past_bids);
    }
    return true_noise;
  }
};

}  // namespace slqg
