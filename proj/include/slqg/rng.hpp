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

#include <array>
#include <cstdint>

// Counter-based generator (Philox 4x32-10, Salmon et al. 2011). Each
// draw is a pure function of (key, counter): no shared state, so
// episodes can be generated in any order or in parallel and still be
// bit-identical run to run.

namespace slqg {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Uniform double in (0, 1), keyed by (seed, episode, draw, agent).
// draw indexes the per-stage disturbance slot: 0 is the initial state,
// k >= 1 is W(k-1).
double uniform_draw(std::uint64_t master_seed, std::uint64_t episode,
                    std::uint32_t draw, std::uint32_t agent);

// Standard normal via Box-Muller on two independent lanes of one
// Philox block.
double normal_draw(std::uint64_t master_seed, std::uint64_t episode,
                   std::uint32_t draw, std::uint32_t agent);

}  // namespace slqg
