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

#include "slqg/rng.hpp"

#include <cmath>

namespace slqg {
namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi,
                     std::uint32_t* lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  *hi = static_cast<std::uint32_t>(p >> 32);
  *lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> round_once(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mul_hilo(kPhiloxM0, c[0], &hi0, &lo0);
  mul_hilo(kPhiloxM1, c[2], &hi1, &lo1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    counter = round_once(counter, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return counter;
}

double uniform_draw(std::uint64_t master_seed, std::uint64_t episode,
                    std::uint32_t draw, std::uint32_t agent) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(episode),
      static_cast<std::uint32_t>(episode >> 32), draw, agent};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(master_seed),
      static_cast<std::uint32_t>(master_seed >> 32)};
  const auto out = philox4x32(ctr, key);
  const std::uint64_t x =
      (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  // 53-bit mantissa, shifted off zero: strictly inside (0, 1).
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

double normal_draw(std::uint64_t master_seed, std::uint64_t episode,
                   std::uint32_t draw, std::uint32_t agent) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(episode),
      static_cast<std::uint32_t>(episode >> 32), draw, agent};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(master_seed),
      static_cast<std::uint32_t>(master_seed >> 32)};
  const auto out = philox4x32(ctr, key);
  const std::uint64_t x0 =
      (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t x1 =
      (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  const double u1 = (static_cast<double>(x0 >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(x1 >> 11) + 0.5) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace slqg
