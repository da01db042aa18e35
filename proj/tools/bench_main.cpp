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

// Times the two data-parallel kernels (episode batches, oracle grid
// scans) in their serial reference and OpenMP variants.
//
//   slqg_bench [--episodes N] [--grid-points M] [--threads K]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slqg/mech_static.hpp"
#include "slqg/oracle.hpp"
#include "slqg/sim.hpp"
#include "slqg/threads.hpp"

namespace {

double seconds_of(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  int episodes = 2000;
  int grid_points = 4000000;
  int threads = 0;

  CLI::App app{"serial vs OpenMP kernel comparison"};
  app.add_option("--episodes", episodes, "episode batch size");
  app.add_option("--grid-points", grid_points, "grid scan size (approx)");
  app.add_option("--threads", threads, "worker count (0 = auto)");
  CLI11_PARSE(app, argc, argv);

  const int workers = slqg::resolve_thread_count(threads);
  std::printf("workers: %d\n", workers);

  slqg::MarketModel model;
  model.horizon = 4;
  model.agents = {{1.0, 1.0, -1.0, -1.0, 1.0, 1.0},
                  {0.9, 1.1, -0.5, -2.0, 0.5, 1.0},
                  {1.1, 0.8, -2.0, -0.5, 2.0, 0.5},
                  {0.8, 1.2, -1.5, -1.5, 1.0, 2.0}};
  const std::vector<slqg::Strategy> strategies(4, slqg::Strategy::truthful());
  slqg::MCConfig mc;
  mc.episodes = episodes;
  mc.master_seed = 7;

  const double ep_serial = seconds_of([&] {
    slqg::run_episodes_serial(model, strategies, mc);
  });
  const double ep_parallel = seconds_of([&] {
    slqg::run_episodes(model, strategies, mc, slqg::HChoice::zero, workers);
  });
  std::printf("episodes x%d      serial %.3fs   openmp %.3fs   speedup %.2fx\n",
              episodes, ep_serial, ep_parallel, ep_serial / ep_parallel);

  const std::vector<slqg::StaticQuadraticBid> bids = {
      {-0.5, 2.0}, {-1.0, -1.0}, {-2.0, -1.0}};
  const int per_dim = static_cast<int>(std::sqrt(double(grid_points)));
  const double step = 8.0 / (per_dim - 1);
  const auto problem = slqg::make_static_grid_problem(bids, 4.0, step);

  const double grid_serial = seconds_of([&] {
    slqg::grid_qp_oracle_serial(problem.axes, problem.objective);
  });
  const double grid_parallel = seconds_of([&] {
    slqg::grid_qp_oracle(problem.axes, problem.objective, workers);
  });
  std::printf("grid   x%-9d serial %.3fs   openmp %.3fs   speedup %.2fx\n",
              per_dim * per_dim, grid_serial, grid_parallel,
              grid_serial / grid_parallel);
  return 0;
}
