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

// Command-line front end: scenario ingestion, episode runs with CSV /
// JSON reporting, and the verification suites.
//
//   slqg static --scenario s.json --out static.csv
//   slqg run    --scenario s.json --out run.csv [--episodes N --seed S --h zero|pivot]
//   slqg verify <decomposition|ic|oracle> --scenario s.json [options]
//
// Exit codes: 0 success, 1 verification/solver failure, 2 configuration
// error.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slqg/exact.hpp"
#include "slqg/io.hpp"
#include "slqg/lqr.hpp"
#include "slqg/mech_layered.hpp"
#include "slqg/mech_static.hpp"
#include "slqg/oracle.hpp"
#include "slqg/qp.hpp"
#include "slqg/scenario.hpp"
#include "slqg/sim.hpp"
#include "slqg/threads.hpp"

namespace {

using slqg::format_g17;

struct CommonOpts {
  std::string scenario;
  std::string out;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> h;
};

slqg::ScenarioConfig load_with_overrides(const CommonOpts& opts) {
  slqg::ScenarioConfig cfg = slqg::load_scenario(opts.scenario);
  if (opts.episodes) {
    if (*opts.episodes < 1)
      throw slqg::ScenarioError("episodes must be >= 1");
    cfg.episodes = *opts.episodes;
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.h) {
    if (*opts.h == "zero")
      cfg.h = slqg::HChoice::zero;
    else if (*opts.h == "pivot")
      cfg.h = slqg::HChoice::pivot;
    else
      throw slqg::ScenarioError("--h must be zero or pivot");
  }
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

int cmd_static(const CommonOpts& opts) {
  const slqg::ScenarioConfig cfg = load_with_overrides(opts);
  if (!cfg.static_bids)
    throw slqg::ScenarioError("static command needs a \"static_bids\" block");
  const slqg::StaticOutcome outcome = slqg::run_static_market(*cfg.static_bids);
  const int n = static_cast<int>(cfg.static_bids->size());

  std::ostringstream csv;
  csv << "section,i,j,value\n";
  for (int i = 0; i < n; ++i)
    csv << "allocation," << i << ",," << format_g17(outcome.allocation[i]) << "\n";
  csv << "excluded_defined,,," << (outcome.excluded_defined ? 1 : 0) << "\n";
  for (int i = 0; i < n; ++i) {
    int col = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      csv << "excluded," << i << "," << j << ","
          << format_g17(outcome.excluded[i][col++]) << "\n";
    }
  }
  for (int i = 0; i < n; ++i)
    csv << "payment," << i << ",," << format_g17(outcome.payments[i]) << "\n";
  csv << "welfare,,," << format_g17(outcome.welfare) << "\n";
  write_file(opts.out, csv.str());
  std::cout << "static clearing written to " << opts.out << "\n";
  return 0;
}

int cmd_run(const CommonOpts& opts) {
  const slqg::ScenarioConfig cfg = load_with_overrides(opts);
  slqg::MCConfig mc;
  mc.episodes = cfg.episodes;
  mc.master_seed = cfg.seed;
  const std::vector<slqg::EpisodeResult> episodes =
      slqg::run_episodes(cfg.model, cfg.strategies, mc, cfg.h, /*threads=*/0);

  const int n = cfg.model.num_agents();
  const int T = cfg.model.horizon;
  std::ostringstream csv;
  csv << "episode,t,agent,x_true,bid,u_total,stage_payment,stage_utility\n";
  for (int e = 0; e < mc.episodes; ++e) {
    const slqg::EpisodeResult& ep = episodes[e];
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < n; ++i) {
        const double x = ep.trajectory.states[t][i];
        const double u = ep.trajectory.controls[t][i];
        const double util = cfg.model.agents[i].q * x * x +
                            cfg.model.agents[i].r * u * u;
        csv << e << "," << t << "," << i << "," << format_g17(x) << ","
            << format_g17(ep.bids[t][i]) << "," << format_g17(u) << ","
            << format_g17(ep.ledger.payments(i, t)) << ","
            << format_g17(util) << "\n";
      }
  }
  write_file(opts.out, csv.str());

  const slqg::McSummary summary = slqg::summarize(episodes);
  nlohmann::json js;
  js["net_utility_mean"] = std::vector<double>(
      summary.net_mean.data(), summary.net_mean.data() + n);
  js["net_utility_stderr"] = std::vector<double>(
      summary.net_stderr.data(), summary.net_stderr.data() + n);
  js["rsw_mean"] = summary.rsw_mean;
  js["total_payments"] = summary.total_payments_mean;
  std::filesystem::path summary_path(opts.out);
  summary_path.replace_extension();
  summary_path += ".summary.json";
  write_file(summary_path.string(), js.dump(2) + "\n");
  std::cout << "wrote " << mc.episodes << " episodes to " << opts.out
            << " (summary: " << summary_path.string() << ")\n";
  return 0;
}

struct VerifyRow {
  std::string name;
  bool pass = false;
  std::string detail;
};

int report(const std::vector<VerifyRow>& rows, const std::string& out_path) {
  std::ostringstream table;
  table << "check,status,detail\n";
  bool all = true;
  for (const auto& r : rows) {
    table << r.name << "," << (r.pass ? "PASS" : "FAIL") << "," << r.detail
          << "\n";
    all = all && r.pass;
  }
  std::cout << table.str();
  if (!out_path.empty()) write_file(out_path, table.str());
  return all ? 0 : 1;
}

int verify_decomposition(const slqg::ScenarioConfig& cfg,
                         const std::string& out_path) {
  double worst_state = 0.0, worst_control = 0.0, worst_welfare = 0.0;
  for (int e = 0; e < cfg.episodes; ++e) {
    const slqg::EpisodeResult ep = slqg::run_episode(
        cfg.model, cfg.strategies, cfg.seed, static_cast<std::uint64_t>(e), cfg.h);
    const slqg::DecompositionResidual mech =
        slqg::decomposition_residual(cfg.model, ep.grid, ep.trajectory);
    const slqg::LayerGrid random_grid = slqg::random_balanced_decomposition(
        cfg.model, ep.draws, ep.trajectory.controls, cfg.seed ^ 0xD1CEB00Cull,
        static_cast<std::uint64_t>(e));
    const slqg::DecompositionResidual rand =
        slqg::decomposition_residual(cfg.model, random_grid, ep.trajectory);
    worst_state = std::max({worst_state, mech.state, rand.state});
    worst_control = std::max({worst_control, mech.control, rand.control});
    worst_welfare = std::max({worst_welfare, mech.welfare, rand.welfare});
  }
  std::vector<VerifyRow> rows;
  rows.push_back({"state_reconstruction", worst_state < 1e-9,
                  "max_residual=" + format_g17(worst_state)});
  rows.push_back({"control_reconstruction", worst_control < 1e-9,
                  "max_residual=" + format_g17(worst_control)});
  rows.push_back({"welfare_identity", worst_welfare < 1e-9,
                  "max_residual=" + format_g17(worst_welfare)});
  return report(rows, out_path);
}

std::vector<double> parse_grid(const std::string& spec) {
  double lo, hi, step;
  char c1, c2;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      step <= 0.0 || hi < lo)
    throw slqg::ScenarioError("--grid must be lo:hi:step with step > 0");
  std::vector<double> grid;
  for (double v = lo; v <= hi + 1e-12; v += step) grid.push_back(v);
  // Dominance sweeps are anchored at the truthful point.
  const bool has_zero = std::any_of(grid.begin(), grid.end(),
                                    [](double d) { return d == 0.0; });
  if (!has_zero) grid.push_back(0.0);
  return grid;
}

int verify_ic(const slqg::ScenarioConfig& cfg, int agent, int stage,
              const std::string& grid_spec, const std::string& out_path) {
  if (agent < 0 || agent >= cfg.model.num_agents())
    throw slqg::ScenarioError("--agent out of range");
  if (stage < 0 || stage >= cfg.model.horizon)
    throw slqg::ScenarioError("--stage out of range");
  const std::vector<double> grid = parse_grid(grid_spec);
  const slqg::HistoryPrefix prefix =
      slqg::history_from_seed(cfg.model, stage, cfg.seed);
  const std::vector<slqg::IcRow> sweep =
      slqg::ic_sweep(cfg.model, agent, stage, grid, cfg.h, prefix);

  std::vector<VerifyRow> rows;
  double best_gain = 0.0;
  double truthful = 0.0;
  for (const auto& r : sweep)
    if (r.delta == 0.0) truthful = r.expected_net_utility;
  for (const auto& r : sweep) {
    best_gain = std::max(best_gain, r.expected_net_utility - truthful);
    rows.push_back({"ic_delta_" + format_g17(r.delta), !r.flagged,
                    "expected_net=" + format_g17(r.expected_net_utility)});
  }
  rows.push_back({"ic_no_profitable_deviation", best_gain <= 1e-9,
                  "max_gain_over_truth=" + format_g17(best_gain)});
  return report(rows, out_path);
}

double step_for(double halfwidth, int dims, double budget = 1e7) {
  const int count = std::max(
      5, static_cast<int>(std::floor(std::pow(budget, 1.0 / dims))));
  const int capped = std::min(count, 4001);
  return 2.0 * halfwidth / (capped - 1);
}

int verify_oracle(const slqg::ScenarioConfig& cfg, const std::string& out_path) {
  const int n = cfg.model.num_agents();
  const int T = cfg.model.horizon;
  if (n > 3 || T > 3)
    throw slqg::ScenarioError("oracle suite runs at desk scale (N <= 3, T <= 3)");
  if (n < 2)
    throw slqg::ScenarioError("oracle suite needs at least two agents");
  std::vector<VerifyRow> rows;

  // Static clearing against the grid.
  std::vector<slqg::StaticQuadraticBid> bids;
  if (cfg.static_bids) {
    bids = *cfg.static_bids;
  } else {
    for (int i = 0; i < n; ++i)
      bids.push_back({cfg.model.agents[i].r, i % 2 == 0 ? 2.0 : -2.0});
  }
  {
    const auto problem = slqg::make_static_grid_problem(
        bids, 2.0, step_for(2.0, n - 1));
    const auto check = slqg::verify_against_grid(problem);
    rows.push_back({"static_grid_agreement",
                    check.kkt_not_beaten && check.within_one_step,
                    "coordinate_gap=" + format_g17(check.max_coordinate_gap)});
  }

  // Deterministic dynamic clearing against the grid.
  const Eigen::MatrixXd draws = slqg::episode_draws(cfg.model, cfg.seed, 0);
  std::vector<slqg::DetBid> det_bids;
  for (int i = 0; i < n; ++i)
    det_bids.push_back({cfg.model.agents[i].a, cfg.model.agents[i].b,
                        cfg.model.agents[i].q, cfg.model.agents[i].r,
                        draws(0, i)});
  {
    const int dims = (n - 1) * T;
    const auto problem = slqg::make_dyndet_grid_problem(
        det_bids, T, 2.0, step_for(2.0, dims));
    const auto check = slqg::verify_against_grid(problem);
    rows.push_back({"dyndet_grid_agreement",
                    check.kkt_not_beaten && check.within_one_step,
                    "coordinate_gap=" + format_g17(check.max_coordinate_gap)});
  }

  // Layered stage-0 subproblem against the grid.
  {
    const slqg::LayerGrid empty(n, T);
    const Eigen::VectorXd bid = draws.row(0).transpose();
    const int dims = (n - 1) * T;
    const auto problem = slqg::make_stage_grid_problem(
        cfg.model, 0, empty, bid, 2.0, step_for(2.0, dims));
    const auto check = slqg::verify_against_grid(problem);
    rows.push_back({"stage_grid_agreement",
                    check.kkt_not_beaten && check.within_one_step,
                    "coordinate_gap=" + format_g17(check.max_coordinate_gap)});
  }

  // Negative control: removing a balance row must break the balance
  // invariant the oracle checks.
  {
    const slqg::detail::StageMatrices sm =
        slqg::detail::build_stage_matrices(cfg.model, 0);
    std::vector<Eigen::VectorXd> cx(sm.blocks, Eigen::VectorXd::Zero(n));
    std::vector<Eigen::VectorXd> cu(sm.blocks, Eigen::VectorXd::Zero(n));
    const Eigen::VectorXd f = slqg::detail::assemble_stage_f(
        sm, cfg.model, draws.row(0).transpose(), cx, cu);
    // Drop the first balance row: the immediate allocation is where the
    // trade happens, so an unconstrained optimum there must unbalance.
    const Eigen::MatrixXd mutated_C = sm.C.bottomRows(sm.C.rows() - 1);
    const slqg::QpSolution mutated = slqg::equality_qp_solve(
        sm.H, f, mutated_C, Eigen::VectorXd::Zero(mutated_C.rows()));
    double worst_balance = 0.0;
    for (int k = 0; k < sm.blocks; ++k)
      worst_balance = std::max(
          worst_balance, std::abs(mutated.z.segment(k * n, n).sum()));
    rows.push_back({"negative_control_balance_row", worst_balance > 1e-6,
                    "balance_violation=" + format_g17(worst_balance)});
  }

  // Negative control: dropping the payment cross terms must surface as
  // a non-stationary deviation payoff where the intact rule is flat.
  // Needs a revealed history to couple against: stages 1..T-2, so T >= 3.
  if (T >= 3) {
    const int stage = T - 2;
    const slqg::HistoryPrefix prefix =
        slqg::history_from_seed(cfg.model, stage, cfg.seed ^ 0xFEEDull);
    const auto clean = [&](double d) {
      return slqg::exact_expected_net_utility(cfg.model, 0, stage, d, cfg.h,
                                              prefix, slqg::PaymentRule::groves);
    };
    const auto mutated = [&](double d) {
      return slqg::exact_expected_net_utility(
          cfg.model, 0, stage, d, cfg.h, prefix,
          slqg::PaymentRule::drop_cross_terms);
    };
    const double clean_d = std::abs(slqg::fd_consistency(clean, 1e-4));
    const double mutated_d = std::abs(slqg::fd_consistency(mutated, 1e-4));
    const double scale = std::max(1.0, std::abs(clean(0.0)));
    const bool detected = clean_d <= 1e-6 * scale && mutated_d > 1e-4 * scale;
    rows.push_back({"negative_control_cross_terms", detected,
                    "clean_slope=" + format_g17(clean_d) +
                        " mutated_slope=" + format_g17(mutated_d)});
  }

  return report(rows, out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered VCG market mechanisms for balance-constrained LQG agents"};
  // --h is a documented mechanism flag, so help hides behind --help only.
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  CommonOpts opts;
  int agent = 0;
  int stage = 0;
  std::string grid_spec;
  std::string suite;

  const auto add_common = [&](CLI::App* cmd, bool need_out) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--scenario", opts.scenario, "scenario JSON path")
        ->required();
    auto* out = cmd->add_option("--out", opts.out, "output path");
    if (need_out) out->required();
    cmd->add_option("--episodes", [&](const CLI::results_t& r) {
      opts.episodes = std::stoi(r[0]);
      return true;
    }, "episode count override");
    cmd->add_option("--seed", [&](const CLI::results_t& r) {
      opts.seed = std::stoull(r[0]);
      return true;
    }, "seed override");
    cmd->add_option("--h", [&](const CLI::results_t& r) {
      opts.h = r[0];
      return true;
    }, "Groves h choice: zero|pivot");
  };

  CLI::App* cstatic = app.add_subcommand("static", "one-shot VCG market");
  add_common(cstatic, true);

  CLI::App* crun = app.add_subcommand("run", "layered mechanism episodes");
  add_common(crun, true);

  CLI::App* cverify = app.add_subcommand("verify", "property suites");
  cverify->add_option("suite", suite, "decomposition|ic|oracle")->required();
  add_common(cverify, false);
  cverify->add_option("--agent", agent, "deviating agent (ic suite)");
  cverify->add_option("--stage", stage, "deviation stage (ic suite)");
  cverify->add_option("--grid", grid_spec, "deviation grid lo:hi:step (ic suite)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cstatic->parsed()) return cmd_static(opts);
    if (crun->parsed()) return cmd_run(opts);
    const slqg::ScenarioConfig cfg = load_with_overrides(opts);
    if (suite == "decomposition") return verify_decomposition(cfg, opts.out);
    if (suite == "ic") {
      if (grid_spec.empty())
        throw slqg::ScenarioError("ic suite needs --grid lo:hi:step");
      return verify_ic(cfg, agent, stage, grid_spec, opts.out);
    }
    if (suite == "oracle") return verify_oracle(cfg, opts.out);
    throw slqg::ScenarioError("unknown suite: " + suite);
  } catch (const slqg::ScenarioError& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "configuration error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
