// Command-line front end: solve, run, gen, lambda, bound.
//
// Exit codes: 0 success, 2 invalid input, 1 runtime failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsrl/rsrl.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 1;

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    rsrl::write_text_file(path, text);
  }
}

struct SolveArgs {
  std::string config;
  std::string out;
  double beta = 0.0;
  bool renormalize = false;
};

int solve(const SolveArgs& args) {
  const auto mdp = rsrl::load_mdp(args.config, args.renormalize);
  const rsrl::RiskParam risk(args.beta);
  const auto sol = rsrl::solve_optimal(mdp, risk);
  write_or_print(args.out, rsrl::solution_to_json(sol, args.beta).dump(2) + "\n");
  return 0;
}

struct RunArgs {
  std::string config;
  std::string out;
  std::string aggregate_out;
  std::string seeds;
  std::string agent;
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<double> bonus_const;
  std::optional<long long> K;
  std::optional<int> workers;
};

int run(const RunArgs& args) {
  auto config = rsrl::config_from_json(rsrl::read_json_file(args.config));
  if (!args.seeds.empty()) config.seeds = rsrl::parse_seed_range(args.seeds);
  if (!args.agent.empty()) config.agent = rsrl::parse_agent_kind(args.agent);
  if (args.beta) config.beta = *args.beta;
  if (args.delta) config.delta = *args.delta;
  if (args.bonus_const) config.bonus_const = *args.bonus_const;
  if (args.K) config.K = *args.K;
  if (args.workers) config.workers = *args.workers;
  if (!args.out.empty()) config.output = args.out;
  rsrl::validate_config(config);

  const auto records = rsrl::run(config);
  write_or_print(config.output, rsrl::records_to_csv(records));
  if (!config.output.empty()) {
    const rsrl::json meta = {{"agent", rsrl::to_string(config.agent)},
                             {"K", config.K},
                             {"delta", config.delta},
                             {"beta", config.beta},
                             {"bonus_const", config.bonus_const},
                             {"seeds", config.seeds}};
    rsrl::write_text_file(config.output + ".meta.json", meta.dump(2) + "\n");
  }
  if (!args.aggregate_out.empty()) {
    rsrl::emit_aggregate_csv(rsrl::aggregate(records), args.aggregate_out);
  }
  return 0;
}

struct GenArgs {
  std::string kind;
  std::string out;
  int states = 3;
  int actions = 2;
  int horizon = 3;
  std::uint64_t seed = 0;
  double concentration = 1.0;
  int h_inner = 6;
  long long K = 10000;
  double beta = 0.1;
  double C = 1.0;
  double slip = 0.1;
};

int gen(const GenArgs& args) {
  rsrl::EpisodicMDP mdp;
  if (args.kind == "random") {
    mdp = rsrl::random_mdp(args.states, args.actions, args.horizon, args.seed, args.concentration);
  } else if (args.kind == "lower-bound") {
    mdp = rsrl::lower_bound_bandit({args.h_inner, args.K, args.beta, args.C});
  } else if (args.kind == "chain") {
    mdp = rsrl::chain_mdp(args.states, args.horizon, args.slip);
  } else {
    throw rsrl::ValidationError("unknown generator '" + args.kind + "'");
  }
  write_or_print(args.out, rsrl::mdp_to_json(mdp).dump(2) + "\n");
  return 0;
}

struct LambdaArgs {
  std::vector<int> horizons{1, 2, 4, 8};
  std::vector<double> betas;
  double beta_max = 1.0;
  int steps = 21;
  std::string out;
};

int lambda(const LambdaArgs& args) {
  std::vector<double> grid = args.betas;
  if (grid.empty()) {
    if (args.steps < 2) throw rsrl::ValidationError("--steps must be >= 2");
    for (int i = 0; i < args.steps; ++i) grid.push_back(args.beta_max * i / (args.steps - 1));
  }
  write_or_print(args.out, rsrl::lambda_curve_csv(args.horizons, grid));
  return 0;
}

struct BoundArgs {
  std::string kind = "rsvi";
  int states = 3;
  int actions = 2;
  int horizon = 3;
  std::vector<long long> episodes{100, 1000, 10000};
  double delta = 0.1;
  double beta = 0.0;
  std::string out;
};

int bound(const BoundArgs& args) {
  const auto kind = rsrl::parse_agent_kind(args.kind);
  std::string text = "K,T,bound\n";
  for (long long K : args.episodes) {
    const double T = static_cast<double>(K) * args.horizon;
    const double b = rsrl::regret_upper_bound(kind, args.states, args.actions, args.horizon, T,
                                              args.delta, args.beta);
    text += std::to_string(K) + "," + rsrl::format_double(T) + "," + rsrl::format_double(b) + "\n";
  }
  write_or_print(args.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive tabular RL: exact DP, RSVI/RSQ experiments, generators"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Exact risk-sensitive DP on an MDP file");
  solve_cmd->add_option("--config", solve_args.config, "MDP JSON file")->required();
  solve_cmd->add_option("--beta", solve_args.beta, "Risk parameter");
  solve_cmd->add_option("--out", solve_args.out, "Output JSON (default stdout)");
  solve_cmd->add_flag("--renormalize", solve_args.renormalize, "Renormalize kernel rows");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("--config", run_args.config, "Experiment JSON file")->required();
  run_cmd->add_option("--out", run_args.out, "Regret CSV (default: config output or stdout)");
  run_cmd->add_option("--aggregate", run_args.aggregate_out, "Per-episode aggregate CSV");
  run_cmd->add_option("--seeds", run_args.seeds, "Seed range a..b");
  run_cmd->add_option("--agent", run_args.agent, "rsvi|rsq|optimal|random");
  run_cmd->add_option("--beta", run_args.beta, "Risk parameter");
  run_cmd->add_option("--delta", run_args.delta, "Confidence level");
  run_cmd->add_option("--const", run_args.bonus_const, "Bonus constant");
  run_cmd->add_option("--K", run_args.K, "Number of episodes");
  run_cmd->add_option("--workers", run_args.workers, "Worker threads");

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Emit a generated MDP as JSON");
  gen_cmd->add_option("kind", gen_args.kind, "random|lower-bound|chain")->required();
  gen_cmd->add_option("--out", gen_args.out, "Output JSON (default stdout)");
  gen_cmd->add_option("--states", gen_args.states, "Number of states");
  gen_cmd->add_option("--actions", gen_args.actions, "Number of actions");
  gen_cmd->add_option("--horizon", gen_args.horizon, "Horizon");
  gen_cmd->add_option("--seed", gen_args.seed, "Generator seed");
  gen_cmd->add_option("--concentration", gen_args.concentration, "Dirichlet concentration");
  gen_cmd->add_option("--h-inner", gen_args.h_inner, "Bandit payoff scale (lower-bound)");
  gen_cmd->add_option("--K", gen_args.K, "Episodes the instance is tuned for (lower-bound)");
  gen_cmd->add_option("--beta", gen_args.beta, "Risk parameter (lower-bound)");
  gen_cmd->add_option("--C", gen_args.C, "Gap constant (lower-bound)");
  gen_cmd->add_option("--slip", gen_args.slip, "Slip probability (chain)");

  LambdaArgs lambda_args;
  auto* lambda_cmd = app.add_subcommand("lambda", "CSV of lambda(|beta| H^2) over a grid");
  lambda_cmd->add_option("--H", lambda_args.horizons, "Horizons")->delimiter(',');
  lambda_cmd->add_option("--betas", lambda_args.betas, "Explicit beta grid")->delimiter(',');
  lambda_cmd->add_option("--beta-max", lambda_args.beta_max, "Upper end of a uniform grid from 0");
  lambda_cmd->add_option("--steps", lambda_args.steps, "Points in the uniform grid");
  lambda_cmd->add_option("--out", lambda_args.out, "Output CSV (default stdout)");

  BoundArgs bound_args;
  auto* bound_cmd = app.add_subcommand("bound", "Regret upper-bound reference curve");
  bound_cmd->add_option("--kind", bound_args.kind, "rsvi|rsq");
  bound_cmd->add_option("--states", bound_args.states, "Number of states");
  bound_cmd->add_option("--actions", bound_args.actions, "Number of actions");
  bound_cmd->add_option("--horizon", bound_args.horizon, "Horizon");
  bound_cmd->add_option("--K", bound_args.episodes, "Episode counts")->delimiter(',');
  bound_cmd->add_option("--delta", bound_args.delta, "Confidence level");
  bound_cmd->add_option("--beta", bound_args.beta, "Risk parameter");
  bound_cmd->add_option("--out", bound_args.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*solve_cmd) return solve(solve_args);
    if (*run_cmd) return run(run_args);
    if (*gen_cmd) return gen(gen_args);
    if (*lambda_cmd) return lambda(lambda_args);
    if (*bound_cmd) return bound(bound_args);
  } catch (const rsrl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
