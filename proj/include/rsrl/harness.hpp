#pragma once

// Experiment driver: runs an agent for K episodes per seed and records the
// exact per-episode regret V*_1(s_1^k) - V^{pi_k}_1(s_1^k), where pi_k is the
// greedy policy the agent commits to at the start of episode k.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rsrl/envs.hpp"
#include "rsrl/io.hpp"
#include "rsrl/mdp.hpp"
#include "rsrl/risk_dp.hpp"
#include "rsrl/rsq.hpp"
#include "rsrl/rsvi.hpp"

namespace rsrl {

enum class AgentKind { kRsvi, kRsq, kOptimal, kRandom };

inline AgentKind parse_agent_kind(const std::string& name) {
  if (name == "rsvi") return AgentKind::kRsvi;
  if (name == "rsq") return AgentKind::kRsq;
  if (name == "optimal") return AgentKind::kOptimal;
  if (name == "random" || name == "uniform-random") return AgentKind::kRandom;
  throw ValidationError("unknown agent '" + name + "' (rsvi|rsq|optimal|random)");
}

inline std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kRsvi: return "rsvi";
    case AgentKind::kRsq: return "rsq";
    case AgentKind::kOptimal: return "optimal";
    case AgentKind::kRandom: return "random";
  }
  return "?";
}

struct FileEnv {
  std::string path;
  bool renormalize = false;
};
struct RandomEnv {
  int S = 3;
  int A = 2;
  int H = 3;
  std::uint64_t seed = 0;
  double concentration = 1.0;
};
struct LowerBoundEnv {
  LowerBoundSpec spec;
  bool beta_from_experiment = true;  // use ExperimentConfig::beta when set
};
struct ChainEnv {
  int S = 5;
  int H = 8;
  double slip = 0.1;
  double small = 0.05;
};

using EnvSpec = std::variant<EpisodicMDP, FileEnv, RandomEnv, LowerBoundEnv, ChainEnv>;

struct ExperimentConfig {
  EnvSpec env = RandomEnv{};
  AgentKind agent = AgentKind::kRsvi;
  long long K = 1000;
  double delta = 0.1;
  double beta = 0.0;
  double bonus_const = 0.1;
  std::vector<std::uint64_t> seeds{0};
  std::string output;
  int workers = 1;
};

struct RegretRecord {
  std::uint64_t seed;
  long long k;  // 1-based episode index
  double inst_regret;
  double cum_regret;
  double ms;
};

inline EpisodicMDP build_env(const EnvSpec& env, double beta) {
  struct Visitor {
    double beta;
    EpisodicMDP operator()(const EpisodicMDP& m) const {
      validate(m);
      return m;
    }
    EpisodicMDP operator()(const FileEnv& f) const { return load_mdp(f.path, f.renormalize); }
    EpisodicMDP operator()(const RandomEnv& r) const {
      return random_mdp(r.S, r.A, r.H, r.seed, r.concentration);
    }
    EpisodicMDP operator()(const LowerBoundEnv& l) const {
      LowerBoundSpec spec = l.spec;
      if (l.beta_from_experiment) spec.beta = beta;
      return lower_bound_bandit(spec);
    }
    EpisodicMDP operator()(const ChainEnv& c) const {
      return chain_mdp(c.S, c.H, c.slip, c.small);
    }
  };
  return std::visit(Visitor{beta}, env);
}

inline void validate_config(const ExperimentConfig& c) {
  if (c.K < 1) throw ValidationError("K must be >= 1");
  if (!(c.delta > 0.0 && c.delta <= 1.0)) throw ValidationError("delta must lie in (0, 1]");
  if (!(c.bonus_const > 0.0)) throw ValidationError("bonus constant must be positive");
  if (!std::isfinite(c.beta)) throw ValidationError("beta must be finite");
  if (c.seeds.empty()) throw ValidationError("at least one seed is required");
  if (c.workers < 1) throw ValidationError("workers must be >= 1");
}

// "a..b" (inclusive) or a single integer.
inline std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const auto v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v};
    }
    const std::string lo_text = text.substr(0, dots);
    const std::string hi_text = text.substr(dots + 2);
    const auto lo = std::stoull(lo_text, &used);
    if (used != lo_text.size()) throw std::invalid_argument(text);
    const auto hi = std::stoull(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument(text);
    if (hi < lo) throw ValidationError("seed range '" + text + "' is empty");
    std::vector<std::uint64_t> out;
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
    return out;
  } catch (const std::logic_error&) {
    throw ValidationError("bad seed range '" + text + "' (expected a..b)");
  }
}

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline EnvSpec env_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ValidationError("env must be an object with a string 'type'");
  }
  const auto type = j["type"].get<std::string>();
  if (type == "inline") {
    if (!j.contains("mdp")) throw ValidationError("inline env needs 'mdp'");
    return mdp_from_json(j["mdp"], detail::get_or(j, "renormalize", false));
  }
  if (type == "file") {
    if (!j.contains("path")) throw ValidationError("file env needs 'path'");
    return FileEnv{detail::get_or<std::string>(j, "path", ""),
                   detail::get_or(j, "renormalize", false)};
  }
  if (type == "random") {
    RandomEnv r;
    r.S = detail::get_or(j, "S", r.S);
    r.A = detail::get_or(j, "A", r.A);
    r.H = detail::get_or(j, "H", r.H);
    r.seed = detail::get_or<std::uint64_t>(j, "seed", r.seed);
    r.concentration = detail::get_or(j, "concentration", r.concentration);
    return r;
  }
  if (type == "lower_bound") {
    LowerBoundEnv l;
    l.spec.H_inner = detail::get_or(j, "H_inner", l.spec.H_inner);
    l.spec.K = detail::get_or(j, "K", l.spec.K);
    l.spec.C = detail::get_or(j, "C", l.spec.C);
    l.beta_from_experiment = !j.contains("beta");
    l.spec.beta = detail::get_or(j, "beta", l.spec.beta);
    return l;
  }
  if (type == "chain") {
    ChainEnv c;
    c.S = detail::get_or(j, "S", c.S);
    c.H = detail::get_or(j, "H", c.H);
    c.slip = detail::get_or(j, "slip", c.slip);
    c.small = detail::get_or(j, "small", c.small);
    return c;
  }
  throw ValidationError("unknown env type '" + type + "'");
}

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
  ExperimentConfig c;
  if (!j.contains("env")) throw ValidationError("experiment config needs 'env'");
  c.env = env_from_json(j["env"]);
  c.agent = parse_agent_kind(detail::get_or<std::string>(j, "agent", "rsvi"));
  c.K = detail::get_or(j, "K", c.K);
  c.delta = detail::get_or(j, "delta", c.delta);
  c.beta = detail::get_or(j, "beta", c.beta);
  c.bonus_const = detail::get_or(j, "bonus_const", c.bonus_const);
  if (j.contains("seeds")) {
    if (j["seeds"].is_string()) {
      c.seeds = parse_seed_range(j["seeds"].get<std::string>());
    } else {
      c.seeds = detail::get_or<std::vector<std::uint64_t>>(j, "seeds", {});
    }
  }
  c.output = detail::get_or<std::string>(j, "output", "");
  c.workers = detail::get_or(j, "workers", c.workers);
  validate_config(c);
  return c;
}

// Uniformly random deterministic policy.
template <class Rng>
Policy random_policy(int horizon, int num_states, int num_actions, Rng& rng) {
  Policy pi(horizon, num_states);
  std::uniform_int_distribution<int> pick(0, num_actions - 1);
  for (int h = 0; h < horizon; ++h) {
    for (int s = 0; s < num_states; ++s) pi.at(h, s) = pick(rng);
  }
  return pi;
}

// One seed of an experiment on a prepared environment. `optimal` must be
// solve_optimal(mdp, RiskParam(config.beta)).
inline std::vector<RegretRecord> run_seed(const EpisodicMDP& mdp, const OptimalSolution& optimal,
                                          const ExperimentConfig& config, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  const RiskParam risk(config.beta);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int H = mdp.horizon();
  std::mt19937_64 rng(seed);

  std::variant<std::monostate, RsviAgent, RsqAgent> agent;
  if (config.agent == AgentKind::kRsvi) {
    agent.emplace<RsviAgent>(S, A, H, RsviConfig{config.K, config.delta, config.bonus_const, risk});
  } else if (config.agent == AgentKind::kRsq) {
    agent.emplace<RsqAgent>(S, A, H, RsqConfig{config.K, config.delta, config.bonus_const, risk});
  }

  std::vector<RegretRecord> records;
  records.reserve(static_cast<std::size_t>(config.K));
  double cumulative = 0.0;
  for (long long k = 0; k < config.K; ++k) {
    const auto start = Clock::now();
    const int s1 = mdp.initial_state_rule().initial_state(k, S, rng);

    Policy pi;
    if (auto* rsvi = std::get_if<RsviAgent>(&agent)) {
      rsvi->plan();
      pi = rsvi->greedy_policy();
    } else if (auto* rsq = std::get_if<RsqAgent>(&agent)) {
      pi = rsq->greedy_policy();
    } else if (config.agent == AgentKind::kOptimal) {
      pi = optimal.policy;
    } else {
      pi = random_policy(H, S, A, rng);
    }
    const ValueTables committed = evaluate_policy(mdp, pi, risk);
    const double inst = optimal.values.V(0, s1) - committed.V(0, s1);
    cumulative += inst;

    int s = s1;
    for (int h = 0; h < H; ++h) {
      if (auto* rsq = std::get_if<RsqAgent>(&agent)) {
        s = rsq->step(mdp, h, s, rng).next_state;
        continue;
      }
      auto* rsvi = std::get_if<RsviAgent>(&agent);
      const int a = rsvi ? rsvi->act(h, s) : pi(h, s);
      const int next = sample_next_state(mdp.row(h, s, a), rng);
      if (rsvi) rsvi->observe(h, s, a, mdp.r(h, s, a), next);
      s = next;
    }
    const double ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    records.push_back({seed, k + 1, inst, cumulative, ms});
  }
  return records;
}

// Runs every seed, `workers` at a time, and concatenates results in seed order.
inline std::vector<RegretRecord> run(const ExperimentConfig& config) {
  validate_config(config);
  const EpisodicMDP mdp = build_env(config.env, config.beta);
  const RiskParam risk(config.beta);
  risk.check_pairing(mdp.horizon());
  const OptimalSolution optimal = solve_optimal(mdp, risk);

  std::vector<std::vector<RegretRecord>> per_seed(config.seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      try {
        per_seed[i] = run_seed(mdp, optimal, config, config.seeds[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int pool = std::min<int>(config.workers, static_cast<int>(config.seeds.size()));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<RegretRecord> out;
  for (auto& chunk : per_seed) out.insert(out.end(), chunk.begin(), chunk.end());
  return out;
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string records_to_csv(const std::vector<RegretRecord>& records) {
  std::ostringstream out;
  out << "seed,k,inst_regret,cum_regret,ms\n";
  char ms[32];
  for (const auto& r : records) {
    std::snprintf(ms, sizeof ms, "%.3f", r.ms);
    out << r.seed << ',' << r.k << ',' << format_double(r.inst_regret) << ','
        << format_double(r.cum_regret) << ',' << ms << '\n';
  }
  return out.str();
}

inline void emit_csv(const std::vector<RegretRecord>& records, const std::string& path) {
  write_text_file(path, records_to_csv(records));
}

struct AggregateRow {
  long long k;
  std::size_t seeds;
  double mean;
  double lo;  // 5% quantile
  double hi;  // 95% quantile
};

// Linear-interpolation quantile of an unsorted sample.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= xs.size()) return xs.back();
  return xs[i] + (pos - static_cast<double>(i)) * (xs[i + 1] - xs[i]);
}

// Cumulative regret per episode across seeds: mean and central 90% band.
inline std::vector<AggregateRow> aggregate(const std::vector<RegretRecord>& records) {
  long long max_k = 0;
  for (const auto& r : records) max_k = std::max(max_k, r.k);
  std::vector<std::vector<double>> by_k(static_cast<std::size_t>(max_k));
  for (const auto& r : records) by_k[static_cast<std::size_t>(r.k - 1)].push_back(r.cum_regret);
  std::vector<AggregateRow> out;
  for (long long k = 1; k <= max_k; ++k) {
    const auto& xs = by_k[static_cast<std::size_t>(k - 1)];
    if (xs.empty()) continue;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.push_back({k, xs.size(), sum / static_cast<double>(xs.size()), quantile(xs, 0.05),
                   quantile(xs, 0.95)});
  }
  return out;
}

inline void emit_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "k,seeds,mean_cum_regret,q05,q95\n";
  for (const auto& r : rows) {
    out << r.k << ',' << r.seeds << ',' << format_double(r.mean) << ','
        << format_double(r.lo) << ',' << format_double(r.hi) << '\n';
  }
  write_text_file(path, out.str());
}

// Reference curves with the hidden constant set to 1:
//   rsvi: lambda(|beta| H^2) sqrt(H^3 S^2 A T) log(2SAT/delta)
//   rsq:  lambda(|beta| H^2) sqrt(H^4 S A T log(SAT/delta))
inline double regret_upper_bound(AgentKind kind, double S, double A, double H, double T,
                                 double delta, double beta) {
  if (!(S > 0 && A > 0 && H > 0 && T > 0 && delta > 0 && delta <= 1.0)) {
    throw ValidationError("regret_upper_bound: parameters must be positive, delta <= 1");
  }
  const double lambda = lambda_factor(std::abs(beta) * H * H);
  switch (kind) {
    case AgentKind::kRsvi:
      return lambda * std::sqrt(H * H * H * S * S * A * T) * std::log(2.0 * S * A * T / delta);
    case AgentKind::kRsq:
      return lambda * std::sqrt(H * H * H * H * S * A * T * std::log(S * A * T / delta));
    default:
      throw ValidationError("regret bounds exist only for rsvi and rsq");
  }
}

// Rows (H, beta, lambda(|beta| H^2)) for every H and beta.
inline std::string lambda_curve_csv(const std::vector<int>& H_list,
                                    const std::vector<double>& beta_grid) {
  if (H_list.empty() || beta_grid.empty()) {
    throw ValidationError("lambda curve needs non-empty H and beta grids");
  }
  std::ostringstream out;
  out << "H,beta,lambda\n";
  for (int H : H_list) {
    if (H < 1) throw ValidationError("H must be positive");
    for (double beta : beta_grid) {
      const double u = std::abs(beta) * static_cast<double>(H) * H;
      out << H << ',' << format_double(beta) << ',' << format_double(lambda_factor(u)) << '\n';
    }
  }
  return out.str();
}

inline void emit_lambda_curve(const std::vector<int>& H_list, const std::vector<double>& beta_grid,
                              const std::string& path) {
  write_text_file(path, lambda_curve_csv(H_list, beta_grid));
}

}  // namespace rsrl
