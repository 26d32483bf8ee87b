#pragma once

// Tabular episodic MDPs: the dense model, validation, sampling, and
// exhaustive trajectory enumeration for tiny instances.
//
// Steps are 0-based in the API (h = 0 .. H-1), so the number of steps left
// when acting at step h is H - h. Error messages report 1-based steps.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rsrl/errors.hpp"

namespace rsrl {

inline constexpr double kStochasticTol = 1e-12;
inline constexpr double kNeutralThreshold = 1e-10;
inline constexpr double kExponentBudget = 300.0;
inline constexpr double kEnumerationLimit = 1e6;

enum class InitialStateKind { kFixed, kCyclic, kSeededRandom };

struct InitialStateRule {
  InitialStateKind kind = InitialStateKind::kFixed;
  int state = 0;  // only read for kFixed

  static InitialStateRule fixed(int s) { return {InitialStateKind::kFixed, s}; }
  static InitialStateRule cyclic() { return {InitialStateKind::kCyclic, 0}; }
  static InitialStateRule seeded_random() {
    return {InitialStateKind::kSeededRandom, 0};
  }

  // Initial state of episode k (0-based). `rng` is only drawn from for the
  // seeded-random rule.
  template <class Rng>
  int initial_state(long long episode, int num_states, Rng& rng) const {
    switch (kind) {
      case InitialStateKind::kFixed:
        return state;
      case InitialStateKind::kCyclic:
        return static_cast<int>(episode % num_states);
      case InitialStateKind::kSeededRandom:
        return std::uniform_int_distribution<int>(0, num_states - 1)(rng);
    }
    return state;
  }

  friend bool operator==(const InitialStateRule&, const InitialStateRule&) = default;
};

// Exponential-utility parameter. |beta| below kNeutralThreshold switches every
// consumer to its risk-neutral (expected reward) form.
class RiskParam {
 public:
  RiskParam() = default;
  explicit RiskParam(double beta)
      : beta_(beta), neutral_(std::abs(beta) < kNeutralThreshold) {
    if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
  }

  static RiskParam neutral_param() { return RiskParam(0.0); }

  double beta() const { return beta_; }
  bool neutral() const { return neutral_; }

  // Overflow guard for exponentiating values on a horizon-H problem.
  void check_pairing(int horizon) const {
    if (!neutral_ && std::abs(beta_) * (horizon + 1) > kExponentBudget) {
      throw NumericOverflow("|beta|*(H+1) = " +
                            std::to_string(std::abs(beta_) * (horizon + 1)) +
                            " exceeds the exponent budget of 300");
    }
  }

 private:
  double beta_ = 0.0;
  bool neutral_ = true;
};

// Deterministic Markov policy: action(h, s).
class Policy {
 public:
  Policy() = default;
  Policy(int horizon, int num_states, int fill = 0)
      : horizon_(horizon), num_states_(num_states),
        actions_(static_cast<std::size_t>(horizon) * num_states, fill) {}

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }

  int operator()(int h, int s) const { return actions_[index(h, s)]; }
  int& at(int h, int s) { return actions_[index(h, s)]; }
  std::span<const int> step(int h) const {
    return {actions_.data() + static_cast<std::size_t>(h) * num_states_,
            static_cast<std::size_t>(num_states_)};
  }

  friend bool operator==(const Policy&, const Policy&) = default;

 private:
  std::size_t index(int h, int s) const {
    return static_cast<std::size_t>(h) * num_states_ + s;
  }

  int horizon_ = 0;
  int num_states_ = 0;
  std::vector<int> actions_;
};

// Dense tabular episodic MDP. Transition rows P(h, s, a, .) and rewards
// r(h, s, a) in [0, 1]. Treat as immutable once validated.
class EpisodicMDP {
 public:
  EpisodicMDP() = default;
  EpisodicMDP(int num_states, int num_actions, int horizon)
      : S_(num_states), A_(num_actions), H_(horizon) {
    if (num_states < 1 || num_actions < 1 || horizon < 1) {
      throw ValidationError("S, A and H must all be positive");
    }
    P_.assign(static_cast<std::size_t>(H_) * S_ * A_ * S_, 0.0);
    r_.assign(static_cast<std::size_t>(H_) * S_ * A_, 0.0);
  }

  int num_states() const { return S_; }
  int num_actions() const { return A_; }
  int horizon() const { return H_; }

  double& P(int h, int s, int a, int next) { return P_[pidx(h, s, a) + next]; }
  double P(int h, int s, int a, int next) const { return P_[pidx(h, s, a) + next]; }
  std::span<const double> row(int h, int s, int a) const {
    return {P_.data() + pidx(h, s, a), static_cast<std::size_t>(S_)};
  }
  std::span<double> row(int h, int s, int a) {
    return {P_.data() + pidx(h, s, a), static_cast<std::size_t>(S_)};
  }

  double& r(int h, int s, int a) { return r_[ridx(h, s, a)]; }
  double r(int h, int s, int a) const { return r_[ridx(h, s, a)]; }

  const InitialStateRule& initial_state_rule() const { return rule_; }
  void set_initial_state_rule(InitialStateRule rule) { rule_ = rule; }

  friend bool operator==(const EpisodicMDP&, const EpisodicMDP&) = default;

 private:
  std::size_t pidx(int h, int s, int a) const {
    return ((static_cast<std::size_t>(h) * S_ + s) * A_ + a) * S_;
  }
  std::size_t ridx(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
  }

  int S_ = 0;
  int A_ = 0;
  int H_ = 0;
  std::vector<double> P_;
  std::vector<double> r_;
  InitialStateRule rule_;
};

// Throws on the first violating (h, s, a) in step-major order. Kernel rows are
// checked before the reward of the same triple.
inline void validate(const EpisodicMDP& mdp) {
  const int S = mdp.num_states();
  if (S < 1 || mdp.num_actions() < 1 || mdp.horizon() < 1) {
    throw ValidationError("S, A and H must all be positive");
  }
  const auto& rule = mdp.initial_state_rule();
  if (rule.kind == InitialStateKind::kFixed && (rule.state < 0 || rule.state >= S)) {
    throw ValidationError("fixed initial state " + std::to_string(rule.state) +
                          " out of range");
  }
  for (int h = 0; h < mdp.horizon(); ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < mdp.num_actions(); ++a) {
        const auto where = "(h=" + std::to_string(h + 1) + ", s=" +
                           std::to_string(s) + ", a=" + std::to_string(a) + ")";
        double total = 0.0;
        bool negative = false;
        for (double p : mdp.row(h, s, a)) {
          if (!(p >= 0.0)) negative = true;
          total += p;
        }
        if (negative || !(std::abs(total - 1.0) <= kStochasticTol)) {
          throw NonStochasticKernel(h + 1, s, a,
                                    "transition row " + where +
                                        " is not a distribution (sum = " +
                                        std::to_string(total) + ")");
        }
        const double reward = mdp.r(h, s, a);
        if (!(reward >= 0.0 && reward <= 1.0)) {
          throw RewardOutOfRange(h + 1, s, a,
                                 "reward " + where + " = " +
                                     std::to_string(reward) + " outside [0, 1]");
        }
      }
    }
  }
}

// Divides every transition row by its sum. Rows with negative entries or a
// zero sum are left for validate() to reject.
inline void renormalize(EpisodicMDP& mdp) {
  for (int h = 0; h < mdp.horizon(); ++h) {
    for (int s = 0; s < mdp.num_states(); ++s) {
      for (int a = 0; a < mdp.num_actions(); ++a) {
        auto row = mdp.row(h, s, a);
        double total = 0.0;
        for (double p : row) total += p;
        if (total > 0.0) {
          for (double& p : row) p /= total;
        }
      }
    }
  }
}

struct Transition {
  int h;
  int s;
  int a;
  double reward;
  int s_next;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Trajectory {
  std::vector<Transition> steps;
  double total_reward = 0.0;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

// Draws s' ~ row by inverse CDF. Zero-probability states are never returned.
template <class Rng>
int sample_next_state(std::span<const double> row, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] <= 0.0) continue;
    cumulative += row[i];
    last_positive = static_cast<int>(i);
    if (u < cumulative) return last_positive;
  }
  return last_positive;  // rounding slack in the cumulative sum
}

template <class Rng>
Trajectory sample_episode(const EpisodicMDP& mdp, const Policy& policy,
                          int initial_state, Rng& rng) {
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(mdp.horizon()));
  int s = initial_state;
  for (int h = 0; h < mdp.horizon(); ++h) {
    const int a = policy(h, s);
    const double reward = mdp.r(h, s, a);
    const int next = sample_next_state(mdp.row(h, s, a), rng);
    traj.steps.push_back({h, s, a, reward, next});
    traj.total_reward += reward;
    s = next;
  }
  return traj;
}

struct WeightedReturn {
  double probability;
  double total_reward;
};

// All positive-probability continuations of `policy` from state s at step
// h_start, with the reward accumulated from h_start onward.
inline std::vector<WeightedReturn> enumerate_trajectories(const EpisodicMDP& mdp,
                                                          const Policy& policy,
                                                          int s_start,
                                                          int h_start) {
  const int remaining = mdp.horizon() - h_start;
  if (remaining < 0) throw ValidationError("h_start beyond the horizon");
  if (std::pow(static_cast<double>(mdp.num_states()), remaining) > kEnumerationLimit) {
    throw InstanceTooLarge("S^(H-h+1) = " + std::to_string(mdp.num_states()) + "^" +
                           std::to_string(remaining) + " exceeds 1e6 trajectories");
  }
  std::vector<WeightedReturn> out;
  // Depth-first expansion; the frontier holds (step, state, prob, reward).
  struct Node {
    int h;
    int s;
    double prob;
    double reward;
  };
  std::vector<Node> stack{{h_start, s_start, 1.0, 0.0}};
  while (!stack.empty()) {
    const Node node = stack.back();
    stack.pop_back();
    if (node.h == mdp.horizon()) {
      out.push_back({node.prob, node.reward});
      continue;
    }
    const int a = policy(node.h, node.s);
    const double reward = node.reward + mdp.r(node.h, node.s, a);
    const auto row = mdp.row(node.h, node.s, a);
    for (int next = mdp.num_states() - 1; next >= 0; --next) {
      if (row[next] > 0.0) {
        stack.push_back({node.h + 1, next, node.prob * row[next], reward});
      }
    }
  }
  return out;
}

}  // namespace rsrl
