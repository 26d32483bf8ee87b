#pragma once

// Risk-sensitive value iteration. Each episode re-solves the optimistic
// exponentiated Bellman backup from empirical transition counts, then acts
// greedily.
//
// The least-squares step over the canonical basis reduces to a per-pair sample
// mean of e^{beta[r + V_{h+1}(s')]}. Because V_{h+1} is recomputed every
// episode, that mean depends on the history only through the transition
// counts M_h(s, a, s'), so those are stored instead of the raw dataset.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rsrl/mdp.hpp"
#include "rsrl/optimism.hpp"
#include "rsrl/risk_dp.hpp"

namespace rsrl {

struct RsviConfig {
  long long episodes = 1000;  // K; T = K * H enters the bonus
  double delta = 0.1;
  double c_gamma = 0.1;
  RiskParam risk;
};

class RsviAgent {
 public:
  RsviAgent(int num_states, int num_actions, int horizon, RsviConfig config)
      : S_(num_states), A_(num_actions), H_(horizon), config_(config),
        counts_(static_cast<std::size_t>(H_) * S_ * A_, 0),
        transitions_(static_cast<std::size_t>(H_) * S_ * A_ * S_, 0),
        rewards_(static_cast<std::size_t>(H_) * S_ * A_, 0.0),
        w_(static_cast<std::size_t>(H_) * S_ * A_, 0.0),
        bonus_(static_cast<std::size_t>(H_) * S_ * A_, 0.0),
        tables_(H_, S_, A_) {
    if (config_.episodes < 1) throw ValidationError("RSVI: K must be >= 1");
    if (!(config_.delta > 0.0 && config_.delta <= 1.0)) {
      throw ValidationError("RSVI: delta must lie in (0, 1]");
    }
    if (!(config_.c_gamma > 0.0)) throw ValidationError("RSVI: c_gamma must be positive");
    config_.risk.check_pairing(H_);
    const double T = static_cast<double>(config_.episodes) * H_;
    log_term_ = std::log(2.0 * S_ * A_ * T / config_.delta);
    scale_ = config_.c_gamma * bonus_scale(config_.risk, H_);
    reset_tables();
  }

  int num_states() const { return S_; }
  int num_actions() const { return A_; }
  int horizon() const { return H_; }
  const RsviConfig& config() const { return config_; }

  // c_gamma |e^{beta H} - 1| sqrt(S log(2SAT/delta) / n).
  double bonus(long long n) const {
    return scale_ * std::sqrt(S_ * log_term_ / static_cast<double>(n));
  }

  // Backward pass over h = H-1 .. 0. Pairs never visited keep Q = H - h.
  void plan() {
    const RiskParam& risk = config_.risk;
    std::vector<double> next_exp(static_cast<std::size_t>(S_));
    for (int h = H_ - 1; h >= 0; --h) {
      const int remaining = H_ - h;
      for (int s2 = 0; s2 < S_; ++s2) next_exp[s2] = to_exp_domain(tables_.V(h + 1, s2), risk);
      for (int s = 0; s < S_; ++s) {
        for (int a = 0; a < A_; ++a) {
          const std::size_t i = idx(h, s, a);
          const long long n = counts_[i];
          if (n == 0) {
            tables_.Q(h, s, a) = remaining;
            continue;
          }
          const double r = rewards_[i];
          double acc = 0.0;
          const long long* row = transitions_.data() + i * S_;
          for (int s2 = 0; s2 < S_; ++s2) {
            if (row[s2] != 0) acc += static_cast<double>(row[s2]) * next_exp[s2];
          }
          // Neutral mode averages r + V; otherwise e^{beta r} * mean e^{beta V}.
          const double mean = acc / static_cast<double>(n);
          w_[i] = risk.neutral() ? r + mean : std::exp(risk.beta() * r) * mean;
          bonus_[i] = bonus(n);
          tables_.Q(h, s, a) = optimistic_q(w_[i], bonus_[i], remaining, risk).q;
        }
        tables_.V(h, s) = tables_.Q(h, s, argmax_lowest(tables_.Q_row(h, s)));
      }
    }
  }

  int act(int h, int s) const { return argmax_lowest(tables_.Q_row(h, s)); }

  // The reward is stored for the backup; rewards are deterministic per (h,s,a).
  void observe(int h, int s, int a, double reward, int s_next) {
    const std::size_t i = idx(h, s, a);
    ++counts_[i];
    ++transitions_[i * S_ + s_next];
    rewards_[i] = reward;
  }

  Policy greedy_policy() const {
    Policy pi(H_, S_);
    for (int h = 0; h < H_; ++h) {
      for (int s = 0; s < S_; ++s) pi.at(h, s) = act(h, s);
    }
    return pi;
  }

  const ValueTables& tables() const { return tables_; }
  long long count(int h, int s, int a) const { return counts_[idx(h, s, a)]; }
  long long transition_count(int h, int s, int a, int s_next) const {
    return transitions_[idx(h, s, a) * S_ + s_next];
  }
  // Exponentiated sample mean and bonus from the latest plan() for a visited pair.
  double intermediate(int h, int s, int a) const { return w_[idx(h, s, a)]; }
  double last_bonus(int h, int s, int a) const { return bonus_[idx(h, s, a)]; }

 private:
  std::size_t idx(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
  }

  void reset_tables() {
    for (int h = 0; h < H_; ++h) {
      for (int s = 0; s < S_; ++s) {
        tables_.V(h, s) = H_ - h;
        for (int a = 0; a < A_; ++a) tables_.Q(h, s, a) = H_ - h;
      }
    }
  }

  int S_;
  int A_;
  int H_;
  RsviConfig config_;
  double log_term_ = 0.0;
  double scale_ = 0.0;
  std::vector<long long> counts_;
  std::vector<long long> transitions_;
  std::vector<double> rewards_;
  std::vector<double> w_;
  std::vector<double> bonus_;
  ValueTables tables_;
};

}  // namespace rsrl
