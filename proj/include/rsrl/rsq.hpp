#pragma once

// Risk-sensitive Q-learning: online exponentiated updates of the visited pair
// with learning rate (H+1)/(H+t) and a sign-dependent bonus.

#include <cmath>
#include <cstddef>
#include <vector>

#include "rsrl/mdp.hpp"
#include "rsrl/optimism.hpp"
#include "rsrl/risk_dp.hpp"

namespace rsrl {

inline double learning_rate(long long t, int horizon) {
  if (t < 1) throw DomainError("learning_rate: t must be >= 1");
  return static_cast<double>(horizon + 1) / static_cast<double>(horizon + t);
}

struct AlphaProducts {
  double alpha0;               // prod_{j<=t} (1 - alpha_j)
  std::vector<double> alphas;  // alphas[i-1] = alpha_i prod_{j=i+1..t} (1 - alpha_j)
};

// Weights of the unrolled update after t visits. t = 0 gives alpha0 = 1 and no
// weights.
inline AlphaProducts alpha_products(long long t, int horizon) {
  AlphaProducts out{1.0, {}};
  if (t <= 0) return out;
  out.alphas.resize(static_cast<std::size_t>(t));
  double tail = 1.0;  // prod_{j=i+1..t} (1 - alpha_j)
  for (long long i = t; i >= 1; --i) {
    const double a = learning_rate(i, horizon);
    out.alphas[static_cast<std::size_t>(i - 1)] = a * tail;
    tail *= 1.0 - a;
  }
  out.alpha0 = tail;
  return out;
}

struct RsqConfig {
  long long episodes = 1000;  // K; T = K * H enters the bonus
  double delta = 0.1;
  double c = 0.1;
  RiskParam risk;
};

// Everything the update touched, for tracing and for replay checks.
struct RsqUpdate {
  long long t;
  double alpha;
  double bonus;          // b_t, before scaling by alpha
  double target;         // e^{beta[r + V_{h+1}(s')]} (value domain when neutral)
  double pre_threshold;  // w +/- alpha b
  bool clamped;
  double q;
};

struct RsqStep {
  int action;
  double reward;
  int next_state;
  RsqUpdate update;
};

class RsqAgent {
 public:
  RsqAgent(int num_states, int num_actions, int horizon, RsqConfig config)
      : S_(num_states), A_(num_actions), H_(horizon), config_(config),
        counts_(static_cast<std::size_t>(H_) * S_ * A_, 0), tables_(H_, S_, A_) {
    if (config_.episodes < 1) throw ValidationError("RSQ: K must be >= 1");
    if (!(config_.delta > 0.0 && config_.delta <= 1.0)) {
      throw ValidationError("RSQ: delta must lie in (0, 1]");
    }
    if (!(config_.c > 0.0)) throw ValidationError("RSQ: c must be positive");
    config_.risk.check_pairing(H_);
    const double T = static_cast<double>(config_.episodes) * H_;
    iota_ = std::log(S_ * A_ * T / config_.delta);
    scale_ = config_.c * bonus_scale(config_.risk, H_);
    for (int h = 0; h < H_; ++h) {
      for (int s = 0; s < S_; ++s) {
        tables_.V(h, s) = H_ - h;
        for (int a = 0; a < A_; ++a) tables_.Q(h, s, a) = H_ - h;
      }
    }
  }

  int num_states() const { return S_; }
  int num_actions() const { return A_; }
  int horizon() const { return H_; }
  const RsqConfig& config() const { return config_; }

  // c |e^{beta H} - 1| sqrt(H log(SAT/delta) / t).
  double bonus(long long t) const {
    return scale_ * std::sqrt(H_ * iota_ / static_cast<double>(t));
  }

  int act(int h, int s) const { return argmax_lowest(tables_.Q_row(h, s)); }

  RsqUpdate update(int h, int s, int a, double reward, int s_next) {
    const RiskParam& risk = config_.risk;
    const long long t = ++counts_[idx(h, s, a)];
    const double alpha = learning_rate(t, H_);
    const double b = bonus(t);
    const double target = to_exp_domain(reward + tables_.V(h + 1, s_next), risk);
    const double w =
        (1.0 - alpha) * to_exp_domain(tables_.Q(h, s, a), risk) + alpha * target;
    const bool averse = !risk.neutral() && risk.beta() < 0.0;
    const double pre = averse ? w - alpha * b : w + alpha * b;
    const auto result = optimistic_q(w, alpha * b, H_ - h, risk);
    tables_.Q(h, s, a) = result.q;
    tables_.V(h, s) = tables_.Q(h, s, argmax_lowest(tables_.Q_row(h, s)));
    return {t, alpha, b, target, pre, result.clamped, result.q};
  }

  // Acts greedily at (h, s), samples the transition from `mdp`, and updates.
  template <class Rng>
  RsqStep step(const EpisodicMDP& mdp, int h, int s, Rng& rng) {
    const int a = act(h, s);
    const double reward = mdp.r(h, s, a);
    const int next = sample_next_state(mdp.row(h, s, a), rng);
    return {a, reward, next, update(h, s, a, reward, next)};
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

 private:
  std::size_t idx(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
  }

  int S_;
  int A_;
  int H_;
  RsqConfig config_;
  double iota_ = 0.0;
  double scale_ = 0.0;
  std::vector<long long> counts_;
  ValueTables tables_;
};

}  // namespace rsrl
