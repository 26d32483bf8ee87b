#pragma once

// Exact dynamic programming for the exponential-utility objective
//
//   V_h^pi(s) = (1/beta) log E[ exp(beta * sum_{j >= h} r_j) ],
//
// whose Bellman recursion replaces the expectation over next states with the
// log-expected-exponential operator lse_beta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "rsrl/mdp.hpp"

namespace rsrl {

// V and Q per step, sized H + 1 with step H identically zero.
class ValueTables {
 public:
  ValueTables() = default;
  ValueTables(int horizon, int num_states, int num_actions)
      : H_(horizon), S_(num_states), A_(num_actions),
        V_(static_cast<std::size_t>(horizon + 1) * num_states, 0.0),
        Q_(static_cast<std::size_t>(horizon + 1) * num_states * num_actions, 0.0) {}

  int horizon() const { return H_; }
  int num_states() const { return S_; }
  int num_actions() const { return A_; }

  double& V(int h, int s) { return V_[static_cast<std::size_t>(h) * S_ + s]; }
  double V(int h, int s) const { return V_[static_cast<std::size_t>(h) * S_ + s]; }
  double& Q(int h, int s, int a) { return Q_[qidx(h, s, a)]; }
  double Q(int h, int s, int a) const { return Q_[qidx(h, s, a)]; }

  std::span<const double> V_step(int h) const {
    return {V_.data() + static_cast<std::size_t>(h) * S_, static_cast<std::size_t>(S_)};
  }
  std::span<const double> Q_row(int h, int s) const {
    return {Q_.data() + qidx(h, s, 0), static_cast<std::size_t>(A_)};
  }

 private:
  std::size_t qidx(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * S_ + s) * A_ + a;
  }

  int H_ = 0;
  int S_ = 0;
  int A_ = 0;
  std::vector<double> V_;
  std::vector<double> Q_;
};

// First maximizer; ties go to the lowest index.
inline int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

// (1/beta) log sum_i w_i exp(beta v_i), or sum_i w_i v_i in neutral mode.
//
// The exponent is shifted by max_i beta*v_i over the support and evaluated as
// log1p(sum w_i expm1(x_i) / sum w_i), which stays accurate when beta*v is tiny.
// The result is clipped to [min v, max v] over the support.
inline double lse_beta(std::span<const double> weights, std::span<const double> values,
                       const RiskParam& risk) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double total_weight = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
    total_weight += weights[i];
  }
  if (total_weight <= 0.0) throw DomainError("lse_beta: weights have no mass");

  double result = 0.0;
  if (risk.neutral()) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] > 0.0) result += weights[i] * values[i];
    }
    result /= total_weight;
  } else {
    const double beta = risk.beta();
    const double shift_value = beta > 0.0 ? hi : lo;  // argmax of beta*v
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] > 0.0) acc += weights[i] * std::expm1(beta * (values[i] - shift_value));
    }
    result = shift_value + std::log1p(acc / total_weight) / beta;
  }
  return std::clamp(result, lo, hi);
}

struct OptimalSolution {
  ValueTables values;
  Policy policy;
};

// Backward recursion for Q*_h(s,a) = r_h(s,a) + lse_beta(P_h(.|s,a), V*_{h+1}),
// V*_h = max_a Q*_h. Greedy policy breaks ties toward the lowest action.
inline OptimalSolution solve_optimal(const EpisodicMDP& mdp, const RiskParam& risk) {
  risk.check_pairing(mdp.horizon());
  const int H = mdp.horizon();
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  OptimalSolution out{ValueTables(H, S, A), Policy(H, S)};
  for (int h = H - 1; h >= 0; --h) {
    const auto next = out.values.V_step(h + 1);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        out.values.Q(h, s, a) = mdp.r(h, s, a) + lse_beta(mdp.row(h, s, a), next, risk);
      }
      const int best = argmax_lowest(out.values.Q_row(h, s));
      out.policy.at(h, s) = best;
      out.values.V(h, s) = out.values.Q(h, s, best);
    }
  }
  return out;
}

// Same recursion along a fixed policy: V_h(s) = Q_h(s, pi_h(s)).
inline ValueTables evaluate_policy(const EpisodicMDP& mdp, const Policy& policy,
                                   const RiskParam& risk) {
  risk.check_pairing(mdp.horizon());
  const int H = mdp.horizon();
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  ValueTables out(H, S, A);
  for (int h = H - 1; h >= 0; --h) {
    const auto next = out.V_step(h + 1);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        out.Q(h, s, a) = mdp.r(h, s, a) + lse_beta(mdp.row(h, s, a), next, risk);
      }
      out.V(h, s) = out.Q(h, s, policy(h, s));
    }
  }
  return out;
}

// Value of `policy` from (s, h) computed directly from the distribution of the
// total remaining reward, with no recursion. Independent check on
// evaluate_policy for tiny instances.
inline double brute_force_value(const EpisodicMDP& mdp, const Policy& policy,
                                const RiskParam& risk, int s, int h) {
  const auto paths = enumerate_trajectories(mdp, policy, s, h);
  if (risk.neutral()) {
    long double mean = 0.0L;
    for (const auto& p : paths) mean += static_cast<long double>(p.probability) * p.total_reward;
    return static_cast<double>(mean);
  }
  const long double beta = risk.beta();
  long double top = -std::numeric_limits<long double>::infinity();
  for (const auto& p : paths) top = std::max(top, beta * p.total_reward);
  long double sum = 0.0L;
  for (const auto& p : paths) {
    sum += static_cast<long double>(p.probability) * std::exp(beta * p.total_reward - top);
  }
  return static_cast<double>((top + std::log(sum)) / beta);
}

// (e^{3u} - 1) / u with the limit 3 at u = 0.
inline double lambda_factor(double u) {
  if (u < 0.0) throw DomainError("lambda_factor: u must be nonnegative");
  if (u == 0.0) return 3.0;
  return std::expm1(3.0 * u) / u;
}

}  // namespace rsrl
