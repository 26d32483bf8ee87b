#pragma once

// Benchmark and hard-instance generators.
//
// The lower-bound instance embeds a two-arm scaled-Bernoulli bandit in a
// three-state MDP: from s0 each action moves to a rewarding absorbing state s1
// ("success") or a zero-reward absorbing state s2. The success payoff is
// exactly H_inner, matching the bandit arm X = H_inner.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "rsrl/errors.hpp"
#include "rsrl/mdp.hpp"

namespace rsrl {

struct LowerBoundSpec {
  int H_inner = 6;
  long long K = 10000;
  double beta = 0.1;
  double C = 1.0;
};

struct GapResolution {
  double p1;
  double p2;
  double delta;  // p1 - p2; positive for beta > 0, negative for beta < 0
  int iterations;
};

// Residual of the gap equation Delta = sign(beta) C sqrt(log K p1 (1-p1) / K).
inline double gap_residual(const LowerBoundSpec& spec, const GapResolution& g) {
  const double sign = spec.beta > 0.0 ? 1.0 : -1.0;
  const double K = static_cast<double>(spec.K);
  return g.delta - sign * spec.C * std::sqrt(std::log(K) * g.p1 * (1.0 - g.p1) / K);
}

// Throws InfeasibleConstruction describing the first violated condition.
inline void check_construction(const LowerBoundSpec& spec, const GapResolution& g) {
  const double edge = std::exp(-std::abs(spec.beta) * spec.H_inner);
  auto fail = [](const std::string& what) { throw InfeasibleConstruction(what); };
  if (spec.beta > 0.0) {
    if (!(g.delta > 0.0)) fail("beta > 0 requires Delta > 0");
    if (g.delta > edge) fail("Delta exceeds e^{-beta H}; increase K or decrease H");
    if (g.p1 > 0.75) fail("p1 = p2 + Delta exceeds 3/4; increase K or H");
  } else {
    if (!(g.delta < 0.0)) fail("beta < 0 requires Delta < 0");
    if (g.p1 < 0.5 * edge) fail("p1 below e^{beta H}/2; increase K");
    if (1.0 - g.p1 < 0.25) fail("1 - p1 below 1/4; increase H");
  }
}

inline GapResolution resolve_gap(int H_inner, long long K, double beta, double C) {
  if (K < 3) throw InfeasibleConstruction("lower-bound construction needs K >= 3");
  if (H_inner < 1) throw InfeasibleConstruction("lower-bound construction needs H >= 1");
  if (!(C > 0.0)) throw InfeasibleConstruction("gap constant C must be positive");
  if (beta == 0.0 || !std::isfinite(beta)) {
    throw InfeasibleConstruction("lower-bound construction needs a nonzero beta");
  }
  const LowerBoundSpec spec{H_inner, K, beta, C};
  const double sign = beta > 0.0 ? 1.0 : -1.0;
  const double p2 = std::exp(-std::abs(beta) * H_inner);
  const double Kd = static_cast<double>(K);
  const double scale = C * std::sqrt(std::log(Kd) / Kd);

  double p1 = p2;
  for (int it = 1; it <= 100; ++it) {
    const double clamped = std::clamp(p1, 0.0, 1.0);
    const double next = p2 + sign * scale * std::sqrt(clamped * (1.0 - clamped));
    const bool done = std::abs(next - p1) <= 1e-12;
    p1 = next;
    if (done) {
      GapResolution g{p1, p2, p1 - p2, it};
      check_construction(spec, g);
      return g;
    }
  }
  throw NoConvergence("gap fixed-point iteration did not converge in 100 steps");
}

// Probability that the given arm (0 or 1) reaches the rewarding state. For
// beta < 0 the arm pays H w.p. 1 - p_i, so success is 1 - p_i.
inline double success_probability(const GapResolution& g, double beta, int arm) {
  const double p = arm == 0 ? g.p1 : g.p2;
  return beta > 0.0 ? p : 1.0 - p;
}

// Horizon H_inner + 2. Step 0 is the arm pull at s0; the next H_inner steps
// pay 1 in s1; the final step pays nothing.
inline EpisodicMDP lower_bound_bandit(const LowerBoundSpec& spec) {
  const GapResolution g = resolve_gap(spec.H_inner, spec.K, spec.beta, spec.C);
  const int H = spec.H_inner + 2;
  EpisodicMDP mdp(3, 2, H);
  for (int h = 0; h < H; ++h) {
    for (int a = 0; a < 2; ++a) {
      if (h == 0) {
        const double q = success_probability(g, spec.beta, a);
        mdp.P(h, 0, a, 1) = q;
        mdp.P(h, 0, a, 2) = 1.0 - q;
      } else {
        mdp.P(h, 0, a, 0) = 1.0;  // unreachable after step 0
      }
      mdp.P(h, 1, a, 1) = 1.0;
      mdp.P(h, 2, a, 2) = 1.0;
      mdp.r(h, 1, a) = (h >= 1 && h <= spec.H_inner) ? 1.0 : 0.0;
    }
  }
  mdp.set_initial_state_rule(InitialStateRule::fixed(0));
  validate(mdp);
  return mdp;
}

// Per-episode value gap between the two arms of the lower-bound instance:
// (1/beta) log[(q1 e^{beta H} + 1 - q1) / (q2 e^{beta H} + 1 - q2)] with q the
// success probabilities.
inline double lower_bound_episode_gap(const LowerBoundSpec& spec, const GapResolution& g) {
  const double q1 = success_probability(g, spec.beta, 0);
  const double q2 = success_probability(g, spec.beta, 1);
  const double e = std::exp(spec.beta * spec.H_inner);
  return std::log((q1 * e + 1.0 - q1) / (q2 * e + 1.0 - q2)) / spec.beta;
}

struct BernoulliKl {
  double kl;     // D_KL(Ber(p') || Ber(p))
  double bound;  // (p - p')^2 / (p (1 - p))
};

inline BernoulliKl kl_bernoulli_bound(double p, double p_prime) {
  if (!(p > 0.0 && p < 1.0 && p_prime > 0.0 && p_prime < 1.0)) {
    throw DomainError("kl_bernoulli_bound: probabilities must lie in (0, 1)");
  }
  if (!(p > p_prime)) throw DomainError("kl_bernoulli_bound: requires p > p'");
  const double kl = p_prime * std::log(p_prime / p) +
                    (1.0 - p_prime) * std::log((1.0 - p_prime) / (1.0 - p));
  const double d = p - p_prime;
  return {kl, d * d / (p * (1.0 - p))};
}

// Symmetric-Dirichlet kernels (one draw per row) and uniform rewards.
inline EpisodicMDP random_mdp(int S, int A, int H, std::uint64_t seed,
                              double concentration = 1.0) {
  if (!(concentration > 0.0)) throw ValidationError("concentration must be positive");
  EpisodicMDP mdp(S, A, H);
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        auto row = mdp.row(h, s, a);
        double total = 0.0;
        for (double& p : row) {
          p = gamma(rng);
          total += p;
        }
        if (total > 0.0) {
          for (double& p : row) p /= total;
        } else {
          row[static_cast<std::size_t>(s)] = 1.0;  // every gamma draw underflowed
        }
        mdp.r(h, s, a) = unit(rng);
      }
    }
  }
  validate(mdp);
  return mdp;
}

// A chain of S states starting at 0. Action 1 moves right w.p. 1 - slip (else
// stays); action 0 moves left deterministically. Only the right end pays 1,
// the left end pays `small` under action 0.
inline EpisodicMDP chain_mdp(int S, int H, double slip = 0.1, double small = 0.05) {
  if (S < 2) throw ValidationError("chain needs at least 2 states");
  if (!(slip >= 0.0 && slip < 1.0)) throw ValidationError("slip must lie in [0, 1)");
  if (!(small >= 0.0 && small <= 1.0)) throw ValidationError("small reward must lie in [0, 1]");
  EpisodicMDP mdp(S, 2, H);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      mdp.P(h, s, 0, std::max(0, s - 1)) = 1.0;
      const int right = std::min(S - 1, s + 1);
      mdp.P(h, s, 1, right) += 1.0 - slip;
      mdp.P(h, s, 1, s) += slip;
      mdp.r(h, s, 0) = s == 0 ? small : 0.0;
      mdp.r(h, s, 1) = s == S - 1 ? 1.0 : 0.0;
    }
  }
  validate(mdp);
  return mdp;
}

}  // namespace rsrl
