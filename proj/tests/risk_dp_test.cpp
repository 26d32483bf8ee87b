#include "rsrl/risk_dp.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "test_util.hpp"

namespace rsrl {
namespace {

using testing::kLseBetaMinusOne;
using testing::kLseBetaPlusOne;

const std::vector<double> kHalf{0.5, 0.5};
const std::vector<double> kZeroOne{0.0, 1.0};

TEST(LseBeta, PointMassReturnsThatValue) {
  const std::vector<double> w{0.0, 1.0, 0.0};
  const std::vector<double> v{0.3, 0.7, 0.1};
  for (double beta : {-5.0, -1.0, 1e-9, 0.0, 2.0, 40.0}) {
    EXPECT_DOUBLE_EQ(lse_beta(w, v, RiskParam(beta)), 0.7) << beta;
  }
}

TEST(LseBeta, ClosedFormAtBetaOne) {
  EXPECT_NEAR(lse_beta(kHalf, kZeroOne, RiskParam(1.0)), kLseBetaPlusOne, 1e-15);
  EXPECT_NEAR(lse_beta(kHalf, kZeroOne, RiskParam(-1.0)), kLseBetaMinusOne, 1e-15);
}

TEST(LseBeta, NearNeutralMatchesMean) {
  EXPECT_NEAR(lse_beta(kHalf, kZeroOne, RiskParam(1e-9)), 0.5, 1e-6);
  EXPECT_NEAR(lse_beta(kHalf, kZeroOne, RiskParam(-1e-9)), 0.5, 1e-6);
  EXPECT_DOUBLE_EQ(lse_beta(kHalf, kZeroOne, RiskParam(0.0)), 0.5);
  // Second-order expansion mean + beta Var / 2 at beta = 1e-9.
  EXPECT_NEAR(lse_beta(kHalf, kZeroOne, RiskParam(1e-9)), 0.5 + 1e-9 * 0.125, 1e-15);
}

TEST(LseBeta, LargeExponentsStayFinite) {
  const std::vector<double> v{0.0, 10.0};
  EXPECT_NEAR(lse_beta(kHalf, v, RiskParam(29.0)), 10.0 - std::log(2.0) / 29.0, 1e-12);
  EXPECT_NEAR(lse_beta(kHalf, v, RiskParam(-29.0)), std::log(2.0) / 29.0, 1e-12);
}

TEST(LseBetaProperty, BoundsMonotonicityAndLipschitz) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cap = 4.0;  // f, f' in [0, cap]
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 6;
    std::vector<double> w(n), f(n), g(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] = unit(rng);
      total += w[i];
    }
    for (double& x : w) x /= total;
    for (int i = 0; i < n; ++i) {
      f[i] = cap * unit(rng);
      g[i] = f[i] * unit(rng);  // g <= f componentwise
    }
    const double beta = (unit(rng) - 0.5) * 6.0;
    const RiskParam risk(beta);
    const double lf = lse_beta(w, f, risk);
    const double lg = lse_beta(w, g, risk);
    EXPECT_GE(lf, *std::min_element(f.begin(), f.end()));
    EXPECT_LE(lf, *std::max_element(f.begin(), f.end()));
    EXPECT_GE(lf, lg - 1e-12);
    double mean_gap = 0.0;
    for (int i = 0; i < n; ++i) mean_gap += w[i] * (f[i] - g[i]);
    EXPECT_LE(lf - lg, std::exp(std::abs(beta) * cap) * mean_gap + 1e-12);
  }
}

TEST(SolveOptimal, ConstantRewardsCancelLogExp) {
  std::mt19937_64 rng(4);
  auto m = testing::sparse_random_mdp(3, 2, 4, rng);
  for (int h = 0; h < 4; ++h) {
    for (int s = 0; s < 3; ++s) {
      for (int a = 0; a < 2; ++a) m.r(h, s, a) = 1.0;
    }
  }
  for (double beta : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    const auto sol = solve_optimal(m, RiskParam(beta));
    for (int h = 0; h <= 4; ++h) {
      for (int s = 0; s < 3; ++s) EXPECT_NEAR(sol.values.V(h, s), 4 - h, 1e-12);
    }
  }
}

TEST(SolveOptimal, PreferenceFlip) {
  const auto m = testing::preference_flip_mdp();
  const auto seeking = solve_optimal(m, RiskParam(1.0));
  EXPECT_NEAR(seeking.values.Q(0, 0, 0), 0.6, 1e-12);
  EXPECT_NEAR(seeking.values.Q(0, 0, 1), kLseBetaPlusOne, 1e-12);
  EXPECT_EQ(seeking.policy(0, 0), 1);

  const auto averse = solve_optimal(m, RiskParam(-1.0));
  EXPECT_NEAR(averse.values.Q(0, 0, 1), kLseBetaMinusOne, 1e-12);
  EXPECT_EQ(averse.policy(0, 0), 0);
}

TEST(SolveOptimal, TiesGoToLowestAction) {
  EpisodicMDP m(1, 3, 1);
  for (int a = 0; a < 3; ++a) {
    m.P(0, 0, a, 0) = 1.0;
    m.r(0, 0, a) = a == 0 ? 0.2 : 0.5;
  }
  EXPECT_EQ(solve_optimal(m, RiskParam(0.7)).policy(0, 0), 1);
}

TEST(SolveOptimal, NearNeutralMatchesExpectedRewardDp) {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::sparse_random_mdp(5, 3, 6, rng);
    const auto oracle = testing::expected_reward_dp(m);
    for (double beta : {1e-9, -1e-9, 0.0}) {
      const auto sol = solve_optimal(m, RiskParam(beta));
      for (int h = 0; h < 6; ++h) {
        for (int s = 0; s < 5; ++s) EXPECT_NEAR(sol.values.V(h, s), oracle[h][s], 1e-6);
      }
    }
  }
}

TEST(SolveOptimal, TableInvariants) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const int H = 1 + trial % 6;
    const auto m = testing::sparse_random_mdp(4, 3, H, rng);
    const auto sol = solve_optimal(m, RiskParam(trial % 2 ? 1.5 : -1.5));
    for (int s = 0; s < 4; ++s) {
      EXPECT_EQ(sol.values.V(H, s), 0.0);
      for (int a = 0; a < 3; ++a) EXPECT_EQ(sol.values.Q(H, s, a), 0.0);
    }
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < 4; ++s) {
        double best = -1.0;
        for (int a = 0; a < 3; ++a) {
          const double q = sol.values.Q(h, s, a);
          EXPECT_GE(q, 0.0);
          EXPECT_LE(q, H - h + 1e-12);
          best = std::max(best, q);
        }
        EXPECT_EQ(sol.values.V(h, s), best);
      }
    }
  }
}

TEST(SolveOptimalProperty, DominatesRandomPolicies) {
  std::mt19937_64 rng(33);
  for (int inst = 0; inst < 10; ++inst) {
    const auto m = testing::sparse_random_mdp(4, 3, 4, rng);
    for (double beta : {-2.0, 0.5}) {
      const RiskParam risk(beta);
      const auto sol = solve_optimal(m, risk);
      for (int i = 0; i < 100; ++i) {
        const auto v = evaluate_policy(m, testing::random_policy_for(m, rng), risk);
        for (int h = 0; h < 4; ++h) {
          for (int s = 0; s < 4; ++s) EXPECT_GE(sol.values.V(h, s), v.V(h, s) - 1e-12);
        }
      }
    }
  }
}

TEST(EvaluatePolicy, GreedyPolicyReproducesOptimalValues) {
  std::mt19937_64 rng(5);
  const auto m = testing::sparse_random_mdp(4, 3, 5, rng);
  for (double beta : {-1.0, 0.0, 2.0}) {
    const auto sol = solve_optimal(m, RiskParam(beta));
    const auto v = evaluate_policy(m, sol.policy, RiskParam(beta));
    for (int h = 0; h <= 5; ++h) {
      for (int s = 0; s < 4; ++s) EXPECT_NEAR(v.V(h, s), sol.values.V(h, s), 1e-12);
    }
  }
}

TEST(EvaluatePolicy, ForcedSafeActionOnFlipInstance) {
  const auto m = testing::preference_flip_mdp();
  Policy safe(2, 3, 0);
  EXPECT_NEAR(evaluate_policy(m, safe, RiskParam(1.0)).V(0, 0), 0.6, 1e-15);
}

TEST(EvaluatePolicy, ZeroRewardsGiveZeroValues) {
  std::mt19937_64 rng(6);
  auto m = testing::sparse_random_mdp(3, 2, 3, rng);
  for (int h = 0; h < 3; ++h) {
    for (int s = 0; s < 3; ++s) {
      for (int a = 0; a < 2; ++a) m.r(h, s, a) = 0.0;
    }
  }
  const auto v = evaluate_policy(m, testing::random_policy_for(m, rng), RiskParam(-0.7));
  for (int h = 0; h <= 3; ++h) {
    for (int s = 0; s < 3; ++s) EXPECT_EQ(v.V(h, s), 0.0);
  }
}

TEST(BruteForce, DeterministicMdpIsPathSum) {
  const auto m = testing::deterministic_mdp(3, 2, 4, 2);
  Policy pi(4, 3, 1);
  double sum = 0.0;
  int s = 1;
  for (int h = 0; h < 4; ++h) {
    sum += m.r(h, s, 1);
    s = (s + 1) % 3;
  }
  EXPECT_NEAR(brute_force_value(m, pi, RiskParam(-3.0), 1, 0), sum, 1e-12);
  EXPECT_NEAR(brute_force_value(m, pi, RiskParam(0.0), 1, 0), sum, 1e-12);
}

TEST(BruteForce, AgreesWithEvaluatePolicy) {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 50; ++trial) {
    const int S = 1 + trial % 4;
    const int A = 1 + trial % 3;
    const int H = 1 + (trial / 3) % 4;
    const auto m = testing::sparse_random_mdp(S, A, H, rng);
    for (double beta : {-2.0, -0.5, 0.5, 2.0}) {
      const RiskParam risk(beta);
      const auto pi = testing::random_policy_for(m, rng);
      const auto v = evaluate_policy(m, pi, risk);
      for (int h = 0; h < H; ++h) {
        for (int s = 0; s < S; ++s) {
          EXPECT_NEAR(v.V(h, s), brute_force_value(m, pi, risk, s, h), 1e-10);
        }
      }
    }
  }
}

// Step 0 branches to absorbing states paying 0, 1/2 and 1 per step for the
// remaining two steps, so the total reward is 0, 1 or 2 w.p. 0.2, 0.5, 0.3.
EpisodicMDP three_outcome_mdp(double p0, double p1, double p2) {
  EpisodicMDP m(4, 1, 3);
  for (int h = 0; h < 3; ++h) {
    for (int s = 0; s < 4; ++s) m.P(h, s, 0, s) = 1.0;
    m.r(h, 2, 0) = h > 0 ? 0.5 : 0.0;
    m.r(h, 3, 0) = h > 0 ? 1.0 : 0.0;
  }
  m.P(0, 0, 0, 0) = 0.0;
  m.P(0, 0, 0, 1) = p0;
  m.P(0, 0, 0, 2) = p1;
  m.P(0, 0, 0, 3) = p2;
  return m;
}

TEST(BruteForce, SignFlipOnSymmetricReturnGivesTwiceTheMean) {
  const auto m = three_outcome_mdp(0.25, 0.5, 0.25);
  const Policy pi(3, 4);
  for (double beta : {0.3, 1.0, 2.5}) {
    const double sum = brute_force_value(m, pi, RiskParam(beta), 0, 0) +
                       brute_force_value(m, pi, RiskParam(-beta), 0, 0);
    EXPECT_NEAR(sum, 2.0, 1e-12);
  }
}

TEST(BruteForce, SignFlipGoldenValue) {
  // High-precision reference: log(0.2 + 0.5e^b + 0.3e^{2b})/b summed over b = +-1.
  const auto m = three_outcome_mdp(0.2, 0.5, 0.3);
  const Policy pi(3, 4);
  const double sum = brute_force_value(m, pi, RiskParam(1.0), 0, 0) +
                     brute_force_value(m, pi, RiskParam(-1.0), 0, 0);
  EXPECT_NEAR(sum, 2.18537590325072968381, 1e-12);
  const double half = brute_force_value(m, pi, RiskParam(0.5), 0, 0) +
                      brute_force_value(m, pi, RiskParam(-0.5), 0, 0);
  EXPECT_NEAR(half, 2.19609186506761927483, 1e-12);
}

TEST(BruteForce, PropagatesEnumerationGuard) {
  EpisodicMDP m(11, 1, 6);
  for (int h = 0; h < 6; ++h) {
    for (int s = 0; s < 11; ++s) m.P(h, s, 0, s) = 1.0;
  }
  EXPECT_THROW(brute_force_value(m, Policy(6, 11), RiskParam(1.0), 0, 0), InstanceTooLarge);
}

TEST(LambdaFactor, LimitAndValues) {
  EXPECT_EQ(lambda_factor(0.0), 3.0);
  EXPECT_NEAR(lambda_factor(1e-12), 3.0, 1e-9);
  EXPECT_NEAR(lambda_factor(1.0), 19.085536923187667741, 1e-12);
  EXPECT_THROW(lambda_factor(-0.1), DomainError);
}

TEST(LambdaFactor, StrictlyIncreasingOnGrid) {
  double prev = lambda_factor(0.0);
  for (int i = 1; i <= 50; ++i) {
    const double cur = lambda_factor(0.1 * i);
    EXPECT_GT(cur, prev) << 0.1 * i;
    prev = cur;
  }
}

}  // namespace
}  // namespace rsrl
