#pragma once

// Shared pieces of the risk-sensitive UCB update used by both learners.

#include <algorithm>
#include <cmath>

#include "rsrl/errors.hpp"
#include "rsrl/mdp.hpp"

namespace rsrl {

// Confidence scale |e^{beta H} - 1| of the bonus. In neutral mode this is
// replaced by its first-order term |beta| H divided by |beta|, i.e. H, since the
// neutral estimates live in the value domain instead of the exponentiated one.
inline double bonus_scale(const RiskParam& risk, int horizon) {
  if (risk.neutral()) return static_cast<double>(horizon);
  return std::abs(std::expm1(risk.beta() * horizon));
}

struct ThresholdedQ {
  double q;
  bool clamped;  // the cap e^{beta(H-h)} (or H-h in neutral mode) was selected
};

// Maps an exponentiated estimate w and its (already scaled) bonus to Q.
//   beta > 0: (1/beta) log min{e^{beta m}, w + bonus}
//   beta < 0: (1/beta) log max{e^{beta m}, w - bonus}
//   neutral:  min{m, w + bonus} with w in the value domain
// where m is the number of remaining steps. The result lies in [0, m].
inline ThresholdedQ optimistic_q(double w, double bonus, int remaining,
                                 const RiskParam& risk) {
  const double cap_value = static_cast<double>(remaining);
  if (!std::isfinite(w) || !std::isfinite(bonus)) {
    throw NumericOverflow("non-finite exponentiated estimate");
  }
  if (risk.neutral()) {
    const double pre = w + bonus;
    if (pre >= cap_value) return {cap_value, true};
    return {std::max(0.0, pre), false};
  }
  const double beta = risk.beta();
  const double cap = std::exp(beta * cap_value);
  if (beta > 0.0) {
    const double pre = w + bonus;
    if (pre >= cap) return {cap_value, true};
    return {std::clamp(std::log(pre) / beta, 0.0, cap_value), false};
  }
  const double pre = w - bonus;
  if (pre <= cap) return {cap_value, true};
  return {std::clamp(std::log(pre) / beta, 0.0, cap_value), false};
}

// e^{beta x}, or x itself in neutral mode.
inline double to_exp_domain(double x, const RiskParam& risk) {
  return risk.neutral() ? x : std::exp(risk.beta() * x);
}

}  // namespace rsrl
