#pragma once

// The economic layer: what information is worth given how many already
// hold it, what a better channel costs, and the survival-threshold rule
// for choosing between lotteries.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "infocycle/channels.hpp"
#include "infocycle/entropy.hpp"

namespace infocycle {

/// Fraction of investors (head count or wealth) already informed, in (0, 1].
class InformedFraction {
 public:
  explicit InformedFraction(double p) : p_(p) {
    if (!(p > 0.0) || p > 1.0) {
      throw DomainError("informed fraction must lie in (0, 1], got " + std::to_string(p));
    }
  }
  double value() const noexcept { return p_; }

 private:
  double p_;
};

/// Quadratic information cost: alpha * R^2 wealth units for R nats received.
class CostModel {
 public:
  explicit CostModel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw DomainError("cost model alpha must be finite and > 0");
    }
  }
  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
};

struct Outcome {
  double value;  // subsistence-days; positive is a gain
  double prob;
};

/// Outcome/probability pairs in subsistence units. `baseline` is the
/// holder's reserve before the lottery resolves: 0 means the outcome is
/// added to a normal reserve, -threshold means the holder is already at the
/// starvation line and needs a positive outcome to survive.
class Lottery {
 public:
  explicit Lottery(std::vector<Outcome> outcomes, double baseline = 0.0)
      : outcomes_(std::move(outcomes)), baseline_(baseline) {
    std::vector<double> probs;
    probs.reserve(outcomes_.size());
    for (const auto& o : outcomes_) {
      if (!std::isfinite(o.value)) throw ValidationError("lottery: outcome is not finite");
      probs.push_back(o.prob);
    }
    Distribution checked(std::move(probs));  // throws on bad probabilities
    for (std::size_t i = 0; i < outcomes_.size(); ++i) outcomes_[i].prob = checked[i];
    if (!std::isfinite(baseline_)) throw ValidationError("lottery: baseline is not finite");
  }

  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  double baseline() const noexcept { return baseline_; }

  double expected_value() const noexcept {
    double ev = 0.0;
    for (const auto& o : outcomes_) ev += o.prob * o.value;
    return ev;
  }

  /// Probability that the holder ends strictly above -death_threshold.
  double survival_probability(double death_threshold) const noexcept {
    double s = 0.0;
    for (const auto& o : outcomes_)
      if (baseline_ + o.value > -death_threshold) s += o.prob;
    return s;
  }

  Lottery scaled(double factor) const {
    std::vector<Outcome> out = outcomes_;
    for (auto& o : out) o.value *= factor;
    return Lottery(std::move(out), baseline_ * factor);
  }

 private:
  std::vector<Outcome> outcomes_;
  double baseline_;
};

/// Value of information already known to a fraction P: -log_base(P).
inline double info_value(InformedFraction f, LogBase base = LogBase::natural()) {
  return surprisal(f.value(), base);
}

inline double info_cost(double target_r, const CostModel& cm) {
  if (!(target_r >= 0.0) || !std::isfinite(target_r)) {
    throw DomainError("info_cost: received information must be finite and >= 0");
  }
  return cm.alpha() * target_r * target_r;
}

/// Largest fidelity whose uniform-prior BSC costs no more than
/// wealth * budget_share. Solved by bisection on [0.5, 1].
///
/// `event_scale` only has to be positive; the spend rule does not depend on it.
inline Fidelity choose_fidelity(double wealth, double budget_share, double event_scale,
                                const CostModel& cm) {
  if (!(wealth > 0.0)) throw DomainError("choose_fidelity: wealth must be > 0");
  if (!(budget_share >= 0.0 && budget_share <= 1.0)) {
    throw DomainError("choose_fidelity: budget_share must lie in [0, 1]");
  }
  if (!(event_scale > 0.0)) throw DomainError("choose_fidelity: event_scale must be > 0");

  const double budget = wealth * budget_share;
  if (budget <= 0.0) return Fidelity::uninformed();
  const auto cost_at = [&](double q) {
    return info_cost(bsc_received_information(Fidelity(q)), cm);
  };
  if (cost_at(1.0) <= budget) return Fidelity::perfect();

  double lo = 0.5;  // always affordable: R(0.5) = 0
  double hi = 1.0;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (cost_at(mid) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Fidelity(lo);
}

/// Index of the lottery with the highest survival probability; ties go to
/// the higher expected value, then to the lowest index.
inline std::size_t survival_choice(const std::vector<Lottery>& options, double death_threshold) {
  if (options.empty()) throw ValidationError("survival_choice: no options given");
  if (!std::isfinite(death_threshold)) {
    throw ValidationError("survival_choice: death threshold must be finite");
  }
  constexpr double eps = 1e-12;
  std::size_t best = 0;
  double best_s = options[0].survival_probability(death_threshold);
  double best_ev = options[0].expected_value();
  for (std::size_t i = 1; i < options.size(); ++i) {
    const double s = options[i].survival_probability(death_threshold);
    const double ev = options[i].expected_value();
    if (s > best_s + eps || (std::abs(s - best_s) <= eps && ev > best_ev + eps)) {
      best = i;
      best_s = s;
      best_ev = ev;
    }
  }
  return best;
}

}  // namespace infocycle
