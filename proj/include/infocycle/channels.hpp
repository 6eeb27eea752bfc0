#pragma once

// Discrete memoryless channels and the gradual fall of a receiver's
// equivocation over time.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "infocycle/entropy.hpp"

namespace infocycle {

/// Probability that a binary symmetric receiver decodes the true state.
/// Restricted to [0.5, 1]; a worse-than-chance receiver is a relabeled
/// better-than-chance one.
class Fidelity {
 public:
  constexpr Fidelity() = default;

  explicit Fidelity(double q) : q_(q) {
    if (!(q >= 0.5 && q <= 1.0)) {
      throw DomainError("fidelity must lie in [0.5, 1], got " + std::to_string(q));
    }
  }

  static constexpr Fidelity uninformed() noexcept { return Fidelity{}; }
  static Fidelity perfect() { return Fidelity(1.0); }

  constexpr double value() const noexcept { return q_; }
  friend constexpr auto operator<=>(const Fidelity&, const Fidelity&) = default;

 private:
  double q_ = 0.5;
};

/// Prior over source states plus a row-stochastic receive matrix.
class DiscreteChannel {
 public:
  DiscreteChannel(Distribution prior, std::vector<std::vector<double>> cond)
      : prior_(std::move(prior)), cond_(std::move(cond)) {
    if (cond_.size() != prior_.size()) {
      throw ValidationError("channel: receive matrix needs one row per source state");
    }
    const std::size_t cols = cond_.empty() ? 0 : cond_.front().size();
    if (cols == 0) throw ValidationError("channel: receive matrix has no columns");
    for (std::size_t i = 0; i < cond_.size(); ++i) {
      if (cond_[i].size() != cols) throw ValidationError("channel: ragged receive matrix");
      double sum = 0.0;
      for (double c : cond_[i]) {
        if (!std::isfinite(c) || c < 0.0) {
          throw ValidationError("channel: row " + std::to_string(i) +
                                " has a negative or non-finite entry");
        }
        sum += c;
      }
      if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        throw ValidationError("channel: row " + std::to_string(i) + " sums to " +
                              std::to_string(sum) + ", not 1");
      }
    }
  }

  const Distribution& prior() const noexcept { return prior_; }
  const std::vector<std::vector<double>>& cond() const noexcept { return cond_; }
  std::size_t inputs() const noexcept { return cond_.size(); }
  std::size_t outputs() const noexcept { return cond_.front().size(); }

 private:
  Distribution prior_;
  std::vector<std::vector<double>> cond_;
};

/// joint[i][j] = prior[i] * cond[i][j].
inline JointDistribution joint_from_channel(const DiscreteChannel& ch) {
  std::vector<double> cells;
  cells.reserve(ch.inputs() * ch.outputs());
  for (std::size_t i = 0; i < ch.inputs(); ++i)
    for (std::size_t j = 0; j < ch.outputs(); ++j)
      cells.push_back(ch.prior()[i] * ch.cond()[i][j]);
  return JointDistribution(ch.inputs(), ch.outputs(), std::move(cells));
}

/// Binary symmetric channel with cond = [[q, 1-q], [1-q, q]].
inline DiscreteChannel bsc(Fidelity fidelity, const Distribution& prior) {
  if (prior.size() != 2) {
    throw ValidationError("bsc: prior must have exactly 2 states, got " +
                          std::to_string(prior.size()));
  }
  const double q = fidelity.value();
  return DiscreteChannel(prior, {{q, 1.0 - q}, {1.0 - q, q}});
}

inline DiscreteChannel bsc(Fidelity fidelity) { return bsc(fidelity, Distribution::uniform(2)); }

/// Received information of the uniform-prior BSC, in the given base.
inline double bsc_received_information(Fidelity fidelity, LogBase base = LogBase::natural()) {
  return received_information(joint_from_channel(bsc(fidelity)), base);
}

/// Exponential saturation of fidelity toward 1:
/// q(tau) = 1 - (1 - q0) exp(-rate * tau).
struct LearningRule {
  Fidelity initial;
  double rate = 0.0;  // per period

  LearningRule(Fidelity q0, double lambda) : initial(q0), rate(lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw DomainError("learning rate must be finite and >= 0");
    }
  }
};

inline Fidelity learning_update(const LearningRule& rule, long tau) {
  if (tau < 0) throw DomainError("learning_update: tau must be >= 0");
  const double q0 = rule.initial.value();
  const double q = 1.0 - (1.0 - q0) * std::exp(-rule.rate * static_cast<double>(tau));
  // Guard against rounding pushing q a hair outside [q0, 1].
  return Fidelity(std::min(1.0, std::max(q0, q)));
}

}  // namespace infocycle
