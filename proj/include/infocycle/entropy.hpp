#pragma once

// Discrete information measures: surprisal, entropy, cross entropy,
// KL divergence, equivocation and received information.
//
// All functions are pure. Natural log is the default unit (nats); pass
// LogBase::of(2.0) for bits.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infocycle/errors.hpp"

namespace infocycle {

/// Absolute tolerance used when checking that probabilities sum to one.
inline constexpr double kProbabilityTolerance = 1e-9;

class LogBase {
 public:
  static constexpr LogBase natural() noexcept { return LogBase{}; }

  static LogBase of(double base) {
    if (!(base > 1.0) || !std::isfinite(base)) {
      throw DomainError("log base must be a finite real > 1, got " + std::to_string(base));
    }
    return LogBase{base};
  }

  bool is_natural() const noexcept { return !base_.has_value(); }
  double value() const noexcept { return base_.value_or(std::exp(1.0)); }

  /// log_base(x) for x > 0.
  double log(double x) const noexcept {
    return base_ ? std::log(x) / std::log(*base_) : std::log(x);
  }

 private:
  constexpr LogBase() = default;
  explicit LogBase(double b) : base_(b) {}

  std::optional<double> base_;
};

namespace detail {

inline void check_probability_vector(std::span<const double> probs, const char* what) {
  if (probs.empty()) {
    throw ValidationError(std::string(what) + ": must have at least one entry");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < 0.0) {
      throw ValidationError(std::string(what) + ": entry " + std::to_string(i) +
                            " is negative or not finite");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    throw ValidationError(std::string(what) + ": entries sum to " + std::to_string(sum) +
                          ", not 1");
  }
}

inline void renormalize(std::vector<double>& v) {
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= sum;
}

// -p log p with the 0 log 0 = 0 convention.
inline double plogp(double p, const LogBase& base) noexcept {
  return p > 0.0 ? -p * base.log(p) : 0.0;
}

}  // namespace detail

/// A finite probability vector. Inputs that sum to one within
/// kProbabilityTolerance are renormalized; anything else is rejected.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs, std::vector<std::string> labels = {})
      : probs_(std::move(probs)), labels_(std::move(labels)) {
    detail::check_probability_vector(probs_, "distribution");
    if (!labels_.empty() && labels_.size() != probs_.size()) {
      throw ValidationError("distribution: label count does not match probability count");
    }
    detail::renormalize(probs_);
  }

  /// Uniform distribution over n states.
  static Distribution uniform(std::size_t n) {
    if (n == 0) throw ValidationError("distribution: must have at least one entry");
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::vector<double> probs_;
  std::vector<std::string> labels_;
};

/// Joint distribution over X (rows) and Y (columns), stored row-major.
class JointDistribution {
 public:
  JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> cells)
      : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (rows_ == 0 || cols_ == 0) {
      throw ValidationError("joint distribution: both dimensions must be >= 1");
    }
    if (cells_.size() != rows_ * cols_) {
      throw ValidationError("joint distribution: cell count does not match dimensions");
    }
    detail::check_probability_vector(cells_, "joint distribution");
    detail::renormalize(cells_);
  }

  static JointDistribution from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ValidationError("joint distribution: no rows");
    const std::size_t cols = rows.front().size();
    std::vector<double> cells;
    cells.reserve(rows.size() * cols);
    for (const auto& r : rows) {
      if (r.size() != cols) throw ValidationError("joint distribution: ragged rows");
      cells.insert(cells.end(), r.begin(), r.end());
    }
    return JointDistribution(rows.size(), cols, std::move(cells));
  }

  /// Product of two marginals: X and Y independent.
  static JointDistribution independent(const Distribution& x, const Distribution& y) {
    std::vector<double> cells;
    cells.reserve(x.size() * y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) cells.push_back(x[i] * y[j]);
    return JointDistribution(x.size(), y.size(), std::move(cells));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double at(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }
  std::span<const double> cells() const noexcept { return cells_; }

  Distribution marginal_x() const {
    std::vector<double> m(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m[i] += at(i, j);
    return Distribution(std::move(m));
  }

  Distribution marginal_y() const {
    std::vector<double> m(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m[j] += at(i, j);
    return Distribution(std::move(m));
  }

  JointDistribution transposed() const {
    std::vector<double> t(cells_.size());
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = at(i, j);
    return JointDistribution(cols_, rows_, std::move(t));
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> cells_;
};

/// Information value of an outcome with probability p: -log_base(p).
inline double surprisal(double p, LogBase base = LogBase::natural()) {
  if (!(p > 0.0) || p > 1.0) {
    throw DomainError("surprisal: probability must lie in (0, 1], got " + std::to_string(p));
  }
  return p == 1.0 ? 0.0 : -base.log(p);
}

/// Average surprisal, sum of -p_j log p_j.
inline double entropy(const Distribution& d, LogBase base = LogBase::natural()) {
  double h = 0.0;
  for (double p : d.probs()) h += detail::plogp(p, base);
  return h;
}

/// Sum of -p_j log q_j. Never smaller than entropy(p) (Gibbs inequality).
inline double cross_entropy(const Distribution& p, const Distribution& q,
                            LogBase base = LogBase::natural()) {
  if (p.size() != q.size()) {
    throw ValidationError("cross_entropy: distributions have different lengths (" +
                          std::to_string(p.size()) + " vs " + std::to_string(q.size()) + ")");
  }
  double h = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    if (q[j] == 0.0) throw InfiniteDivergence(j);
    h -= p[j] * base.log(q[j]);
  }
  return h;
}

/// Gap between cross entropy and entropy. Computed termwise as
/// sum p_j log(p_j / q_j) so it is exactly zero when p == q.
inline double kl_divergence(const Distribution& p, const Distribution& q,
                            LogBase base = LogBase::natural()) {
  if (p.size() != q.size()) {
    throw ValidationError("kl_divergence: distributions have different lengths");
  }
  double d = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    if (q[j] == 0.0) throw InfiniteDivergence(j);
    d += p[j] * base.log(p[j] / q[j]);
  }
  return d < 0.0 ? 0.0 : d;
}

/// Entropy of the full joint table, H(x, y).
inline double joint_entropy(const JointDistribution& j, LogBase base = LogBase::natural()) {
  double h = 0.0;
  for (double p : j.cells()) h += detail::plogp(p, base);
  return h;
}

/// Conditional entropy H(x | y) = H(x, y) - H(y): what the receiver still
/// does not know about the source after seeing the signal.
inline double equivocation(const JointDistribution& j, LogBase base = LogBase::natural()) {
  const double h = joint_entropy(j, base) - entropy(j.marginal_y(), base);
  return h < 0.0 ? 0.0 : h;
}

/// R = H(x) - H(x | y), i.e. mutual information between source and receiver.
inline double received_information(const JointDistribution& j,
                                   LogBase base = LogBase::natural()) {
  const double r = entropy(j.marginal_x(), base) - equivocation(j, base);
  return r < 0.0 ? 0.0 : r;
}

}  // namespace infocycle
