#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace infocycle {

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A value object failed its invariants (bad distribution, bad config, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A config value is out of range; carries the offending key so a loader
/// can point at the line that set it.
class ConfigKeyError : public ValidationError {
 public:
  ConfigKeyError(std::string key, const std::string& what)
      : ValidationError("config key '" + key + "': " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Cross entropy / KL divergence is infinite: q_j == 0 where p_j > 0.
class InfiniteDivergence : public std::domain_error {
 public:
  explicit InfiniteDivergence(std::size_t index)
      : std::domain_error("infinite divergence: q[" + std::to_string(index) +
                          "] is zero where p is positive"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace infocycle
