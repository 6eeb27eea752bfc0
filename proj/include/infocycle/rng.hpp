#pragma once

// Counter-based random substreams.
//
// Every draw is a pure function of (master seed, purpose, key..., counter),
// so the stream used for one purpose never shifts when another knob changes
// how many numbers some other purpose consumes.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace infocycle::rng {

enum class Purpose : std::uint64_t {
  events = 1,
  agents = 2,
  diffusion = 3,
  decoding = 4,
  noise = 5,
  synthetic = 6,
};

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, Purpose purpose,
                                   std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t k = mix64(seed ^ mix64(static_cast<std::uint64_t>(purpose)));
  for (std::uint64_t p : parts) k = mix64(k ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return k;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// A single stateless uniform draw keyed by (seed, purpose, parts).
constexpr double uniform_at(std::uint64_t seed, Purpose purpose,
                            std::initializer_list<std::uint64_t> parts) noexcept {
  return to_unit(mix64(derive_key(seed, purpose, parts)));
}

class Stream {
 public:
  Stream(std::uint64_t seed, Purpose purpose, std::initializer_list<std::uint64_t> parts = {})
      : key_(derive_key(seed, purpose, parts)) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  double uniform() noexcept { return to_unit(next_u64()); }

  /// Uniform in (0, 1], safe to take the log of.
  double uniform_open0() noexcept { return 1.0 - uniform(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller; both uniforms come from this stream.
  double normal() noexcept {
    const double u1 = uniform_open0();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential() noexcept { return -std::log(uniform_open0()); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace infocycle::rng
