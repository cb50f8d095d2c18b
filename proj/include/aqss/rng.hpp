#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace aqss {

// 64-bit FNV-1a. Stable across platforms, used for stream labels and digests.
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Splittable counter-based generator: output i of a stream is a keyed hash of
// (key, i). split() derives an independent child key, so adding a new labelled
// sub-stream never perturbs draws taken from its siblings.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }

  Rng split(std::string_view label) const;
  Rng split(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

private:
  struct FromKey {};
  Rng(FromKey, std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t x);

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aqss
