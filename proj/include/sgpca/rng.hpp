#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "sgpca/error.hpp"

namespace sgpca {

// Counter-based pseudo-random generator built on the splitmix64 finalizer.
//
// A stream is identified by a 64-bit key; the i-th output of the stream is
// mix64(key + i * GAMMA), so every draw is a pure function of (key, i).
// Sub-streams are derived by hashing the parent key with an integer tag:
//
//   Rng(seed).derive(j).derive(b)
//
// yields a stream fully determined by (seed, j, b), independent of when or
// on which thread it is consumed. All distributions below are implemented
// from raw 64-bit outputs, never via std:: distributions, so a given seed
// reproduces the same values on every run.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key() const { return key_; }

  // Child stream addressed by an integer tag.
  Rng derive(std::uint64_t tag) const {
    return Rng(mix64(key_ ^ mix64(tag + 0xD1B54A32D192ED03ULL)));
  }

  std::uint64_t next_u64() {
    counter_ += kGamma;
    return mix64(key_ + counter_);
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the paired value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double rademacher() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) fail(ErrorCode::DomainError, "uniform_int: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t draw = next_u64();
    while (draw >= limit) draw = next_u64();
    return draw % bound;
  }

  // k distinct indices from [0, n), returned in ascending order
  // (partial Fisher-Yates over an index table).
  std::vector<int> sample_without_replacement(int n, int k) {
    if (k < 0 || k > n) fail(ErrorCode::DomainError, "sample_without_replacement: k out of range");
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
      const int j = i + static_cast<int>(uniform_int(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<int> picked(pool.begin(), pool.begin() + k);
    std::sort(picked.begin(), picked.end());
    return picked;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sgpca
