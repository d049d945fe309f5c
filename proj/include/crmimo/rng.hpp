#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "crmimo/hermitian.hpp"

namespace crmimo {

/// Counter-based SplitMix64 stream.
///
/// Draw number n (n = 0, 1, 2, ...) for seed s is
///   z  = s + (n + 1) * 0x9E3779B97F4A7C15   (mod 2^64)
///   z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   out = z ^ (z >> 31)
/// which is exactly the sequence produced by the reference sequential
/// SplitMix64 seeded with s. Any draw can be computed from (s, n) alone.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t at(std::uint64_t seed, std::uint64_t n) {
    std::uint64_t z = seed + (n + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return at(seed_, counter_++); }

  /// Uniform on (0, 1]: top 53 bits plus one, scaled by 2^-53.
  double next_unit() { return (double(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  /// Box-Muller on the pair (u1, u2) of consecutive draws:
  ///   r = sqrt(-2 ln u1), re = r cos(2 pi u2) / sqrt(2), im = r sin(2 pi u2) / sqrt(2).
  Complex next_cscg() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(angle) * std::numbers::sqrt2 / 2.0, r * std::sin(angle) * std::numbers::sqrt2 / 2.0};
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace crmimo
