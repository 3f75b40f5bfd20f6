#pragma once

// Platform-stable random draws. std::mt19937_64 output is fully specified by
// the standard but the std:: distributions are not, so every draw that feeds
// a reproducible result goes through these helpers.

#include <cstdint>
#include <random>

namespace hsc {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Uniform in [0, bound); bound must be nonzero. Rejection keeps it unbiased.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline std::uint32_t uniform_word(Rng& rng) { return static_cast<std::uint32_t>(rng() >> 32); }

inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool coin(Rng& rng, double p) { return uniform_unit(rng) < p; }

}  // namespace hsc
