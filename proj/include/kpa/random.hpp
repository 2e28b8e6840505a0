#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "kpa/text.hpp"

namespace kpa {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of a named sub-stream. Every stage draws from its own stream so that
/// stages can be reproduced independently from the single user seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view name) {
  return splitmix64(seed ^ fnv1a(name));
}

inline Rng substream(std::uint64_t seed, std::string_view name) { return Rng(derive_seed(seed, name)); }

/// Uniform index in [0, n). Implemented directly so results do not depend on
/// the standard library's distribution algorithms.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

}  // namespace kpa
