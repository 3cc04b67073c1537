#pragma once

#include <cstdint>
#include <random>

namespace daaf {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output function. A bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of replication `r` under `master`. For a fixed master the map r -> seed
/// is injective: r * gamma is injective mod 2^64 (gamma is odd) and splitmix64
/// is a bijection.
constexpr std::uint64_t replication_seed(std::uint64_t master, std::uint64_t r) {
  return splitmix64(master + (r + 1) * kGoldenGamma);
}

}  // namespace daaf
