#pragma once

#include <cstdint>
#include <random>

namespace localcluster {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; spreads nearby seeds (0, 1, 2, ...) across the state space.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed)); }

/// Per-trial stream: base seed XOR trial index.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial) { return make_rng(seed ^ trial); }

}  // namespace localcluster
