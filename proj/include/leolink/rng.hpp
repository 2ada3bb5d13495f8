/**
 * @file rng.hpp
 * @brief Seed derivation and complex Gaussian draws.
 *
 * Every randomized operation takes an explicit 64-bit seed. Independent
 * sub-streams (channel draw, symbol draw, noise draw) are derived from a
 * trial seed with splitmix64 so that adding a consumer never shifts the
 * values seen by another.
 */
#pragma once

#include <cstdint>
#include <random>

#include "leolink/types.hpp"

namespace leolink {

using Rng = std::mt19937_64;

/// splitmix64 step; a good 64-bit mixer (Vigna, 2015).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives the seed of an independent sub-stream from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

// Sub-stream tags used by the trial pipeline.
inline constexpr std::uint64_t kStreamStates = 1;
inline constexpr std::uint64_t kStreamSymbols = 2;
inline constexpr std::uint64_t kStreamNoise = 3;

/// Circularly-symmetric complex normal draw with unit variance, CN(0, 1).
inline Complex complex_normal(Rng& rng) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::normal_distribution<double> n;
  return {n(rng) * kInvSqrt2, n(rng) * kInvSqrt2};
}

}  // namespace leolink
