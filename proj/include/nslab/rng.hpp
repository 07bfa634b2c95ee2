#pragma once

#include <cstdint>
#include <random>

namespace nslab {

// SplitMix64 step; good enough to whiten seeds and to derive independent
// per-trial streams from (master, index) without correlation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Splittable seed derivation: trial i of a campaign seeded with `master`
// always gets the same stream, independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::uint64_t whitened = splitmix64(s);
  return std::mt19937_64(whitened);
}

}  // namespace nslab
