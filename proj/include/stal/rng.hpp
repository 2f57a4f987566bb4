#pragma once

#include <cstdint>

// Counter-based generator: a draw mixes (key, counter), so streams derived
// from distinct (seed, stream) pairs are independent and replay exactly on
// any platform; state is two integers and copies are cheap forks.

namespace stal {

struct Rng {
  std::uint64_t key = 0;
  std::uint64_t ctr = 0;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : key(mix(seed + 0x9e3779b97f4a7c15ull * (stream + 1))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key ^ mix(++ctr)); }

  // uniform in [lo, hi) with 53 random mantissa bits
  double uniform(double lo = 0.0, double hi = 1.0) {
    double u = double(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  // uniform integer in [lo, hi] inclusive
  int uniform_int(int lo, int hi) {
    return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
  }
};

}  // namespace stal
