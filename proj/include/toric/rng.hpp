#pragma once

// Small deterministic RNG (splitmix64). Standard-library distributions are
// implementation-defined, which would break the byte-identical-report
// guarantee across platforms; everything random in the library goes through
// this.

#include <cstdint>

namespace toric {

class Rng {
  uint64_t state_;

public:
  explicit Rng(uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  /// uniform in [0,1)
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// uniform integer in [0, n)
  uint64_t below(uint64_t n) { return next() % n; }
};

}  // namespace toric
