#pragma once

#include "ef/se3.hpp"

#include <cstdint>

namespace ef {

/// xoshiro256++ seeded through SplitMix64. Both algorithms are pure 64-bit
/// integer arithmetic, so identical seeds give identical streams on every
/// platform. Distinct substreams are derived by folding stream tags into the
/// SplitMix64 chain before state initialization.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { seed_state(seed); }

  /// Substream constructor: same seed + different tags -> independent stream.
  Rng(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b = 0,
      std::uint64_t tag_c = 0) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (tag_a + 1));
    x = splitmix(x) ^ (0xbf58476d1ce4e5b9ULL * (tag_b + 1));
    x = splitmix(x) ^ (0x94d049bb133111ebULL * (tag_c + 1));
    seed_state(splitmix(x));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1): top 53 bits of the generator output.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached so the stream consumption stays deterministic.
  double gaussian();

  double gaussian(double sigma) { return sigma * gaussian(); }

  /// Uniform direction on the unit sphere.
  Vec3 unit_vector();

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  void seed_state(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix(x);
    have_spare_ = false;
  }

  std::uint64_t s_[4] = {};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ef
