#pragma once

#include <cmath>
#include <cstdint>

namespace delasso {

/// Deterministic 64-bit generator (splitmix64 core) with an explicit
/// Box-Muller normal sampler, so streams are reproducible independent of
/// the standard library implementation. Substreams derived by hashing
/// (seed, stream) are statistically independent for Monte-Carlo purposes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    // one mixing round over the pair; avoids correlated neighbor streams
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    return Rng(mix(x));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double c = std::cos(6.283185307179586476925286766559 * u2);
    double s = std::sin(6.283185307179586476925286766559 * u2);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
  }

  /// Uniform integer in [0, bound) by rejection (unbiased).
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      std::uint64_t x = next_u64();
      if (x >= threshold) return x % bound;
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace delasso
