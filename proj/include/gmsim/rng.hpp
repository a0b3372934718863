#pragma once

#include <cstdint>

#include "gmsim/numerics.hpp"

namespace gmsim {

/// SplitMix64 finalizer. Also the seed-mixing function: every per-simulation
/// stream is seeded with mix_seed(parent, salt), so identical (master_seed,
/// index) pairs reproduce identical draws on any platform.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t salt) {
  return mix64(parent ^ (0x9E3779B97F4A7C15ULL * (salt + 0x632BE59BD9B4E019ULL)));
}

/// SplitMix64 stream. Deliberately not std::uniform_real_distribution: the
/// draw sequence must be identical across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Normal(mu, sigma) truncated to mu +- k*sigma via the inverse CDF; k = 0
  /// degenerates to the mean.
  double truncated_normal(double mu, double sigma, double k) {
    if (!(k > 0.0)) {
      uniform01();  // keep the draw count independent of k
      return mu;
    }
    const double lo = normal_cdf(-k);
    const double hi = normal_cdf(k);
    const double p = lo + (hi - lo) * uniform01();
    return mu + sigma * normal_icdf(p);
  }

 private:
  std::uint64_t state_;
};

}  // namespace gmsim
