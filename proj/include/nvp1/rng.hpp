#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nvp1/constants.hpp"

namespace nvp1 {

// Deterministic RNG wrapper. The engine (mt19937_64) is fully specified by
// the standard; the distribution mappings below are fixed here because the
// std:: distributions are implementation-defined and would break the
// byte-identical reproducibility contract across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    // Rejection-free modulo bias is negligible for the n used here (<= 13),
    // but keep it exact anyway.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; one value per call (the spare is discarded to keep the
  // stream position independent of call history).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(constants::two_pi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Geometric: number of Bernoulli(p) trials up to and including the first
  // success. Used for dwell-time sampling.
  std::uint64_t geometric(double p) {
    if (p >= 1.0) return 1;
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return 1 + static_cast<std::uint64_t>(std::log(u) / std::log1p(-p));
  }

  // Independent substream for work item `index`. SplitMix64 over (seed,
  // index) gives well-separated seeds regardless of scheduling, which is
  // what makes parallel sweeps deterministic in the thread count.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nvp1
