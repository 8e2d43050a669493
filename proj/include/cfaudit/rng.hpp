#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace cfaudit {

/// One scrambling round of SplitMix64.
std::uint64_t splitmix64(std::uint64_t state);

/// Derives an independent stream seed from a master seed and a stream index.
/// Per-point searches seeded this way stay reproducible no matter how the
/// work is scheduled.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Inverse of the standard normal CDF, Acklam's rational approximation
/// (relative error below 1.2e-9 on (0, 1)).
double inverse_normal_cdf(double p);

/// Deterministic random source.
///
/// All distributions are built on the raw 64-bit output of std::mt19937_64,
/// whose sequence the standard fixes exactly. The std::*_distribution
/// adaptors are implementation-defined and are deliberately not used here.
/// Normal deviates use the inverse-CDF method, so one uniform draw maps to
/// one normal deviate and the draw count per operation is part of the
/// reproducibility contract.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1); never returns an endpoint. Used for inverse-CDF
  /// sampling where 0 and 1 map to infinities.
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform index in [0, n); n must be positive. Modulo bias is below
  /// n / 2^64 and irrelevant at the population sizes used here.
  std::size_t uniform_index(std::size_t n);

  double normal(double mu, double sigma) {
    return mu + sigma * inverse_normal_cdf(uniform01_open());
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cfaudit
