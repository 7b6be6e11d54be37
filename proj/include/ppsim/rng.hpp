#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ppsim {

/// splitmix64 finalizer; used to spread seeds before they reach the engine.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for run `index` of stream `stream` under `master`:
/// mix64(master ^ mix64(stream ^ mix64(index))).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  return mix64(master ^ mix64(stream ^ mix64(index)));
}

namespace streams {
inline constexpr std::uint64_t kEvaluation = 0x45564131;  // "EVA1"
inline constexpr std::uint64_t kDiscovery = 0x44495331;   // "DIS1"
inline constexpr std::uint64_t kCalibration = 0x43414c31; // "CAL1"
}  // namespace streams

/// 64-bit Mersenne Twister with hand-rolled variates, so draws are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Consumes exactly one uniform regardless of p.
  bool bernoulli(double p) { return uniform() < p; }

  /// Standard exponential via inversion; 1 - u lies in (0, 1].
  double exponential() { return -std::log1p(-uniform()); }

  /// Laplace(0, 1) via inversion.
  double laplace() {
    const double u = uniform() - 0.5;
    return u < 0 ? std::log1p(2.0 * u) : -std::log1p(-2.0 * u);
  }

  /// Standard normal by Box-Muller (one of the pair is discarded).
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ppsim
