#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace lyaplab {

/// SplitMix64 step; used to derive independent stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic RNG stream. Sampling primitives are implemented on top of the
/// raw 64-bit output so that sequences do not depend on the standard library's
/// distribution internals; identical (master_seed, stream) pairs yield
/// identical draws on every build.
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t stream) {
    std::uint64_t s = master_seed;
    splitmix64(s);
    s ^= 0x6a09e667f3bcc909ULL + stream * 0x3c6ef372fe94f82bULL;
    engine_.seed(splitmix64(s));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Complex standard normal (real and imaginary parts N(0, 1/2)).
  std::complex<double> cgaussian() {
    const double inv_sqrt2 = 0.7071067811865475244;
    return {gaussian() * inv_sqrt2, gaussian() * inv_sqrt2};
  }

  /// Index drawn according to the given non-negative weights.
  std::size_t discrete(std::span<const double> weights) {
    if (weights.empty()) throw std::invalid_argument("discrete: empty weights");
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
  double spare_{0.0};
  bool have_spare_{false};
};

}  // namespace lyaplab
