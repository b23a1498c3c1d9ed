#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pathatlas {

/// Deterministic random source. Gaussian deviates are produced by an
/// explicit Box-Muller transform so that streams do not depend on the
/// standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  /// Uniform in [0,1).
  double uniform() {
    return std::ldexp(static_cast<double>(engine_() >> 11), -53);
  }

  /// Uniform in [a,b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::vector<double> gaussian_vector(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = gaussian();
    return v;
  }

  /// Sub-stream for indexed, order-independent sampling.
  Rng fork(std::uint64_t index) const { return Rng(seed_mix(seed_, index)); }

  std::uint64_t seed() const { return seed_; }

  static std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 step on (seed ^ golden-ratio-scrambled index)
    std::uint64_t z = seed ^ (index * 0x9E3779B97F4A7C15ull + 0xBF58476D1CE4E5B9ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pathatlas
