#ifndef QPDLAB_RNG_HPP
#define QPDLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace qpdlab {

/// Seeded random stream with explicit, platform-stable draw functions.
/// Standard-library distributions are implementation-defined, so all
/// transforms (uniform, gaussian, laplace) are done here by hand to keep
/// results reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_base_(seed), gen_(mix(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller (two uniforms per draw, no cached spare).
  double gaussian() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  /// Laplace(0, scale) by inverse CDF.
  double laplace(double scale) {
    const double u = uniform01() - 0.5;
    const double sign = (u < 0.0) ? -1.0 : 1.0;
    return -scale * sign * std::log(1.0 - 2.0 * std::abs(u));
  }

  /// Independent child stream; stream ids give distinct, reproducible substreams.
  Rng derive(std::uint64_t stream) const {
    return Rng(mix(seed_base_) ^ mix(stream + 0x51ed2701));
  }

  /// Fisher-Yates; used instead of std::shuffle for portability.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_base_ = 0;
  std::mt19937_64 gen_;
};

}  // namespace qpdlab

#endif
