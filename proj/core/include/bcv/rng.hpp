#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace bcv {

/// One splitmix64 mixing step. Used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base) { return splitmix64(base); }

/// Order-sensitive seed derivation: derive_seed(s, a, b) != derive_seed(s, b, a).
/// Every concurrent task seeds its own stream this way, so results do not
/// depend on scheduling order.
template <class... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t head, Rest... rest) {
  return derive_seed(splitmix64(base ^ splitmix64(head + 0x632be59bd9b4e019ULL)),
                     static_cast<std::uint64_t>(rest)...);
}

/// Deterministic random source. The mt19937_64 engine output is pinned by the
/// standard; all distributions are hand-rolled on top of it so streams are
/// bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Unbiased integer in [0, n). Lemire multiply-shift with rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (-n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller (cosine branch, two uniforms per call).
  double normal() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Index draw proportional to nonnegative weights (CDF inversion).
  int discrete(const std::vector<double>& weights) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    if (!(sum > 0.0)) throw std::invalid_argument("Rng::discrete: weights must sum to > 0");
    double u = uniform01() * sum;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bcv
