#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace qcond {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded random source. All distributions are generated from raw mt19937_64
// output with fixed arithmetic, so a seed reproduces the exact same stream on
// every platform (std::*_distribution would not guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derive an independent stream seed from a master seed and indices.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b = 0) {
    return splitmix64(master ^ splitmix64(a ^ splitmix64(b)));
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), unbiased. n must be >= 1.
  std::size_t below(std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Complex Gaussian with independent standard normal real/imag parts.
  std::complex<double> complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re, im};
  }

  // Random point on the probability simplex (normalized exponentials).
  std::vector<double> simplex(std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) {
      x = -std::log(1.0 - uniform());
      total += x;
    }
    for (auto& x : w) x /= total;
    return w;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qcond
