#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace catlda {

// Deterministic random source. std::mt19937_64 is pinned by the standard,
// but std::normal_distribution and std::uniform_int_distribution are
// implementation-defined, so the transforms are spelled out here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  // Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Chi-square with (small) integer degrees of freedom.
  double chi_squared(int df) {
    double s = 0.0;
    for (int i = 0; i < df; ++i) {
      const double z = normal();
      s += z * z;
    }
    return s;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Sample a category from a discrete distribution given by `probs`
  // (assumed to sum to 1; the last index absorbs rounding slack).
  std::size_t categorical(const std::vector<double>& probs) {
    const double u = uniform01();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return k;
    }
    return probs.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

// Seed for the i-th parallel task of a run; documented derivation so that
// results are reproducible regardless of worker scheduling.
inline std::uint64_t task_seed(std::uint64_t base_seed, std::uint64_t index) {
  return base_seed + index;
}

}  // namespace catlda
