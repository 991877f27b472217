#pragma once
#include <cmath>
#include <cstdint>
#include <random>

#include "config.hpp"

namespace dnls {

//! Seeded generator whose output is fixed by the standard (mt19937_64) and
//! whose floating conversions are done here, not by implementation-defined
//! distributions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(mix(seed)) {}

  //! Independent stream derived from a seed and a stream id.
  Rng(std::uint64_t seed, std::uint64_t stream)
      : eng_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t bits() { return eng_(); }

  //! Uniform in [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  //! Log-uniform magnitude in [a, b], a > 0.
  double log_uniform(double a, double b) {
    return a * std::exp(uniform() * std::log(b / a));
  }

  double sign() { return (eng_() >> 63) ? -1.0 : 1.0; }

  int integer(int lo, int hi) {
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(eng_() % span);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0)
      u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace dnls
