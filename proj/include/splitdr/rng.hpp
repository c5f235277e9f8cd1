#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "splitdr/vec.hpp"

// Seeded randomness used across builders and tests. mt19937_64 has a pinned
// sequence; the normal draws go through an explicit Box-Muller so results do
// not depend on the standard library's distribution internals.

namespace splitdr {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0, 1)
  double uniform() {
    return (gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Vector uniform_vector(std::size_t n, double lo = 0.0, double hi = 1.0) {
    Vector v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  Vector normal_vector(std::size_t n, double mean = 0.0, double stddev = 1.0) {
    Vector v(n);
    for (auto& x : v) x = mean + stddev * normal();
    return v;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace splitdr
