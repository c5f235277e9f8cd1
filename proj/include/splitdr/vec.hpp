#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "splitdr/kernels.hpp"

namespace splitdr {

using Vector = std::vector<double>;

inline double dot(const Vector& x, const Vector& y) {
  return kernels::dot(x.data(), y.data(), x.size());
}

inline double norm_sq(const Vector& x) {
  return kernels::nrm2sq(x.data(), x.size());
}

inline double norm(const Vector& x) { return std::sqrt(norm_sq(x)); }

// z = a*x + b*y
inline void axpby(double a, const Vector& x, double b, const Vector& y,
                  Vector& z) {
  kernels::axpby(a, x.data(), b, y.data(), z.data(), x.size());
}

inline Vector axpby(double a, const Vector& x, double b, const Vector& y) {
  Vector z(x.size());
  axpby(a, x, b, y, z);
  return z;
}

inline Vector add(const Vector& x, const Vector& y) {
  return axpby(1.0, x, 1.0, y);
}

inline Vector sub(const Vector& x, const Vector& y) {
  return axpby(1.0, x, -1.0, y);
}

inline void scale(Vector& x, double a) {
  kernels::axpby(a, x.data(), 0.0, x.data(), x.data(), x.size());
}

inline Vector scaled(const Vector& x, double a) {
  Vector z(x.size());
  kernels::axpby(a, x.data(), 0.0, x.data(), z.data(), x.size());
  return z;
}

inline bool all_finite(const Vector& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

inline void require_dim(const Vector& x, std::size_t n, const char* what) {
  if (x.size() != n) throw std::invalid_argument(std::string(what) +
                                                 ": dimension mismatch");
}

// Distance helpers for primal-dual pairs treated as one stacked point.
inline double pair_norm_sq(const Vector& a, const Vector& b) {
  return norm_sq(a) + norm_sq(b);
}

inline double pair_dist_sq(const Vector& a1, const Vector& b1,
                           const Vector& a2, const Vector& b2) {
  double s = 0.0;
  for (std::size_t i = 0; i < a1.size(); ++i) {
    const double d = a1[i] - a2[i];
    s += d * d;
  }
  for (std::size_t i = 0; i < b1.size(); ++i) {
    const double d = b1[i] - b2[i];
    s += d * d;
  }
  return s;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace splitdr
