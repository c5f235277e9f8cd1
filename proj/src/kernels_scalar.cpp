#include "splitdr/kernels.hpp"

#include <cmath>

namespace splitdr::kernels::ref {

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void soft_threshold(const double* x, double t, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double m = std::abs(x[i]) - t;
    m = m > 0.0 ? m : 0.0;
    out[i] = std::copysign(m, x[i]);
  }
}

void clamp(const double* x, double lo, double hi, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i] > lo ? x[i] : lo;
    out[i] = v < hi ? v : hi;
  }
}

void huber_prox(const double* x, double gamma, double delta, double* out,
                std::size_t n) {
  const double kink = delta + gamma;
  const double shrink = delta / kink;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = x[i];
    out[i] = std::abs(w) <= kink ? w * shrink : w - std::copysign(gamma, w);
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double nrm2sq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void laplacian2d_neumann(const double* x, double* out, int n1, int n2) {
  for (int i = 0; i < n1; ++i) {
    const double* row = x + static_cast<std::size_t>(i) * n2;
    double* o = out + static_cast<std::size_t>(i) * n2;
    const double* up = i > 0 ? row - n2 : nullptr;
    const double* dn = i < n1 - 1 ? row + n2 : nullptr;
    for (int j = 0; j < n2; ++j) {
      double h;
      if (j == 0)
        h = row[0] - row[1];
      else if (j == n2 - 1)
        h = row[j] - row[j - 1];
      else
        h = 2.0 * row[j] - row[j - 1] - row[j + 1];
      double v;
      if (up && dn)
        v = 2.0 * row[j] - up[j] - dn[j];
      else if (up)
        v = row[j] - up[j];
      else if (dn)
        v = row[j] - dn[j];
      else
        v = 0.0;
      o[j] = h + v;
    }
  }
}

}  // namespace splitdr::kernels::ref
