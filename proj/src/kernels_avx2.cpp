// AVX2 kernel variants. Compiled with -mavx2 -mfma on x86-64 only; the
// dispatcher never selects them unless the CPU reports both features.
//
// Elementwise kernels mirror the scalar reference operation-for-operation
// (mul/mul/add, no contraction) so results are bit-identical. Reductions use
// FMA with four accumulators and are only tolerance-equal.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>

#include "splitdr/kernels.hpp"

namespace splitdr::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

const __m256d kSignMask = _mm256_set1_pd(-0.0);

}  // namespace

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(vx, vy));
  }
  if (i < n) ref::axpby(a, x + i, b, y + i, out + i, n - i);
}

void soft_threshold(const double* x, double t, double* out, std::size_t n) {
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d sign = _mm256_and_pd(vx, kSignMask);
    __m256d mag = _mm256_andnot_pd(kSignMask, vx);
    __m256d m = _mm256_max_pd(_mm256_sub_pd(mag, vt), zero);
    _mm256_storeu_pd(out + i, _mm256_or_pd(m, sign));
  }
  if (i < n) ref::soft_threshold(x + i, t, out + i, n - i);
}

void clamp(const double* x, double lo, double hi, double* out, std::size_t n) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_max_pd(_mm256_loadu_pd(x + i), vlo);
    _mm256_storeu_pd(out + i, _mm256_min_pd(v, vhi));
  }
  if (i < n) ref::clamp(x + i, lo, hi, out + i, n - i);
}

void huber_prox(const double* x, double gamma, double delta, double* out,
                std::size_t n) {
  const double kink = delta + gamma;
  const double shrink = delta / kink;
  const __m256d vkink = _mm256_set1_pd(kink);
  const __m256d vshrink = _mm256_set1_pd(shrink);
  const __m256d vgamma = _mm256_set1_pd(gamma);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d w = _mm256_loadu_pd(x + i);
    __m256d mag = _mm256_andnot_pd(kSignMask, w);
    __m256d inside = _mm256_cmp_pd(mag, vkink, _CMP_LE_OQ);
    __m256d shrunk = _mm256_mul_pd(w, vshrink);
    __m256d step = _mm256_or_pd(vgamma, _mm256_and_pd(w, kSignMask));
    __m256d tail = _mm256_sub_pd(w, step);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(tail, shrunk, inside));
  }
  if (i < n) ref::huber_prox(x + i, gamma, delta, out + i, n - i);
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double res = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                  _mm256_add_pd(acc2, acc3)));
  if (i < n) res += ref::dot(x + i, y + i, n - i);
  return res;
}

double nrm2sq(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d v0 = _mm256_loadu_pd(x + i);
    __m256d v1 = _mm256_loadu_pd(x + i + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
  }
  double res = hsum(_mm256_add_pd(acc0, acc1));
  if (i < n) res += ref::nrm2sq(x + i, n - i);
  return res;
}

void laplacian2d_neumann(const double* x, double* out, int n1, int n2) {
  const __m256d two = _mm256_set1_pd(2.0);
  for (int i = 0; i < n1; ++i) {
    const double* row = x + static_cast<std::size_t>(i) * n2;
    double* o = out + static_cast<std::size_t>(i) * n2;
    const double* up = i > 0 ? row - n2 : nullptr;
    const double* dn = i < n1 - 1 ? row + n2 : nullptr;
    // interior columns, vector loop; edge columns handled after
    int j = 1;
    for (; j + 4 <= n2 - 1; j += 4) {
      __m256d c = _mm256_loadu_pd(row + j);
      __m256d h = _mm256_sub_pd(
          _mm256_sub_pd(_mm256_mul_pd(two, c), _mm256_loadu_pd(row + j - 1)),
          _mm256_loadu_pd(row + j + 1));
      __m256d v;
      if (up && dn)
        v = _mm256_sub_pd(
            _mm256_sub_pd(_mm256_mul_pd(two, c), _mm256_loadu_pd(up + j)),
            _mm256_loadu_pd(dn + j));
      else if (up)
        v = _mm256_sub_pd(c, _mm256_loadu_pd(up + j));
      else if (dn)
        v = _mm256_sub_pd(c, _mm256_loadu_pd(dn + j));
      else
        v = _mm256_setzero_pd();
      _mm256_storeu_pd(o + j, _mm256_add_pd(h, v));
    }
    for (; j < n2 - 1; ++j) {
      const double h = 2.0 * row[j] - row[j - 1] - row[j + 1];
      const double v = (up && dn)
                           ? 2.0 * row[j] - up[j] - dn[j]
                           : (up ? row[j] - up[j] : (dn ? row[j] - dn[j] : 0.0));
      o[j] = h + v;
    }
    {
      const double h0 = row[0] - row[1];
      const double v0 = (up && dn)
                            ? 2.0 * row[0] - up[0] - dn[0]
                            : (up ? row[0] - up[0] : (dn ? row[0] - dn[0] : 0.0));
      o[0] = h0 + v0;
      const int e = n2 - 1;
      const double he = row[e] - row[e - 1];
      const double ve = (up && dn)
                            ? 2.0 * row[e] - up[e] - dn[e]
                            : (up ? row[e] - up[e] : (dn ? row[e] - dn[e] : 0.0));
      o[e] = he + ve;
    }
  }
}

}  // namespace splitdr::kernels::avx2

#endif  // x86-64
