#pragma once

#include <cstddef>

// Elementwise/reduction kernels behind the vector algebra. Every kernel has
// a scalar reference implementation and, on x86-64 with AVX2+FMA, a vector
// variant; the backend is resolved once at startup (overridable through the
// SPLITDR_KERNELS environment variable or force_backend(), mainly for the
// equivalence tests).
//
// Elementwise kernels (axpby, soft_threshold, clamp, huber_prox) are
// bit-identical across backends. Reductions (dot, nrm2sq) may differ in the
// last bits because the vector variants use FMA and multiple accumulators.

namespace splitdr::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
void force_backend(Backend b);
const char* backend_name(Backend b);

// out = a*x + b*y
void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n);
// out_i = sign(x_i) * max(|x_i| - t, 0)
void soft_threshold(const double* x, double t, double* out, std::size_t n);
// out_i = min(max(x_i, lo), hi)
void clamp(const double* x, double lo, double hi, double* out, std::size_t n);
// componentwise prox of gamma * phi_delta (Huber):
// |w| <= delta+gamma -> w*delta/(delta+gamma), else w - gamma*sign(w)
void huber_prox(const double* x, double gamma, double delta, double* out,
                std::size_t n);

double dot(const double* x, const double* y, std::size_t n);
double nrm2sq(const double* x, std::size_t n);

// 2-D Neumann Laplacian (div grad with forward differences and zero last
// difference), the fused normal operator of the discrete gradient.
void laplacian2d_neumann(const double* x, double* out, int n1, int n2);

// Scalar reference path, always available; the dispatch tests pin the
// vector variants against these.
namespace ref {
void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n);
void soft_threshold(const double* x, double t, double* out, std::size_t n);
void clamp(const double* x, double lo, double hi, double* out, std::size_t n);
void huber_prox(const double* x, double gamma, double delta, double* out,
                std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
void laplacian2d_neumann(const double* x, double* out, int n1, int n2);
}  // namespace ref

}  // namespace splitdr::kernels
