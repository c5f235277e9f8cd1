#include "splitdr/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace splitdr::kernels {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void axpby(double, const double*, double, const double*, double*, std::size_t);
void soft_threshold(const double*, double, double*, std::size_t);
void clamp(const double*, double, double, double*, std::size_t);
void huber_prox(const double*, double, double, double*, std::size_t);
double dot(const double*, const double*, std::size_t);
double nrm2sq(const double*, std::size_t);
void laplacian2d_neumann(const double*, double*, int, int);
}  // namespace avx2
#endif

namespace {

struct Table {
  void (*axpby)(double, const double*, double, const double*, double*,
                std::size_t);
  void (*soft_threshold)(const double*, double, double*, std::size_t);
  void (*clamp)(const double*, double, double, double*, std::size_t);
  void (*huber_prox)(const double*, double, double, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  void (*laplacian2d_neumann)(const double*, double*, int, int);
};

constexpr Table kScalarTable = {ref::axpby,      ref::soft_threshold,
                                ref::clamp,      ref::huber_prox,
                                ref::dot,        ref::nrm2sq,
                                ref::laplacian2d_neumann};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2Table = {avx2::axpby,      avx2::soft_threshold,
                              avx2::clamp,      avx2::huber_prox,
                              avx2::dot,        avx2::nrm2sq,
                              avx2::laplacian2d_neumann};
#endif

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("SPLITDR_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::avx2;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = detect();

const Table* table_for(Backend b) {
#if defined(__x86_64__) || defined(_M_X64)
  if (b == Backend::avx2) return &kAvx2Table;
#endif
  return &kScalarTable;
}

const Table* g_table = table_for(g_backend);

}  // namespace

Backend active_backend() { return g_backend; }

void force_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
  g_backend = b;
  g_table = table_for(b);
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  g_table->axpby(a, x, b, y, out, n);
}

void soft_threshold(const double* x, double t, double* out, std::size_t n) {
  g_table->soft_threshold(x, t, out, n);
}

void clamp(const double* x, double lo, double hi, double* out, std::size_t n) {
  g_table->clamp(x, lo, hi, out, n);
}

void huber_prox(const double* x, double gamma, double delta, double* out,
                std::size_t n) {
  g_table->huber_prox(x, gamma, delta, out, n);
}

double dot(const double* x, const double* y, std::size_t n) {
  return g_table->dot(x, y, n);
}

double nrm2sq(const double* x, std::size_t n) { return g_table->nrm2sq(x, n); }

void laplacian2d_neumann(const double* x, double* out, int n1, int n2) {
  g_table->laplacian2d_neumann(x, out, n1, n2);
}

}  // namespace splitdr::kernels
