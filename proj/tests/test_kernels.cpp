#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "splitdr/kernels.hpp"
#include "splitdr/rng.hpp"

using namespace splitdr;

namespace {

// sizes that exercise the vector main loops and every tail length
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17,
                              31, 64, 100, 1023, 4096, 65536};

struct BackendGuard {
  kernels::Backend saved;
  BackendGuard() : saved(kernels::active_backend()) {}
  ~BackendGuard() { kernels::force_backend(saved); }
};

bool bits_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("dispatched elementwise kernels are bit-identical to the scalar reference") {
  BackendGuard guard;
  if (kernels::active_backend() == kernels::Backend::scalar) {
    MESSAGE("no vector backend on this host; dispatch test degenerates");
  }
  Rng rng(42);
  for (std::size_t n : kSizes) {
    Vector x = rng.normal_vector(n, 0.0, 10.0);
    Vector y = rng.normal_vector(n, 1.0, 5.0);
    Vector got(n), want(n);

    kernels::axpby(1.7, x.data(), -0.3, y.data(), got.data(), n);
    kernels::ref::axpby(1.7, x.data(), -0.3, y.data(), want.data(), n);
    CHECK(bits_equal(got, want));

    kernels::soft_threshold(x.data(), 0.8, got.data(), n);
    kernels::ref::soft_threshold(x.data(), 0.8, want.data(), n);
    CHECK(bits_equal(got, want));

    kernels::clamp(x.data(), -1.5, 2.5, got.data(), n);
    kernels::ref::clamp(x.data(), -1.5, 2.5, want.data(), n);
    CHECK(bits_equal(got, want));

    kernels::huber_prox(x.data(), 0.7, 1.3, got.data(), n);
    kernels::ref::huber_prox(x.data(), 0.7, 1.3, want.data(), n);
    CHECK(bits_equal(got, want));
  }
}

TEST_CASE("dispatched reductions match the scalar reference to relative 1e-12") {
  Rng rng(7);
  for (std::size_t n : kSizes) {
    Vector x = rng.normal_vector(n);
    Vector y = rng.normal_vector(n);
    const double d0 = kernels::dot(x.data(), y.data(), n);
    const double d1 = kernels::ref::dot(x.data(), y.data(), n);
    CHECK(std::abs(d0 - d1) <= 1e-12 * (1.0 + std::abs(d1)));
    const double n0 = kernels::nrm2sq(x.data(), n);
    const double n1 = kernels::ref::nrm2sq(x.data(), n);
    CHECK(std::abs(n0 - n1) <= 1e-12 * (1.0 + std::abs(n1)));
  }
}

TEST_CASE("laplacian kernel is bit-identical across backends and grid shapes") {
  Rng rng(11);
  const int shapes[][2] = {{2, 2}, {2, 5}, {5, 2}, {3, 3}, {7, 9},
                           {16, 16}, {17, 5}, {33, 64}};
  for (auto [n1, n2] : shapes) {
    Vector x = rng.normal_vector(static_cast<std::size_t>(n1) * n2);
    Vector got(x.size()), want(x.size());
    kernels::laplacian2d_neumann(x.data(), got.data(), n1, n2);
    kernels::ref::laplacian2d_neumann(x.data(), want.data(), n1, n2);
    CHECK(bits_equal(got, want));
  }
}

TEST_CASE("forced scalar backend serves every kernel") {
  BackendGuard guard;
  kernels::force_backend(kernels::Backend::scalar);
  CHECK(kernels::active_backend() == kernels::Backend::scalar);
  Vector x = {3.0, -2.0, 0.5};
  Vector out(3);
  kernels::soft_threshold(x.data(), 1.0, out.data(), 3);
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(-1.0));
  CHECK(out[2] == doctest::Approx(0.0));
  CHECK(kernels::dot(x.data(), x.data(), 3) == doctest::Approx(13.25));
}

TEST_CASE("soft threshold closed forms") {
  Vector x = {2.0, -2.0};
  Vector out(2);
  kernels::soft_threshold(x.data(), 1.0, out.data(), 2);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == -1.0);
  // level 0 is the identity
  Rng rng(3);
  Vector r = rng.normal_vector(64);
  Vector id(64);
  kernels::soft_threshold(r.data(), 0.0, id.data(), 64);
  CHECK(bits_equal(r, id));
  // dead zone
  Vector small = {0.5};
  Vector dz(1);
  kernels::soft_threshold(small.data(), 1.0, dz.data(), 1);
  CHECK(dz[0] == 0.0);
}

TEST_CASE("huber prox kernel closed forms") {
  Vector x = {1.0, 3.0, -3.0, 0.0};
  Vector out(4);
  kernels::huber_prox(x.data(), 1.0, 1.0, out.data(), 4);
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK(out[1] == doctest::Approx(2.0));
  CHECK(out[2] == doctest::Approx(-2.0));
  CHECK(out[3] == 0.0);
}
