#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "splitdr/prox.hpp"
#include "splitdr/rng.hpp"

using namespace splitdr;

namespace {

// 1-D minimization oracle: golden-section bracketing, then bisection on the
// centered finite-difference slope to push past the function-value
// resolution floor.
double golden_min(const std::function<double(double)>& f, double lo,
                  double hi) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 60; ++it) {
    if (f(c) < f(d))
      b = d;
    else
      a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return 0.5 * (a + b);
}

// root of a nondecreasing slope function by bisection
double bisect_root(const std::function<double(double)>& slope, double lo,
                   double hi) {
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

double huber_phi(double x, double delta) {
  return std::abs(x) > delta ? std::abs(x) - delta / 2.0
                             : x * x / (2.0 * delta);
}

}  // namespace

TEST_CASE("soft_threshold examples and errors") {
  CHECK(soft_threshold({2.0, -2.0}, 1.0) == Vector{1.0, -1.0});
  Vector x = {0.3, -5.0, 0.0};
  CHECK(soft_threshold(x, 0.0) == x);
  CHECK(soft_threshold({0.5}, 1.0) == Vector{0.0});
  CHECK_THROWS_AS(soft_threshold(x, -0.1), std::invalid_argument);
}

TEST_CASE("project_box examples and errors") {
  CHECK(project_box({-3.0, 100.0, 300.0}, 0.0, 255.0) ==
        Vector{0.0, 100.0, 255.0});
  CHECK(project_box({42.0}, 0.0, 255.0) == Vector{42.0});
  CHECK(project_box({255.0}, 0.0, 255.0) == Vector{255.0});
  CHECK_THROWS_AS(project_box({1.0}, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("conjugate_resolvent closed forms") {
  // g = indicator of [0,255]: tau (Id - P_C)(x/tau) with tau = 1
  auto box = ResolventOp::box(0.0, 255.0);
  Vector out = conjugate_resolvent(box, 1.0, {300.0});
  CHECK(out[0] == doctest::Approx(45.0));

  // g = 0: prox is the identity, conjugate resolvent is 0
  auto zero = ResolventOp::zero();
  Vector z = conjugate_resolvent(zero, 2.5, {3.0, -1.0});
  CHECK(norm(z) == doctest::Approx(0.0));

  // Moreau identity at tau=1 for f = |.|
  auto l1 = ResolventOp::l1(1.0);
  Vector x = {0.7};
  Vector p = l1.resolve(Metric::scalar(1.0, 1), x);
  Vector q = conjugate_resolvent(l1, 1.0, x);
  CHECK(p[0] + q[0] == doctest::Approx(0.7));
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK_THROWS_AS(conjugate_resolvent(l1, -1.0, x), std::invalid_argument);
}

TEST_CASE("prox_huber against the golden-section oracle") {
  CHECK(prox_huber({1.0}, 1.0, 1.0)[0] == doctest::Approx(0.5));
  CHECK(prox_huber({3.0}, 1.0, 1.0)[0] == doctest::Approx(2.0));
  Vector shift = {4.0};
  CHECK(prox_huber({4.0}, 0.7, 1.3, shift)[0] == doctest::Approx(4.0));
  CHECK_THROWS_AS(prox_huber({1.0}, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(prox_huber({1.0}, 1.0, 0.0), std::invalid_argument);

  for (double delta : {0.1, 1.0})
    for (double gamma : {0.5, 2.0})
      for (double w = -10.0; w <= 10.0; w += 0.73) {
        auto objective = [&](double y) {
          return gamma * huber_phi(y, delta) + 0.5 * (y - w) * (y - w);
        };
        // golden-section localization, sharpened by bisecting the
        // piecewise slope of the same objective
        const double coarse = golden_min(objective, -12.0, 12.0);
        auto slope = [&](double y) {
          const double dphi =
              std::abs(y) > delta ? (y > 0.0 ? 1.0 : -1.0) : y / delta;
          return gamma * dphi + (y - w);
        };
        const double want = bisect_root(slope, coarse - 1e-3, coarse + 1e-3);
        const double got = prox_huber({w}, gamma, delta)[0];
        CHECK(got == doctest::Approx(want).epsilon(1e-8));
      }
}

TEST_CASE("resolvent_quadratic examples and dense oracle") {
  CHECK(resolvent_quadratic(identity_op(1), {0.0}, 1.0, {2.0})[0] ==
        doctest::Approx(1.0));
  // b = w: w minimizes both terms
  Vector w = {1.5, -0.25};
  Vector out = resolvent_quadratic(identity_op(2), w, 0.7, w);
  CHECK(max_abs_diff(out, w) <= 1e-12);

  Rng rng(4);
  Eigen::MatrixXd r(2, 2);
  r << 1.1, -0.3, 0.4, 0.9;
  Vector b = rng.normal_vector(2), v = rng.normal_vector(2);
  const double tau = 0.8;
  Vector got = resolvent_quadratic(dense_op(r), b, tau, v);
  // dense least-squares oracle: (I + tau R^T R) y = v + tau R^T b
  Eigen::MatrixXd sys =
      Eigen::MatrixXd::Identity(2, 2) + tau * r.transpose() * r;
  Eigen::VectorXd rhs = Eigen::Map<Eigen::VectorXd>(v.data(), 2) +
                        tau * r.transpose() *
                            Eigen::Map<Eigen::VectorXd>(b.data(), 2);
  Eigen::VectorXd want = sys.ldlt().solve(rhs);
  CHECK(std::abs(got[0] - want[0]) <= 1e-10);
  CHECK(std::abs(got[1] - want[1]) <= 1e-10);
  CHECK_THROWS_AS(resolvent_quadratic(identity_op(2), b, 0.0, v),
                  std::invalid_argument);
}

TEST_CASE("metric_prox examples") {
  Rng rng(12);
  // identity metric coincides with the ordinary prox
  auto l1 = ResolventOp::l1(1.0);
  Vector x = rng.normal_vector(8);
  Vector a = metric_prox(l1, Metric::scalar(1.0, 8), x);
  Vector b = soft_threshold(x, 1.0);
  CHECK(max_abs_diff(a, b) <= 1e-14);

  // f = 1/2||.-c||^2 with Ups = tau Id: (tau w + c)/(1 + tau)
  Vector c = {2.0};
  auto quad = ResolventOp::quadratic(identity_op(1), c);
  const double tau = 3.0;
  Vector w = {0.5};
  Vector got = metric_prox(quad, Metric::scalar(tau, 1), w);
  CHECK(got[0] == doctest::Approx((tau * w[0] + c[0]) / (1.0 + tau)));

  // f = 0 is the identity for any metric
  auto zero = ResolventOp::zero();
  Eigen::MatrixXd g(3, 3);
  g << 2.0, 0.3, 0.0, 0.3, 1.5, -0.2, 0.0, -0.2, 1.0;
  Vector v = rng.normal_vector(3);
  CHECK(max_abs_diff(metric_prox(zero, Metric::dense(g), v), v) == 0.0);
}

TEST_CASE("scalar metric prox uses parameter 1/tau") {
  // prox^{tau Id}_f = prox_{f/tau}: larger tau tightens the quadratic
  auto l1 = ResolventOp::l1(1.0);
  Vector x = {3.0};
  Vector big_tau = metric_prox(l1, Metric::scalar(10.0, 1), x);
  CHECK(big_tau[0] == doctest::Approx(2.9));  // soft threshold by 1/10
}

TEST_CASE("Moreau identity: prox_f + prox_f* = Id for |.| and the box") {
  Rng rng(9);
  auto l1 = ResolventOp::l1(1.0);
  auto box = ResolventOp::box(-0.75, 2.0);
  const Metric id = Metric::scalar(1.0, 1);
  for (int t = 0; t < 1000; ++t) {
    Vector x = {rng.uniform(-6.0, 6.0)};
    Vector p = l1.resolve(id, x);
    Vector q = conjugate_resolvent(l1, 1.0, x);
    CHECK(std::abs(p[0] + q[0] - x[0]) <= 1e-12);
    Vector pb = box.resolve(id, x);
    Vector qb = conjugate_resolvent(box, 1.0, x);
    CHECK(std::abs(pb[0] + qb[0] - x[0]) <= 1e-12);
  }
}

TEST_CASE("metric Moreau identity with diagonal metric") {
  // prox^Ups_f = Id - Ups^{-1} prox^{Ups^{-1}}_{f*} Ups for f = alpha ||.||_1
  Rng rng(14);
  const int n = 6;
  const double alpha = 0.8;
  auto f = ResolventOp::l1(alpha);
  Vector d = rng.uniform_vector(n, 0.4, 2.5);
  Metric ups = Metric::diagonal(d);
  for (int t = 0; t < 200; ++t) {
    Vector x = rng.normal_vector(n, 0.0, 3.0);
    Vector lhs = metric_prox(f, ups, x);
    // right side: x - Ups^{-1} prox^{Ups^{-1}}_{f*}(Ups x), where
    // prox^{Ups^{-1}}_{f*}(y) = clamp(y) to [-alpha, alpha] componentwise
    Vector y = ups.apply(x);
    Vector clip = project_box(y, -alpha, alpha);
    Vector rhs = sub(x, ups.solve(clip));
    CHECK(max_abs_diff(lhs, rhs) <= 1e-10);
  }
}

TEST_CASE("every shipped resolvent is firmly nonexpansive in its metric") {
  Rng rng(25);
  const int n = 5;
  Eigen::MatrixXd rmat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rmat(i, j) = rng.normal();
  Eigen::MatrixXd skew = rmat - rmat.transpose();  // monotone linear operator
  std::vector<ResolventOp> ops = {
      ResolventOp::l1(0.7),
      ResolventOp::box(-1.0, 1.0),
      ResolventOp::huber(0.8, rng.normal_vector(n)),
      ResolventOp::quadratic(dense_op(rmat), rng.normal_vector(n)),
      ResolventOp::linear(skew),
      ResolventOp::zero(),
  };
  std::vector<Metric> metrics = {Metric::scalar(0.7, n),
                                 Metric::diagonal(rng.uniform_vector(n, 0.3, 2.0))};
  for (const auto& op : ops) {
    for (const auto& m : metrics) {
      int violations = 0;
      for (int t = 0; t < 100; ++t) {
        Vector x = rng.normal_vector(n, 0.0, 4.0);
        Vector y = rng.normal_vector(n, 0.0, 4.0);
        Vector jx = op.resolve(m, x);
        Vector jy = op.resolve(m, y);
        // ||Jx-Jy||^2_{M^{-1}} <= <Jx-Jy, x-y>_{M^{-1}}
        Vector dj = sub(jx, jy);
        Vector dx = sub(x, y);
        const double lhs = dot(dj, m.solve(dj));
        const double rhs = dot(dj, m.solve(dx));
        if (lhs > rhs + 1e-10) ++violations;
      }
      CHECK(violations == 0);
    }
  }
}

TEST_CASE("separable descriptors reject dense metrics; custom declares awareness") {
  Eigen::MatrixXd g(2, 2);
  g << 1.5, 0.2, 0.2, 1.1;
  Metric dense = Metric::dense(g);
  Vector x = {1.0, 2.0};
  CHECK_THROWS_AS(ResolventOp::l1(1.0).resolve(dense, x),
                  std::invalid_argument);
  CHECK_THROWS_AS(ResolventOp::box(0.0, 1.0).resolve(dense, x),
                  std::invalid_argument);
  CHECK_THROWS_AS(ResolventOp::huber(1.0).resolve(dense, x),
                  std::invalid_argument);

  auto scalar_only = ResolventOp::custom_scalar(
      [](double, const Vector& w) { return w; });
  CHECK_THROWS_AS(scalar_only.resolve(dense, x), std::invalid_argument);
  CHECK(scalar_only.resolve(Metric::scalar(2.0, 2), x) == x);

  auto aware = ResolventOp::custom_metric(
      [](const Metric&, const Vector& w) { return w; });
  CHECK(aware.resolve(dense, x) == x);
}

TEST_CASE("quadratic resolvent accepts general SPD metrics") {
  Rng rng(41);
  const int n = 4;
  Eigen::MatrixXd rmat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rmat(i, j) = rng.normal();
  Vector b = rng.normal_vector(n);
  auto quad = ResolventOp::quadratic(dense_op(rmat), b);
  Eigen::MatrixXd g(n, n);
  g.setIdentity();
  g(0, 1) = g(1, 0) = 0.3;
  Metric m = Metric::dense(g);
  Vector w = rng.normal_vector(n);
  Vector got = quad.resolve(m, w);
  // oracle: solve (Id + M R^T R) y = w + M R^T b directly
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(n, n) +
                        g * rmat.transpose() * rmat;
  Eigen::VectorXd rhs =
      Eigen::Map<Eigen::VectorXd>(w.data(), n) +
      g * rmat.transpose() * Eigen::Map<Eigen::VectorXd>(b.data(), n);
  Eigen::VectorXd want = sys.partialPivLu().solve(rhs);
  for (int i = 0; i < n; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
}
