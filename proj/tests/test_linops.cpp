#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include "splitdr/experiments.hpp"
#include "splitdr/linops.hpp"
#include "splitdr/rng.hpp"

using namespace splitdr;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Metric random_spd_metric(int n, Rng& rng, double shift = 0.5) {
  Eigen::MatrixXd g = random_matrix(n, n, rng);
  Eigen::MatrixXd m = g * g.transpose() / n +
                      shift * Eigen::MatrixXd::Identity(n, n);
  return Metric::dense(m);
}

}  // namespace

TEST_CASE("adjoint_check: identity, dense transpose, grad/div pairs") {
  CHECK(adjoint_check(identity_op(5), 10, 1) == 0.0);

  Rng rng(5);
  Eigen::MatrixXd a = random_matrix(3, 2, rng);
  CHECK(adjoint_check(dense_op(a), 20, 2) <= 1e-12);

  CHECK(adjoint_check(grad2d_op(8, 8), 20, 3) <= 1e-12);
}

TEST_CASE("adjoint_check flags a wrong adjoint") {
  LinearOp bad = identity_op(4);
  bad.adj = [](const double* in, double* out) {
    for (int i = 0; i < 4; ++i) out[i] = 2.0 * in[i];
  };
  CHECK(adjoint_check(bad, 5, 7) > 1e-3);
}

TEST_CASE("linearity of shipped operators on random combinations") {
  Rng rng(17);
  auto g = grad2d_op(6, 7);
  Vector x = rng.normal_vector(42), y = rng.normal_vector(42);
  const double a = 1.3, b = -0.7;
  Vector lhs = g.apply(axpby(a, x, b, y));
  Vector rhs = axpby(a, g.apply(x), b, g.apply(y));
  CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * (1.0 + norm(rhs)));
}

TEST_CASE("power_iteration: identity, 1-D difference, materialized oracle") {
  auto id5 = power_iteration(identity_op(5), 1e-12, 1000, 9);
  CHECK(id5.converged);
  CHECK(id5.value == doctest::Approx(1.0).epsilon(1e-10));

  // D = [-1 1]capture: ||D||^2 = 2 (dense SVD oracle gives sqrt(2))
  Eigen::MatrixXd d(1, 2);
  d << -1.0, 1.0;
  auto r = power_iteration(dense_op(d), 1e-14, 100000, 10);
  CHECK(r.converged);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  const double oracle = svd.singularValues()[0] * svd.singularValues()[0];
  CHECK(oracle == doctest::Approx(2.0));
  CHECK(r.value == doctest::Approx(oracle).epsilon(1e-9));

  // random 6x4 against the SVD oracle
  Rng rng(21);
  Eigen::MatrixXd m = random_matrix(6, 4, rng);
  auto rm = power_iteration(dense_op(m), 1e-13, 200000, 11);
  Eigen::JacobiSVD<Eigen::MatrixXd> svdm(m);
  const double want = svdm.singularValues()[0] * svdm.singularValues()[0];
  CHECK(rm.value == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("power_iteration reports non-convergence with best estimate") {
  auto r = power_iteration(grad2d_op(16, 16), 1e-16, 3, 9);
  CHECK(!r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.value > 0.0);
}

TEST_CASE("power_iteration fused normal path agrees with fwd/adj path") {
  Rng rng(2);
  LinearOp g = grad2d_op(12, 9);
  LinearOp no_normal = g;
  no_normal.normal = nullptr;
  auto a = power_iteration(g, 1e-11, 100000, 77);
  auto b = power_iteration(no_normal, 1e-11, 100000, 77);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-8));
}

TEST_CASE("check_metric_condition: identity boundary and violation") {
  auto id = identity_op(4);
  auto rep = check_metric_condition(Metric::scalar(1.0, 4),
                                    Metric::scalar(1.0, 4), id, 1e-9);
  CHECK(rep.is_monotone);
  CHECK(rep.method == ConditionMethod::dense_eigen);
  CHECK(std::abs(rep.margin) <= 1e-12);

  auto bad = check_metric_condition(Metric::scalar(2.0, 4),
                                    Metric::scalar(1.0, 4), id, 1e-9);
  CHECK(!bad.is_monotone);
}

TEST_CASE("check_metric_condition: TV boundary metrics on an 8x8 grid") {
  const int n = 64;
  LinearOp grad = grad2d_op(8, 8);
  Eigen::MatrixXd gm = grad.materialize();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gm.transpose() * gm);
  const double gnorm2 = es.eigenvalues().maxCoeff();

  const double tau = 0.9;
  const double sigma2 = 0.3;
  const double sigma1 = (1.0 / tau - sigma2) / gnorm2;  // exact boundary
  // stacked operator (grad; Id) with blockdiag(sigma1, sigma2)
  std::vector<LinearOp> blocks = {grad, identity_op(n)};
  LinearOp stacked = stack_ops(blocks);
  Vector diag;
  diag.insert(diag.end(), 2 * n, sigma1);
  diag.insert(diag.end(), n, sigma2);
  auto rep = check_metric_condition(Metric::scalar(tau, n),
                                    Metric::diagonal(diag), stacked, 1e-8);
  CHECK(rep.method == ConditionMethod::dense_eigen);
  CHECK(rep.is_monotone);
  CHECK(std::abs(rep.margin) <= 1e-8);
}

TEST_CASE("dense and power margins agree when the primal metric is Id") {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform(0.0, 12.0));
    const int m = 3 + static_cast<int>(rng.uniform(0.0, 10.0));
    Eigen::MatrixXd lm = random_matrix(m, n, rng);
    LinearOp l = dense_op(0.3 * lm);
    Metric ups = Metric::scalar(1.0, n);
    Metric sig = random_spd_metric(m, rng);
    auto dense = check_metric_condition(ups, sig, l, 1e-9);
    REQUIRE(dense.method == ConditionMethod::dense_eigen);

    // same computation through the power-iteration path
    LinearOp c;
    c.in_dim = n;
    c.out_dim = m;
    c.fwd = [sig, l](const double* in, double* out) {
      Vector x(in, in + l.in_dim);
      Vector y = sig.sqrt_apply(l.apply(x));
      std::copy(y.begin(), y.end(), out);
    };
    c.adj = [sig, l](const double* in, double* out) {
      Vector w(in, in + l.out_dim);
      Vector y = l.apply_adjoint(sig.sqrt_apply(w));
      std::copy(y.begin(), y.end(), out);
    };
    auto pi = power_iteration(c, 1e-12, 400000, 5);
    const double power_margin = 1.0 - pi.value;
    CHECK(std::abs(dense.margin - power_margin) <= 1e-6);
  }
}

TEST_CASE("metric condition equivalence: primal and dual forms agree") {
  Rng rng(77);
  int agree = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 6.0));
    const int m = 2 + static_cast<int>(rng.uniform(0.0, 6.0));
    LinearOp l = dense_op(random_matrix(m, n, rng) * rng.uniform(0.1, 1.2));
    Metric ups = rng.uniform() < 0.5 ? Metric::scalar(rng.uniform(0.1, 2.0), n)
                                     : random_spd_metric(n, rng);
    Metric sig = rng.uniform() < 0.5 ? Metric::scalar(rng.uniform(0.1, 2.0), m)
                                     : random_spd_metric(m, rng);
    LinearOp lt;  // adjoint as a standalone operator
    lt.in_dim = m;
    lt.out_dim = n;
    lt.fwd = l.adj;
    lt.adj = l.fwd;
    auto primal = check_metric_condition(ups, sig, l, 1e-9);
    auto dual = check_metric_condition(sig, ups, lt, 1e-9);
    if (primal.is_monotone == dual.is_monotone) ++agree;
  }
  CHECK(agree == 50);
}

TEST_CASE("cocoercivity constant formula and sampled block inequality") {
  CHECK(cocoercivity_constant(Metric::scalar(1.0, 3), Metric::scalar(1.0, 2)) ==
        doctest::Approx(0.5));
  CHECK(cocoercivity_constant(Metric::scalar(1.0, 3), Metric::scalar(3.0, 2)) ==
        doctest::Approx(0.75));

  // <w, Vw> >= beta ||Vw||^2 for tau=0.5, sigma=1, ||L|| <= 1
  Rng rng(99);
  const int n = 5, m = 4;
  Eigen::MatrixXd lm = random_matrix(m, n, rng);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lm);
  lm /= (svd.singularValues()[0] * 1.01);
  Metric ups = Metric::scalar(0.5, n);
  Metric sig = Metric::scalar(1.0, m);
  const double beta = cocoercivity_constant(ups, sig);
  CHECK(beta == doctest::Approx(0.5 / 1.5));
  Eigen::MatrixXd v = block_v_matrix(ups, sig, dense_op(lm));
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd w(n + m);
    for (int i = 0; i < n + m; ++i) w[i] = rng.normal();
    Eigen::VectorXd vw = v * w;
    CHECK(w.dot(vw) >= beta * vw.squaredNorm() - 1e-10);
  }
}

TEST_CASE("block operator lower bound from the monotone defect") {
  // <(x,u), V(x,u)> >= max(||Ups^{-1}x - L*u||^2_Ups, ||Sig^{-1}u - Lx||^2_Sig)
  Rng rng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3, m = 3;
    Eigen::MatrixXd lm = random_matrix(m, n, rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lm);
    const double tau = rng.uniform(0.2, 1.5);
    double smax = svd.singularValues()[0];
    const double sigma = 0.99 / (tau * smax * smax);
    Metric ups = Metric::scalar(tau, n);
    Metric sig = Metric::scalar(sigma, m);
    LinearOp l = dense_op(lm);
    auto rep = check_metric_condition(ups, sig, l, 1e-12);
    REQUIRE(rep.is_monotone);
    for (int s = 0; s < 10; ++s) {
      Vector x = rng.normal_vector(n), u = rng.normal_vector(m);
      Vector vx = sub(ups.solve(x), l.apply_adjoint(u));
      Vector vu = sub(sig.solve(u), l.apply(x));
      const double lhs = dot(x, vx) + dot(u, vu);
      const double r1 = dot(vx, ups.apply(vx));
      const double r2 = dot(vu, sig.apply(vu));
      CHECK(lhs >= std::max(r1, r2) - 1e-10);
    }
  }
}

TEST_CASE("metric algebra: solve, sqrt, inverse on all kinds") {
  Rng rng(31);
  const int n = 6;
  std::vector<Metric> metrics;
  metrics.push_back(Metric::scalar(2.5, n));
  metrics.push_back(Metric::diagonal(rng.uniform_vector(n, 0.5, 3.0)));
  metrics.push_back(random_spd_metric(n, rng));
  for (const auto& m : metrics) {
    Vector x = rng.normal_vector(n);
    CHECK(max_abs_diff(m.solve(m.apply(x)), x) <= 1e-10 * (1.0 + norm(x)));
    CHECK(max_abs_diff(m.sqrt_apply(m.sqrt_apply(x)), m.apply(x)) <=
          1e-10 * (1.0 + norm(m.apply(x))));
    CHECK(max_abs_diff(m.inverse().apply(x), m.solve(x)) <=
          1e-10 * (1.0 + norm(x)));
    // symmetry on random pairs
    Vector y = rng.normal_vector(n);
    CHECK(dot(m.apply(x), y) == doctest::Approx(dot(x, m.apply(y))));
    // strong monotonicity
    CHECK(dot(x, m.apply(x)) >=
          m.strong_monotonicity() * norm_sq(x) - 1e-10);
  }
}

TEST_CASE("non-SPD dense metric is rejected") {
  Eigen::MatrixXd bad = -Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(Metric::dense(bad), std::invalid_argument);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(Metric::dense(indef), std::invalid_argument);
}

TEST_CASE("vector invariant: operations keep entries finite") {
  Rng rng(8);
  Vector x = rng.normal_vector(32);
  auto g = grad2d_op(4, 8);
  CHECK(all_finite(g.apply(x)));
  CHECK(all_finite(g.apply_adjoint(rng.normal_vector(64))));
}
