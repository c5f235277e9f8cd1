#include "splitdr/equivalence.hpp"

#include <Eigen/SVD>

#include "splitdr/rng.hpp"

namespace splitdr {

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

Vector to_vec(const Eigen::VectorXd& v) {
  return Vector(v.data(), v.data() + v.size());
}

}  // namespace

double equiv_sdr_pds(std::uint64_t seed, int dim, int iters) {
  Rng rng(seed);
  const int n = dim, m = dim;
  Eigen::MatrixXd lm = random_matrix(m, n, rng);
  lm /= spectral_norm(lm);
  const double tau = rng.uniform(0.4, 1.2);
  const double sigma = 0.95 / tau;
  Eigen::MatrixXd rb =
      random_matrix(m, m, rng) + 2.0 * Eigen::MatrixXd::Identity(m, m);
  auto prob = SdrProblem::make(
      ResolventOp::l1(rng.uniform(0.1, 0.8)),
      ResolventOp::quadratic(dense_op(rb), rng.normal_vector(m)),
      dense_op(lm), Metric::scalar(tau, n), Metric::scalar(sigma, m));

  Vector x0 = rng.normal_vector(n), u0 = rng.normal_vector(m);
  Vector w = add(prob.l.apply(x0), prob.sig.solve(u0));
  Vector v = prob.sig.apply(sub(w, prob.b.resolve(prob.sig_inv, w)));

  SdrState s = SdrState::start(prob, x0, u0);
  Vector x = x0;
  double worst = 0.0;
  for (int it = 0; it < iters; ++it) {
    s = sdr_step(prob, s);
    auto [nx, nv] = pds_step(prob, x, v);
    x = std::move(nx);
    v = std::move(nv);
    worst = std::max(worst, max_abs_diff(s.x, x));
  }
  return worst;
}

double equiv_sdr_drs(std::uint64_t seed, int primal_dim, int dual_dim,
                     int iters) {
  Rng rng(seed);
  const int n = primal_dim, m = dual_dim;  // requires m <= n (ran L = G)
  Eigen::MatrixXd lm = random_matrix(m, n, rng);
  lm /= spectral_norm(lm);
  const double tau = rng.uniform(0.5, 1.0);
  Metric ups = Metric::scalar(tau, n);
  Eigen::MatrixXd lul = lm * ups.as_matrix() * lm.transpose();
  Metric sig = Metric::dense(lul.inverse());
  const double beta = rng.uniform(0.5, 2.0);
  Eigen::MatrixXd bmat = beta * Eigen::MatrixXd::Identity(m, m);

  auto prob =
      SdrProblem::make(ResolventOp::l1(rng.uniform(0.2, 0.7)),
                       ResolventOp::linear(bmat), dense_op(lm), ups, sig);
  Vector x0 = rng.normal_vector(n), u0 = rng.normal_vector(m);

  SdrState s = SdrState::start(prob, x0, u0);
  std::vector<Vector> zs;
  for (int it = 0; it < iters; ++it) {
    s = sdr_step(prob, s);
    zs.push_back(s.last_z);  // z_{it}
  }

  auto jbl = make_composed_resolvent(prob.l, bmat, ups);
  Vector z = zs.front();
  double worst = 0.0;
  for (int it = 1; it < iters; ++it) {
    z = drs_step(prob.a, jbl, ups, z);
    worst = std::max(worst, max_abs_diff(z, zs[it]));
  }
  return worst;
}

double equiv_sadmm_sdr(std::uint64_t seed, int dim, int iters) {
  Rng rng(seed);
  const int n = dim;
  Eigen::MatrixXd gg = random_matrix(n, n, rng);
  Eigen::MatrixXd qg =
      gg * gg.transpose() / n + 0.5 * Eigen::MatrixXd::Identity(n, n);
  Vector cg = rng.normal_vector(n);
  const double alpha = rng.uniform(0.2, 0.8);
  Eigen::MatrixXd tm =
      random_matrix(n, n, rng) + 2.0 * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd km = random_matrix(n, n, rng);
  km /= spectral_norm(km);
  const double tau = rng.uniform(0.5, 1.2);
  const double sigma = 0.9 / tau;

  auto qg_sh = std::make_shared<Eigen::MatrixXd>(qg);
  auto cg_sh = std::make_shared<Vector>(cg);
  auto tm_sh = std::make_shared<Eigen::MatrixXd>(tm);

  // J_{mB} for B = d(g* o -T*): solve (Qg + m T^T T) p = -(cg + T^T w),
  // then J_{mB}(w) = w + m T p.
  auto b_dual = ResolventOp::custom_scalar(
      [qg_sh, cg_sh, tm_sh](double m, const Vector& w) {
        Eigen::MatrixXd sys = *qg_sh + m * tm_sh->transpose() * (*tm_sh);
        Eigen::VectorXd rhs =
            -(Eigen::Map<const Eigen::VectorXd>(cg_sh->data(), cg_sh->size()) +
              tm_sh->transpose() *
                  Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()));
        Eigen::VectorXd p = sys.ldlt().solve(rhs);
        Eigen::VectorXd y =
            Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()) +
            m * (*tm_sh) * p;
        return to_vec(y);
      });
  // A = d f* for f = alpha ||.||_1, so J_{Ups A} clamps to [-alpha, alpha]
  auto a_dual = ResolventOp::box(-alpha, alpha);
  LinearOp kt;  // L = K*
  {
    LinearOp k = dense_op(km);
    kt.in_dim = n;
    kt.out_dim = n;
    kt.fwd = k.adj;
    kt.adj = k.fwd;
  }
  auto sdr_prob = SdrProblem::make(a_dual, b_dual, kt, Metric::scalar(tau, n),
                                   Metric::scalar(sigma, n));

  // SADMM instance for min g(p) + f(KTp)
  auto p_solver = [qg_sh, cg_sh, tm_sh, sigma](const Vector& r,
                                               const Vector&) {
    Eigen::MatrixXd sys =
        *qg_sh + tm_sh->transpose() * (*tm_sh) / sigma;
    Eigen::VectorXd rhs =
        tm_sh->transpose() *
            Eigen::Map<const Eigen::VectorXd>(r.data(), r.size()) / sigma -
        Eigen::Map<const Eigen::VectorXd>(cg_sh->data(), cg_sh->size());
    Eigen::VectorXd p = sys.ldlt().solve(rhs);
    return to_vec(p);
  };
  auto sadmm_prob = SadmmProblem::make(p_solver, ResolventOp::l1(alpha),
                                       dense_op(tm), dense_op(km),
                                       Metric::scalar(tau, n),
                                       Metric::scalar(sigma, n));

  double worst = 0.0;

  // (i) SDR reduces to SADMM
  {
    Vector x0 = rng.normal_vector(n), u0 = rng.normal_vector(n);
    std::vector<Vector> xs = {x0}, vs;
    SdrState s = SdrState::start(sdr_prob, x0, u0);
    for (int it = 0; it < iters; ++it) {
      s = sdr_step(sdr_prob, s);
      xs.push_back(s.x);
      vs.push_back(s.last_v);
    }
    // start SADMM at index 1 through the mapping
    Eigen::VectorXd tp1 =
        -Eigen::Map<const Eigen::VectorXd>(vs[0].data(), n);
    Eigen::VectorXd p1 = tm.fullPivLu().solve(tp1);
    Vector q1 = sub(scaled(sub(xs[0], xs[1]), 1.0 / tau),
                    dense_op(km).apply(vs[0]));
    SadmmState st = SadmmState::start(sadmm_prob, to_vec(p1), q1, xs[1]);
    for (int idx = 1; idx < iters; ++idx) {
      // compare (Tp_n, q_n, x_n) against the mapped SDR quantities
      Vector tp_mapped = scaled(vs[idx - 1], -1.0);
      worst = std::max(worst, max_abs_diff(st.tp, tp_mapped));
      worst = std::max(worst, max_abs_diff(st.x, xs[idx]));
      if (idx >= 2) {
        Vector q_mapped = sub(scaled(sub(xs[idx - 1], xs[idx]), 1.0 / tau),
                              dense_op(km).apply(vs[idx - 1]));
        worst = std::max(worst, max_abs_diff(st.q, q_mapped));
      }
      st = sadmm_step(sadmm_prob, st);
    }
  }

  // (ii) SADMM reduces to SDR
  {
    Vector zeros(n, 0.0);
    SadmmState st = SadmmState::start(sadmm_prob, zeros, zeros, zeros);
    std::vector<Vector> xs, us;
    for (int it = 0; it < iters; ++it) {
      st = sadmm_step(sadmm_prob, st);
      xs.push_back(st.x);  // x_{it+1}
      us.push_back(st.u);  // u_{it+1}
    }
    SdrState s = SdrState::start(sdr_prob, xs[0], us[0]);
    for (int it = 1; it < iters; ++it) {
      s = sdr_step(sdr_prob, s);
      worst = std::max(worst, max_abs_diff(s.x, xs[it]));
      worst = std::max(worst, max_abs_diff(s.u, us[it]));
    }
  }
  return worst;
}

}  // namespace splitdr
