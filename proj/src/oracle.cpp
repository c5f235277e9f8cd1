#include "splitdr/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "splitdr/prox.hpp"

namespace splitdr {

namespace {

double huber_phi(double xi, double delta) {
  return std::abs(xi) > delta ? std::abs(xi) - delta / 2.0
                              : xi * xi / (2.0 * delta);
}

double huber_dphi(double xi, double delta) {
  const double s = xi / delta;
  return s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
}

// distance from -g to alpha * d|.|(t), entries within tol of 0 sit on the kink
double l1_dist(double g, double t, double alpha, double tol) {
  if (t > tol) return std::abs(g + alpha);
  if (t < -tol) return std::abs(g - alpha);
  return std::max(std::abs(g) - alpha, 0.0);
}

struct HuberWork {
  Eigen::MatrixXd m;
  Eigen::MatrixXd minv;
  explicit HuberWork(const HuberL1Problem& p) {
    m = p.p * p.d.asDiagonal() * p.p.transpose();
    minv = p.p * p.d.cwiseInverse().asDiagonal() * p.p.transpose();
  }
};

double lasso_objective(const LassoProblem& p, const Vector& x) {
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), x.size());
  Eigen::Map<const Eigen::VectorXd> bm(p.b.data(), p.b.size());
  Eigen::VectorXd res = p.r * xm - bm;
  double l1 = 0.0;
  for (double v : x) l1 += std::abs(v);
  return p.alpha * l1 + 0.5 * res.squaredNorm();
}

double huber_objective(const HuberL1Problem& p, const HuberWork& wk,
                       const Vector& x) {
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), x.size());
  Eigen::VectorXd w = wk.m * xm;
  double val = 0.0;
  for (Eigen::Index i = 0; i < xm.size(); ++i)
    val += huber_phi(x[i] - p.z[i], p.delta);
  return val + p.alpha * w.cwiseAbs().sum();
}

double lasso_certificate(const LassoProblem& p, const Vector& x, double tol) {
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), x.size());
  Eigen::Map<const Eigen::VectorXd> bm(p.b.data(), p.b.size());
  Eigen::VectorXd g = p.r.transpose() * (p.r * xm - bm);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < xm.size(); ++i) {
    const double d = l1_dist(g[i], x[i], p.alpha, tol);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double huber_certificate(const HuberL1Problem& p, const HuberWork& wk,
                         const Vector& x, double tol) {
  const Eigen::Index n = wk.m.rows();
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), x.size());
  Eigen::VectorXd w = wk.m * xm;
  Eigen::VectorXd hg(n);
  for (Eigen::Index i = 0; i < n; ++i)
    hg[i] = huber_dphi(x[i] - p.z[i], p.delta);
  Eigen::VectorXd g = wk.minv * hg;  // gradient of the smooth part in w
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = l1_dist(g[i], w[i], p.alpha, tol);
    acc += d * d;
  }
  return std::sqrt(acc);
}

OracleResult lasso_pg(const LassoProblem& p, double tol, int max_iter) {
  const Eigen::Index n = p.r.cols();
  Eigen::MatrixXd rtr = p.r.transpose() * p.r;
  Eigen::VectorXd rtb =
      p.r.transpose() * Eigen::Map<const Eigen::VectorXd>(p.b.data(),
                                                          p.b.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rtr);
  const double lip = std::max(es.eigenvalues().maxCoeff(), 1e-30);
  const double gamma = 1.0 / lip;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  OracleResult res;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd g = rtr * x - rtb;
    Eigen::VectorXd y = x - gamma * g;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = std::abs(y[i]) - gamma * p.alpha;
      x[i] = m > 0.0 ? std::copysign(m, y[i]) : 0.0;
    }
    res.iterations = it;
    if (it % 16 == 0 || it == max_iter) {
      Vector xv(x.data(), x.data() + n);
      if (lasso_certificate(p, xv, 1e-12) <= tol) break;
    }
  }
  res.x = Vector(x.data(), x.data() + n);
  res.value = lasso_objective(p, res.x);
  res.certificate = lasso_certificate(p, res.x, 1e-12);
  return res;
}

OracleResult lasso_pattern(const LassoProblem& p, double tol, int max_iter) {
  OracleResult warm = lasso_pg(p, std::max(tol, 1e-6), std::min(max_iter, 200000));
  const Eigen::Index n = p.r.cols();
  Eigen::MatrixXd rtr = p.r.transpose() * p.r;
  Eigen::VectorXd rtb =
      p.r.transpose() * Eigen::Map<const Eigen::VectorXd>(p.b.data(),
                                                          p.b.size());
  std::vector<int> sign(n, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    if (warm.x[i] != 0.0) sign[i] = warm.x[i] > 0.0 ? 1 : -1;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int pass = 0; pass < 100; ++pass) {
    std::vector<Eigen::Index> sup;
    for (Eigen::Index i = 0; i < n; ++i)
      if (sign[i] != 0) sup.push_back(i);
    x.setZero();
    if (!sup.empty()) {
      Eigen::MatrixXd a(sup.size(), sup.size());
      Eigen::VectorXd rhs(sup.size());
      for (std::size_t ii = 0; ii < sup.size(); ++ii) {
        for (std::size_t jj = 0; jj < sup.size(); ++jj)
          a(ii, jj) = rtr(sup[ii], sup[jj]);
        rhs[ii] = rtb[sup[ii]] - p.alpha * sign[sup[ii]];
      }
      Eigen::VectorXd xs = a.colPivHouseholderQr().solve(rhs);
      for (std::size_t ii = 0; ii < sup.size(); ++ii) x[sup[ii]] = xs[ii];
    }
    Eigen::VectorXd g = rtr * x - rtb;
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (sign[i] != 0 && x[i] * sign[i] < 0.0) {
        sign[i] = 0;
        changed = true;
      } else if (sign[i] == 0 && std::abs(g[i]) > p.alpha * (1.0 + 1e-12)) {
        sign[i] = g[i] > 0.0 ? -1 : 1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  OracleResult res;
  res.x = Vector(x.data(), x.data() + n);
  res.value = lasso_objective(p, res.x);
  res.certificate = lasso_certificate(p, res.x, 1e-12);
  res.iterations = warm.iterations;
  if (res.certificate > warm.certificate) return warm;  // keep the better one
  return res;
}

OracleResult huber_pg(const HuberL1Problem& p, const HuberWork& wk, double tol,
                      int max_iter) {
  const Eigen::Index n = wk.m.rows();
  const double lmin = p.d.minCoeff();
  const double gamma = p.delta * lmin * lmin;  // 1/Lip of the smooth part
  Eigen::Map<const Eigen::VectorXd> zm(p.z.data(), p.z.size());
  Eigen::VectorXd w = wk.m * zm;  // start at x = z
  Eigen::VectorXd x = zm;
  OracleResult res;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd hg(n);
    for (Eigen::Index i = 0; i < n; ++i)
      hg[i] = huber_dphi(x[i] - p.z[i], p.delta);
    Eigen::VectorXd g = wk.minv * hg;
    Eigen::VectorXd y = w - gamma * g;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double m = std::abs(y[i]) - gamma * p.alpha;
      w[i] = m > 0.0 ? std::copysign(m, y[i]) : 0.0;
    }
    x = wk.minv * w;
    res.iterations = it;
    if (it % 16 == 0 || it == max_iter) {
      Vector xv(x.data(), x.data() + n);
      if (huber_certificate(p, wk, xv, 1e-12) <= tol) break;
    }
  }
  res.x = Vector(x.data(), x.data() + n);
  res.value = huber_objective(p, wk, res.x);
  res.certificate = huber_certificate(p, wk, res.x, 1e-12);
  return res;
}

// One exact solve of the piecewise-linear stationarity system under a fixed
// pattern: regions of x - z, support and signs of w = Mx. Unknowns (x, s_Z).
bool huber_pattern_solve(const HuberL1Problem& p, const HuberWork& wk,
                         const std::vector<int>& region,
                         const std::vector<int>& sign, Eigen::VectorXd& x,
                         Eigen::VectorXd& s_full) {
  const Eigen::Index n = wk.m.rows();
  std::vector<Eigen::Index> zc;  // indices with (Mx) pinned to zero
  for (Eigen::Index i = 0; i < n; ++i)
    if (sign[i] == 0) zc.push_back(i);
  const Eigen::Index nz = static_cast<Eigen::Index>(zc.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + nz, n + nz);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + nz);
  Eigen::VectorXd msig = Eigen::VectorXd::Zero(n);
  {
    Eigen::VectorXd sig = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) sig[i] = sign[i];
    msig = wk.m * sig;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (region[i] == 0) {  // quadratic piece
      a(i, i) = 1.0 / p.delta;
      rhs[i] = p.z[i] / p.delta - p.alpha * msig[i];
    } else {  // linear tails: gradient is fixed at +-1
      rhs[i] = -static_cast<double>(region[i]) - p.alpha * msig[i];
    }
    for (Eigen::Index jj = 0; jj < nz; ++jj)
      a(i, n + jj) = p.alpha * wk.m(i, zc[jj]);
  }
  for (Eigen::Index ii = 0; ii < nz; ++ii)
    for (Eigen::Index j = 0; j < n; ++j) a(n + ii, j) = wk.m(zc[ii], j);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) return false;
  Eigen::VectorXd sol = lu.solve(rhs);
  x = sol.head(n);
  s_full = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) s_full[i] = sign[i];
  for (Eigen::Index ii = 0; ii < nz; ++ii) s_full[zc[ii]] = sol[n + ii];
  return true;
}

OracleResult huber_pattern(const HuberL1Problem& p, const HuberWork& wk,
                           double tol, int max_iter) {
  OracleResult best = huber_pg(p, wk, std::max(tol, 1e-6),
                               std::min(max_iter, 300000));
  const Eigen::Index n = wk.m.rows();
  Eigen::Map<const Eigen::VectorXd> bx(best.x.data(), best.x.size());
  Eigen::VectorXd x = bx;
  Eigen::VectorXd w = wk.m * x;

  std::vector<int> region(n), sign(n);
  auto classify = [&](const Eigen::VectorXd& xc, const Eigen::VectorXd& wc,
                      double band) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = xc[i] - p.z[i];
      region[i] = xi > p.delta ? 1 : (xi < -p.delta ? -1 : 0);
      sign[i] = std::abs(wc[i]) <= band ? 0 : (wc[i] > 0.0 ? 1 : -1);
    }
  };
  classify(x, w, 1e-9 * (1.0 + w.cwiseAbs().maxCoeff()));

  Eigen::VectorXd s_full;
  for (int pass = 0; pass < 60; ++pass) {
    Eigen::VectorXd xs;
    if (!huber_pattern_solve(p, wk, region, sign, xs, s_full)) break;
    Vector xv(xs.data(), xs.data() + n);
    const double cert = huber_certificate(p, wk, xv, 1e-9);
    if (cert < best.certificate) {
      best.x = xv;
      best.certificate = cert;
      best.value = huber_objective(p, wk, xv);
    }
    // next pattern from this solution
    Eigen::VectorXd ws = wk.m * xs;
    std::vector<int> nregion(n), nsign(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = xs[i] - p.z[i];
      nregion[i] = xi > p.delta ? 1 : (xi < -p.delta ? -1 : 0);
      if (sign[i] != 0)
        nsign[i] = ws[i] * sign[i] > 0.0 ? sign[i] : 0;
      else
        nsign[i] = std::abs(s_full[i]) > 1.0 ? (s_full[i] > 0.0 ? 1 : -1) : 0;
    }
    if (nregion == region && nsign == sign) break;
    region = std::move(nregion);
    sign = std::move(nsign);
  }
  return best;
}

}  // namespace

double oracle_objective(const OracleProblem& prob, const Vector& x) {
  if (const auto* p = std::get_if<LassoProblem>(&prob))
    return lasso_objective(*p, x);
  const auto& p = std::get<HuberL1Problem>(prob);
  return huber_objective(p, HuberWork(p), x);
}

double subgradient_check(const OracleProblem& prob, const Vector& x,
                         double tol) {
  if (const auto* p = std::get_if<LassoProblem>(&prob))
    return lasso_certificate(*p, x, tol);
  const auto& p = std::get<HuberL1Problem>(prob);
  return huber_certificate(p, HuberWork(p), x, tol);
}

OracleResult oracle_solve(const OracleProblem& prob, const OracleConfig& cfg) {
  OracleResult res;
  if (const auto* lp = std::get_if<LassoProblem>(&prob)) {
    res = cfg.method == OracleMethod::dense_kkt
              ? lasso_pattern(*lp, cfg.tol, cfg.max_iter)
              : lasso_pg(*lp, cfg.tol, cfg.max_iter);
  } else {
    const auto& hp = std::get<HuberL1Problem>(prob);
    HuberWork wk(hp);
    res = cfg.method == OracleMethod::dense_kkt
              ? huber_pattern(hp, wk, cfg.tol, cfg.max_iter)
              : huber_pg(hp, wk, cfg.tol, cfg.max_iter);
  }
  if (res.certificate > 10.0 * cfg.tol)
    throw std::runtime_error("oracle_solve: certification failed, residual " +
                             std::to_string(res.certificate));
  return res;
}

double finite_difference_check(
    const std::function<double(const Vector&)>& f,
    const std::function<Vector(const Vector&)>& grad, const Vector& x,
    double h) {
  Vector g = grad(x);
  Vector xp = x, xm = x;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fd = (f(xp) - f(xm)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / (1.0 + std::abs(g[i])));
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return worst;
}

double composite_kkt_certificate(const Vector& smooth_grad,
                                 const std::vector<CertBlock>& blocks,
                                 const Vector& x, double tol) {
  Vector acc = smooth_grad;
  for (const auto& blk : blocks) {
    Vector lt = blk.adjoint(blk.multiplier);
    kernels::axpby(1.0, acc.data(), 1.0, lt.data(), acc.data(), acc.size());
  }
  double cert = norm(acc);
  for (const auto& blk : blocks) {
    Vector t = blk.apply(x);
    double d2 = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double v = blk.multiplier[i];
      double d = 0.0;
      if (blk.kind == CertBlock::Kind::l1) {
        d = l1_dist(-v, t[i], blk.alpha, tol);
      } else {
        if (t[i] < blk.lo - tol)
          d = blk.lo - t[i];
        else if (t[i] > blk.hi + tol)
          d = t[i] - blk.hi;
        else if (t[i] <= blk.lo + tol)
          d = std::max(v, 0.0);  // dist(v, (-inf, 0])
        else if (t[i] >= blk.hi - tol)
          d = std::max(-v, 0.0);  // dist(v, [0, +inf))
        else
          d = std::abs(v);
      }
      d2 += d * d;
    }
    cert += std::sqrt(d2);
  }
  return cert;
}

std::pair<Vector, Vector> lq_kkt_pair(const Eigen::MatrixXd& ra,
                                      const Vector& ba,
                                      const Eigen::MatrixXd& rb,
                                      const Vector& bb,
                                      const Eigen::MatrixXd& l) {
  Eigen::MatrixXd qa = ra.transpose() * ra;
  Eigen::MatrixXd qb = rb.transpose() * rb;
  Eigen::VectorXd rtba =
      ra.transpose() * Eigen::Map<const Eigen::VectorXd>(ba.data(), ba.size());
  Eigen::VectorXd rtbb =
      rb.transpose() * Eigen::Map<const Eigen::VectorXd>(bb.data(), bb.size());
  Eigen::MatrixXd sys = qa + l.transpose() * qb * l;
  Eigen::VectorXd rhs = rtba + l.transpose() * rtbb;
  Eigen::VectorXd xh = sys.ldlt().solve(rhs);
  Eigen::VectorXd uh = qb * (l * xh) - rtbb;
  return {Vector(xh.data(), xh.data() + xh.size()),
          Vector(uh.data(), uh.data() + uh.size())};
}

double improvement_pct(double f_ref, double f_value) {
  const double denom = std::max(std::abs(f_ref), 1e-12);
  return (f_ref - f_value) * 100.0 / denom;
}

}  // namespace splitdr
