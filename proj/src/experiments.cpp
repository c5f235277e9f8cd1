#include "splitdr/experiments.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "splitdr/prox.hpp"
#include "splitdr/rng.hpp"

namespace splitdr {

namespace {

void require_grid(int n1, int n2) {
  if (n1 < 2 || n2 < 2)
    throw std::invalid_argument("grad2d/div2d: grid dims must be >= 2");
}

}  // namespace

void grad2d(const double* x, double* out, int n1, int n2) {
  require_grid(n1, n2);
  const std::size_t n = static_cast<std::size_t>(n1) * n2;
  double* d1 = out;      // horizontal differences
  double* d2 = out + n;  // vertical differences
  kernels::axpby(1.0, x + 1, -1.0, x, d1, n - 1);
  for (int i = 0; i < n1; ++i)
    d1[static_cast<std::size_t>(i) * n2 + n2 - 1] = 0.0;
  kernels::axpby(1.0, x + n2, -1.0, x, d2, n - n2);
  std::fill(d2 + (n - n2), d2 + n, 0.0);
}

void div2d(const double* v, double* out, int n1, int n2) {
  require_grid(n1, n2);
  const std::size_t n = static_cast<std::size_t>(n1) * n2;
  const double* v1 = v;
  const double* v2 = v + n;
  // D1^T: out[k] = v1[k-1] - v1[k] in-row, with first/last column fixups.
  kernels::axpby(1.0, v1, -1.0, v1 + 1, out + 1, n - 1);
  out[0] = -v1[0];
  for (int i = 1; i < n1; ++i) {
    const std::size_t k = static_cast<std::size_t>(i) * n2;
    out[k] = -v1[k];
  }
  for (int i = 0; i < n1; ++i) {
    const std::size_t k = static_cast<std::size_t>(i) * n2 + n2 - 1;
    out[k] += v1[k];
  }
  // += D2^T: v2[m-n2] - v2[m] for interior rows, -v2 on the first row,
  // +v2[m-n2] on the last.
  thread_local Vector tmp;
  tmp.resize(n - n2);
  kernels::axpby(1.0, v2, -1.0, v2 + n2, tmp.data(), n - n2);
  kernels::axpby(1.0, out + n2, 1.0, tmp.data(), out + n2, n - n2);
  kernels::axpby(1.0, out + (n - n2), 1.0, v2 + (n - n2), out + (n - n2), n2);
  kernels::axpby(1.0, out, -1.0, v2, out, n2);
}

Vector grad2d(const Vector& img, int n1, int n2) {
  require_dim(img, static_cast<std::size_t>(n1) * n2, "grad2d");
  Vector out(2 * img.size());
  grad2d(img.data(), out.data(), n1, n2);
  return out;
}

Vector div2d(const Vector& v, int n1, int n2) {
  require_dim(v, 2 * static_cast<std::size_t>(n1) * n2, "div2d");
  Vector out(v.size() / 2);
  div2d(v.data(), out.data(), n1, n2);
  return out;
}

LinearOp grad2d_op(int n1, int n2) {
  require_grid(n1, n2);
  LinearOp op;
  op.in_dim = n1 * n2;
  op.out_dim = 2 * n1 * n2;
  op.fwd = [n1, n2](const double* in, double* out) {
    grad2d(in, out, n1, n2);
  };
  op.adj = [n1, n2](const double* in, double* out) {
    div2d(in, out, n1, n2);
  };
  op.normal = [n1, n2](const double* in, double* out) {
    kernels::laplacian2d_neumann(in, out, n1, n2);
  };
  return op;
}

namespace {

std::mutex& fftw_plan_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct FftBlur::Impl {
  int n1 = 0, n2 = 0;
  Vector taps;
  Vector ev;                   // full n1*n2 spectrum of R
  std::vector<double> ev_half; // r2c half-spectrum layout, n1*(n2/2+1)
  double* rbuf = nullptr;
  fftw_complex* cbuf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  mutable std::mutex mu;

  ~Impl() {
    std::scoped_lock lock(fftw_plan_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (rbuf) fftw_free(rbuf);
    if (cbuf) fftw_free(cbuf);
  }

  // out = F^{-1}(diag(mult) F(in)), with the r2c normalization folded in.
  void spectral_multiply(const double* in, double* out,
                         const std::vector<double>& mult) const {
    const std::size_t n = static_cast<std::size_t>(n1) * n2;
    const std::size_t nh = static_cast<std::size_t>(n1) * (n2 / 2 + 1);
    std::scoped_lock lock(mu);
    std::copy(in, in + n, rbuf);
    fftw_execute(fwd);
    for (std::size_t i = 0; i < nh; ++i) {
      cbuf[i][0] *= mult[i];
      cbuf[i][1] *= mult[i];
    }
    fftw_execute(bwd);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rbuf[i] * scale;
  }
};

FftBlur::FftBlur(int n1, int n2, int size, double stddev) {
  if (size % 2 == 0)
    throw std::invalid_argument("FftBlur: kernel size must be odd");
  if (stddev <= 0.0) throw std::invalid_argument("FftBlur: stddev > 0");
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("FftBlur: bad grid");
  auto im = std::make_shared<Impl>();
  im->n1 = n1;
  im->n2 = n2;
  const int h = (size - 1) / 2;
  im->taps.resize(static_cast<std::size_t>(size) * size);
  double sum = 0.0;
  for (int a = -h; a <= h; ++a)
    for (int b = -h; b <= h; ++b) {
      const double w = std::exp(-(a * a + b * b) / (2.0 * stddev * stddev));
      im->taps[static_cast<std::size_t>(a + h) * size + (b + h)] = w;
      sum += w;
    }
  for (auto& t : im->taps) t /= sum;

  const std::size_t n = static_cast<std::size_t>(n1) * n2;
  const std::size_t nh = static_cast<std::size_t>(n1) * (n2 / 2 + 1);
  im->rbuf = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  im->cbuf =
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nh));
  {
    std::scoped_lock lock(fftw_plan_mutex());
    im->fwd = fftw_plan_dft_r2c_2d(n1, n2, im->rbuf, im->cbuf, FFTW_ESTIMATE);
    im->bwd = fftw_plan_dft_c2r_2d(n1, n2, im->cbuf, im->rbuf, FFTW_ESTIMATE);
  }
  if (!im->fwd || !im->bwd) throw std::runtime_error("FftBlur: planning failed");

  // Circularly embed the kernel at the origin and transform; the kernel is
  // even, so the spectrum is real.
  std::fill(im->rbuf, im->rbuf + n, 0.0);
  for (int a = -h; a <= h; ++a)
    for (int b = -h; b <= h; ++b) {
      const int i = ((a % n1) + n1) % n1;
      const int j = ((b % n2) + n2) % n2;
      im->rbuf[static_cast<std::size_t>(i) * n2 + j] +=
          im->taps[static_cast<std::size_t>(a + h) * size + (b + h)];
    }
  fftw_execute(im->fwd);
  im->ev_half.resize(nh);
  for (std::size_t i = 0; i < nh; ++i) im->ev_half[i] = im->cbuf[i][0];

  im->ev.resize(n);
  const int half = n2 / 2;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      if (j <= half)
        im->ev[static_cast<std::size_t>(i) * n2 + j] =
            im->ev_half[static_cast<std::size_t>(i) * (half + 1) + j];
      else
        im->ev[static_cast<std::size_t>(i) * n2 + j] =
            im->ev_half[static_cast<std::size_t>((n1 - i) % n1) * (half + 1) +
                        (n2 - j)];
    }
  impl_ = std::move(im);
}

int FftBlur::n1() const { return impl_->n1; }
int FftBlur::n2() const { return impl_->n2; }
const Vector& FftBlur::spectrum() const { return impl_->ev; }
const Vector& FftBlur::kernel_taps() const { return impl_->taps; }

LinearOp FftBlur::op() const {
  auto im = impl_;
  LinearOp op;
  op.in_dim = op.out_dim = im->n1 * im->n2;
  auto apply = [im](const double* in, double* out) {
    im->spectral_multiply(in, out, im->ev_half);
  };
  op.fwd = apply;
  op.adj = apply;  // even kernel: R is symmetric
  return op;
}

ResolventOp FftBlur::data_resolvent(Vector b) const {
  auto im = impl_;
  require_dim(b, static_cast<std::size_t>(im->n1) * im->n2,
              "FftBlur::data_resolvent");
  Vector rtb(b.size());
  im->spectral_multiply(b.data(), rtb.data(), im->ev_half);
  auto cache = std::make_shared<std::pair<double, std::vector<double>>>(
      -1.0, std::vector<double>());
  auto cache_mu = std::make_shared<std::mutex>();
  return ResolventOp::custom_scalar(
      [im, rtb = std::move(rtb), cache, cache_mu](double tau,
                                                  const Vector& w) {
        std::vector<double> mult;
        {
          std::scoped_lock lock(*cache_mu);
          if (cache->first != tau) {
            cache->second.resize(im->ev_half.size());
            for (std::size_t i = 0; i < im->ev_half.size(); ++i)
              cache->second[i] =
                  1.0 / (1.0 + tau * im->ev_half[i] * im->ev_half[i]);
            cache->first = tau;
          }
          mult = cache->second;
        }
        Vector rhs = axpby(1.0, w, tau, rtb);
        Vector out(w.size());
        im->spectral_multiply(rhs.data(), out.data(), mult);
        return out;
      });
}

Vector synthetic_image(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("synthetic_image: n >= 2");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Vector img(static_cast<std::size_t>(n) * n, rng.uniform(20.0, 60.0));
  const int rects = 6;
  for (int r = 0; r < rects; ++r) {
    const int w = std::max(2, static_cast<int>(rng.uniform(n / 8.0, n / 2.0)));
    const int h = std::max(2, static_cast<int>(rng.uniform(n / 8.0, n / 2.0)));
    const int i0 = static_cast<int>(rng.uniform(0.0, n - 1.0));
    const int j0 = static_cast<int>(rng.uniform(0.0, n - 1.0));
    const double level = rng.uniform(0.0, 255.0);
    for (int i = i0; i < std::min(n, i0 + h); ++i)
      for (int j = j0; j < std::min(n, j0 + w); ++j)
        img[static_cast<std::size_t>(i) * n + j] = level;
  }
  const int disks = 2;
  for (int d = 0; d < disks; ++d) {
    const double ci = rng.uniform(0.0, n - 1.0);
    const double cj = rng.uniform(0.0, n - 1.0);
    const double rad = rng.uniform(n / 10.0, n / 4.0);
    const double level = rng.uniform(0.0, 255.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if ((i - ci) * (i - ci) + (j - cj) * (j - cj) <= rad * rad)
          img[static_cast<std::size_t>(i) * n + j] = level;
  }
  return img;
}

Vector observe(const FftBlur& blur, const Vector& truth, double noise_std01,
               std::uint64_t seed) {
  Vector b = blur.op().apply(truth);
  if (noise_std01 > 0.0) {
    Rng rng(seed);
    const double s = 255.0 * noise_std01;
    for (auto& v : b) v += s * rng.normal();
  }
  return b;
}

double tv_objective(const TvProblem& prob, const Vector& x) {
  Vector rx = prob.blur.op().apply(x);
  Vector res = sub(rx, prob.b);
  double val = 0.5 * norm_sq(res);
  Vector g = grad2d(x, prob.n1, prob.n2);
  double tv = 0.0;
  for (double v : g) tv += std::abs(v);
  return val + prob.alpha * tv;
}

double psnr(const Vector& ref, const Vector& x, double peak) {
  require_dim(x, ref.size(), "psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] - x[i];
    mse += d * d;
  }
  mse /= static_cast<double>(ref.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

TvRunResult run_tv(const TvProblem& prob, const StoppingRule& rule,
                   bool unchecked, bool record_objective) {
  const int n = prob.n1 * prob.n2;
  require_dim(prob.b, static_cast<std::size_t>(n), "run_tv");
  if (prob.alpha < 0.0) throw std::invalid_argument("run_tv: alpha >= 0");
  std::vector<SdrBlock> blocks;
  blocks.emplace_back(ResolventOp::l1(prob.alpha), grad2d_op(prob.n1, prob.n2),
                      Metric::scalar(prob.sigma1, 2 * n));
  blocks.emplace_back(ResolventOp::box(prob.box_lo, prob.box_hi),
                      identity_op(n), Metric::scalar(prob.sigma2, n));
  MultiblockProblem mp = MultiblockProblem::make(
      prob.blur.data_resolvent(prob.b), std::move(blocks),
      Metric::scalar(prob.tau, n), unchecked);

  MultiblockState s;
  s.x = prob.b;
  s.v.push_back(Vector(2 * static_cast<std::size_t>(n), 0.0));
  s.v.push_back(Vector(static_cast<std::size_t>(n), 0.0));

  auto step = [&]() {
    MultiblockState ns = sdr_multiblock_step(mp, s);
    double diff = 0.0, base = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double d = ns.x[i] - s.x[i];
      diff += d * d;
      base += s.x[i] * s.x[i];
    }
    for (std::size_t bly = 0; bly < s.v.size(); ++bly)
      for (std::size_t i = 0; i < s.v[bly].size(); ++i) {
        const double d = ns.v[bly][i] - s.v[bly][i];
        diff += d * d;
        base += s.v[bly][i] * s.v[bly][i];
      }
    s = std::move(ns);
    return base == 0.0 ? std::sqrt(diff) : std::sqrt(diff / base);
  };
  std::function<double()> objective;
  if (record_objective) objective = [&]() { return tv_objective(prob, s.x); };

  TvRunResult out{solve(step, rule, objective), {}, 0.0};
  if (mp.condition_bypassed)
    out.report.warning = "metric condition check bypassed";
  out.x = std::move(s.x);
  out.objective = tv_objective(prob, out.x);
  return out;
}

char huber_class_name(HuberClass c) {
  switch (c) {
    case HuberClass::A: return 'A';
    case HuberClass::B: return 'B';
    case HuberClass::C: return 'C';
  }
  return '?';
}

HuberClass parse_huber_class(char c) {
  switch (c) {
    case 'A': case 'a': return HuberClass::A;
    case 'B': case 'b': return HuberClass::B;
    case 'C': case 'c': return HuberClass::C;
  }
  throw std::invalid_argument("unknown matrix class (expected A, B or C)");
}

Eigen::MatrixXd HuberProblem::m_matrix() const {
  return p * d.asDiagonal() * p.transpose();
}

Eigen::MatrixXd HuberProblem::k_matrix() const {
  Eigen::VectorXd dk = d.array().pow(1.0 - eta);
  return p * dk.asDiagonal() * p.transpose();
}

Eigen::MatrixXd HuberProblem::t_matrix() const {
  Eigen::VectorXd dt = d.array().pow(eta);
  return p * dt.asDiagonal() * p.transpose();
}

double HuberProblem::k_norm_sq() const {
  const double dmax = d.maxCoeff();
  const double dmin = d.minCoeff();
  const double kmax = std::max(std::pow(dmax, 1.0 - eta),
                               std::pow(dmin, 1.0 - eta));
  return kmax * kmax;
}

double HuberProblem::objective(const Vector& x) const {
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), x.size());
  Eigen::VectorXd mx = m_matrix() * xm;
  double val = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = x[i] - z[i];
    val += std::abs(xi) > delta ? std::abs(xi) - delta / 2.0
                                : xi * xi / (2.0 * delta);
  }
  return val + alpha * mx.cwiseAbs().sum();
}

HuberProblem build_huber(int n, HuberClass cls, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("build_huber: n >= 2");
  HuberProblem prob;
  prob.n = n;
  prob.cls = cls;
  double lmax = 0.0;
  switch (cls) {
    case HuberClass::A: lmax = n / 1000.0; break;
    case HuberClass::B: lmax = 4.0 * n; break;
    case HuberClass::C: lmax = 100.0 * n; break;
  }
  const double lmin = lmax / prob.kappa;
  Rng rng(seed);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  prob.p = qr.householderQ();
  prob.d.resize(n);
  prob.d[0] = lmin;
  prob.d[n - 1] = lmax;
  const double llo = std::log(lmin), lhi = std::log(lmax);
  for (int i = 1; i + 1 < n; ++i) prob.d[i] = std::exp(rng.uniform(llo, lhi));
  prob.z = rng.normal_vector(n);
  return prob;
}

namespace {

// phi'(xi) = clamp(xi/delta, -1, 1)
void huber_grad(const Vector& x, const Vector& z, double delta, Vector& out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = (x[i] - z[i]) / delta;
    out[i] = xi > 1.0 ? 1.0 : (xi < -1.0 ? -1.0 : xi);
  }
}

Vector huber_newton(const Eigen::MatrixXd& t, const Eigen::MatrixXd& ttt,
                    double sigma, const Vector& r, const Vector& z,
                    double delta, const Vector& warm, int* inner_iters) {
  const int n = static_cast<int>(warm.size());
  Eigen::Map<const Eigen::VectorXd> rm(r.data(), r.size());
  Eigen::Map<const Eigen::VectorXd> zm(z.data(), z.size());
  Eigen::VectorXd tr = t.transpose() * rm;
  const double scale = 1.0 + tr.norm();
  const double tol = 1e-10 * scale;

  // psi(p) = sigma h(p - z) + 1/2 ||Tp - r||^2: smooth, strongly convex; the
  // generalized Hessian sigma/delta diag + T^T T is SPD, so the Newton
  // direction descends and an Armijo search on psi converges globally.
  auto objective = [&](const Eigen::VectorXd& p) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = p[i] - zm[i];
      v += std::abs(xi) > delta ? std::abs(xi) - delta / 2.0
                                : xi * xi / (2.0 * delta);
    }
    return sigma * v + 0.5 * (t * p - rm).squaredNorm();
  };

  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(warm.data(), n);
  Vector hg(n);
  auto gradient = [&](const Eigen::VectorXd& pt) {
    Vector pv(pt.data(), pt.data() + n);
    huber_grad(pv, z, delta, hg);
    Eigen::Map<const Eigen::VectorXd> hm(hg.data(), n);
    return Eigen::VectorXd(sigma * hm + ttt * pt - tr);
  };

  Eigen::VectorXd grad = gradient(p);
  double gn = grad.norm();
  // ||H^{-1} grad||, the displacement a full Newton step would make; once it
  // falls below representable progress the subproblem is solved to the
  // precision the arithmetic supports, whatever the raw gradient norm says
  // (the Hessian scale can exceed 1e6 for the stiff spectral splits).
  double step_len = std::numeric_limits<double>::infinity();
  bool at_float_floor = false;
  int it = 0;
  for (; it < 50 && gn > tol; ++it) {
    Eigen::MatrixXd hess = ttt;
    for (int i = 0; i < n; ++i)
      if (std::abs(p[i] - zm[i]) <= delta) hess(i, i) += sigma / delta;
    Eigen::VectorXd dp = hess.ldlt().solve(-grad);
    step_len = dp.norm();
    if (step_len <= 1e-12 * (1.0 + p.norm())) break;
    const double slope = grad.dot(dp);  // negative by SPD
    const double psi0 = objective(p);
    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      if (objective(p + lam * dp) <= psi0 + 1e-4 * lam * slope) {
        accepted = true;
        break;
      }
      lam *= 0.5;
    }
    // once the accepted step no longer moves p at double precision, the
    // subproblem is solved as far as the arithmetic can take it
    if (!accepted || lam * step_len <= 1e-16 * (1.0 + p.norm())) {
      at_float_floor = true;
      break;
    }
    p += lam * dp;
    grad = gradient(p);
    gn = grad.norm();
  }
  if (inner_iters) *inner_iters = it;
  if (!at_float_floor && gn > 1e-8 * scale &&
      step_len > 1e-9 * (1.0 + p.norm()))
    throw std::runtime_error(
        "huber_p_update: inner Newton stalled after " + std::to_string(it) +
        " iterations, residual " + std::to_string(gn));
  return Vector(p.data(), p.data() + n);
}

}  // namespace

Vector huber_p_update(const LinearOp& t, const LinearOp& k, double sigma,
                      const Vector& y, const Vector& p_prev, const Vector& z,
                      double delta, int* inner_iters) {
  if (sigma <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("huber_p_update: sigma, delta > 0");
  Eigen::MatrixXd tm = t.materialize();
  Eigen::MatrixXd ttt = tm.transpose() * tm;
  // r = T p_prev - sigma K* y
  Vector r = sub(t.apply(p_prev), scaled(k.apply_adjoint(y), sigma));
  return huber_newton(tm, ttt, sigma, r, z, delta, p_prev, inner_iters);
}

HuberRunResult run_huber(const HuberProblem& prob, double tau,
                         const StoppingRule& rule, double sigma_override,
                         bool record_objective) {
  if (tau <= 0.0) throw std::invalid_argument("run_huber: tau > 0");
  const int n = prob.n;
  const double sigma = sigma_override > 0.0
                           ? sigma_override
                           : 0.99 / (tau * prob.k_norm_sq());
  Metric ups = Metric::scalar(tau, n);
  Metric sig = Metric::scalar(sigma, n);
  ResolventOp f = ResolventOp::l1(prob.alpha);
  Vector zeros(n, 0.0);

  HuberRunResult out;
  if (prob.eta == 0.0) {
    ExplicitSplitProblem ep = ExplicitSplitProblem::make(
        ResolventOp::huber(prob.delta, prob.z), f,
        dense_op(prob.k_matrix()), ups, sig);
    ExplicitSplitState s = ExplicitSplitState::start(ep, zeros, zeros, zeros);
    s.u = scaled(s.p, -1.0);
    auto step = [&]() {
      ExplicitSplitState ns = explicit_split_step(ep, s);
      const double r = relative_residual(ns.x, ns.u, s.x, s.u);
      s = std::move(ns);
      return r;
    };
    std::function<double()> objective;
    if (record_objective) objective = [&]() { return prob.objective(s.p); };
    out.report = solve(step, rule, objective);
    out.p = std::move(s.p);
  } else {
    Eigen::MatrixXd tm = prob.t_matrix();
    auto ttt = std::make_shared<Eigen::MatrixXd>(tm.transpose() * tm);
    auto tmat = std::make_shared<Eigen::MatrixXd>(std::move(tm));
    const Vector& z = prob.z;
    const double delta = prob.delta;
    auto p_solver = [tmat, ttt, sigma, z, delta](const Vector& r,
                                                 const Vector& warm) {
      return huber_newton(*tmat, *ttt, sigma, r, z, delta, warm, nullptr);
    };
    SadmmProblem sp = SadmmProblem::make(p_solver, f, dense_op(*tmat),
                                         dense_op(prob.k_matrix()), ups, sig);
    SadmmState s = SadmmState::start(sp, zeros, zeros, zeros);
    s.u = scaled(s.tp, -1.0);
    auto step = [&]() {
      SadmmState ns = sadmm_step(sp, s);
      const double r = relative_residual(ns.x, ns.u, s.x, s.u);
      s = std::move(ns);
      return r;
    };
    std::function<double()> objective;
    if (record_objective) objective = [&]() { return prob.objective(s.p); };
    out.report = solve(step, rule, objective);
    out.p = std::move(s.p);
  }
  out.objective = prob.objective(out.p);
  return out;
}

}  // namespace splitdr
