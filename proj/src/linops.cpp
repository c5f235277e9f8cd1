#include "splitdr/linops.hpp"

#include <cmath>
#include <stdexcept>

#include "splitdr/rng.hpp"

namespace splitdr {

Eigen::MatrixXd LinearOp::materialize() const {
  Eigen::MatrixXd m(out_dim, in_dim);
  Vector e(in_dim, 0.0), col(out_dim);
  for (int j = 0; j < in_dim; ++j) {
    e[j] = 1.0;
    fwd(e.data(), col.data());
    for (int i = 0; i < out_dim; ++i) m(i, j) = col[i];
    e[j] = 0.0;
  }
  return m;
}

LinearOp identity_op(int n) {
  LinearOp op;
  op.in_dim = op.out_dim = n;
  auto copy = [n](const double* in, double* out) {
    std::copy(in, in + n, out);
  };
  op.fwd = copy;
  op.adj = copy;
  op.normal = copy;
  return op;
}

LinearOp zero_op(int in_dim, int out_dim) {
  LinearOp op;
  op.in_dim = in_dim;
  op.out_dim = out_dim;
  op.fwd = [out_dim](const double*, double* out) {
    std::fill(out, out + out_dim, 0.0);
  };
  op.adj = [in_dim](const double*, double* out) {
    std::fill(out, out + in_dim, 0.0);
  };
  return op;
}

LinearOp dense_op(const Eigen::MatrixXd& a) {
  auto m = std::make_shared<Eigen::MatrixXd>(a);
  LinearOp op;
  op.in_dim = static_cast<int>(a.cols());
  op.out_dim = static_cast<int>(a.rows());
  op.fwd = [m](const double* in, double* out) {
    Eigen::Map<const Eigen::VectorXd> x(in, m->cols());
    Eigen::Map<Eigen::VectorXd> y(out, m->rows());
    y.noalias() = (*m) * x;
  };
  op.adj = [m](const double* in, double* out) {
    Eigen::Map<const Eigen::VectorXd> u(in, m->rows());
    Eigen::Map<Eigen::VectorXd> y(out, m->cols());
    y.noalias() = m->transpose() * u;
  };
  return op;
}

LinearOp scaled_op(double a, const LinearOp& l) {
  LinearOp op;
  op.in_dim = l.in_dim;
  op.out_dim = l.out_dim;
  const int nout = l.out_dim, nin = l.in_dim;
  op.fwd = [a, l, nout](const double* in, double* out) {
    l.fwd(in, out);
    kernels::axpby(a, out, 0.0, out, out, nout);
  };
  op.adj = [a, l, nin](const double* in, double* out) {
    l.adj(in, out);
    kernels::axpby(a, out, 0.0, out, out, nin);
  };
  if (l.normal) {
    op.normal = [a, l, nin](const double* in, double* out) {
      l.normal(in, out);
      kernels::axpby(a * a, out, 0.0, out, out, nin);
    };
  }
  return op;
}

LinearOp compose_ops(const LinearOp& a, const LinearOp& b) {
  if (a.in_dim != b.out_dim)
    throw std::invalid_argument("compose_ops: dimension mismatch");
  LinearOp op;
  op.in_dim = b.in_dim;
  op.out_dim = a.out_dim;
  const int mid = b.out_dim;
  op.fwd = [a, b, mid](const double* in, double* out) {
    Vector t(mid);
    b.fwd(in, t.data());
    a.fwd(t.data(), out);
  };
  op.adj = [a, b, mid](const double* in, double* out) {
    Vector t(mid);
    a.adj(in, t.data());
    b.adj(t.data(), out);
  };
  return op;
}

LinearOp stack_ops(const std::vector<LinearOp>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("stack_ops: no blocks");
  const int in_dim = blocks.front().in_dim;
  int out_dim = 0;
  for (const auto& b : blocks) {
    if (b.in_dim != in_dim)
      throw std::invalid_argument("stack_ops: input dimension mismatch");
    out_dim += b.out_dim;
  }
  LinearOp op;
  op.in_dim = in_dim;
  op.out_dim = out_dim;
  op.fwd = [blocks](const double* in, double* out) {
    std::size_t off = 0;
    for (const auto& b : blocks) {
      b.fwd(in, out + off);
      off += b.out_dim;
    }
  };
  op.adj = [blocks, in_dim](const double* in, double* out) {
    std::fill(out, out + in_dim, 0.0);
    Vector t(in_dim);
    std::size_t off = 0;
    for (const auto& b : blocks) {
      b.adj(in + off, t.data());
      kernels::axpby(1.0, out, 1.0, t.data(), out, in_dim);
      off += b.out_dim;
    }
  };
  bool all_normal = true;
  for (const auto& b : blocks) all_normal = all_normal && bool(b.normal);
  if (all_normal) {
    // (stack L)* (stack L) = sum_i L_i* L_i
    op.normal = [blocks, in_dim](const double* in, double* out) {
      Vector t(in_dim);
      blocks.front().normal(in, out);
      for (std::size_t i = 1; i < blocks.size(); ++i) {
        blocks[i].normal(in, t.data());
        kernels::axpby(1.0, out, 1.0, t.data(), out, in_dim);
      }
    };
  }
  return op;
}

Metric Metric::scalar(double value, int dim) {
  if (value <= 0.0)
    throw std::invalid_argument("Metric::scalar: value must be positive");
  Metric m;
  m.kind_ = Kind::scalar;
  m.dim_ = dim;
  m.value_ = value;
  m.lambda_min_ = m.lambda_max_ = value;
  return m;
}

Metric Metric::diagonal(Vector d) {
  Metric m;
  m.kind_ = Kind::diagonal;
  m.dim_ = static_cast<int>(d.size());
  m.lambda_min_ = m.lambda_max_ = d.empty() ? 0.0 : d.front();
  for (double v : d) {
    if (v <= 0.0)
      throw std::invalid_argument("Metric::diagonal: entries must be positive");
    m.lambda_min_ = std::min(m.lambda_min_, v);
    m.lambda_max_ = std::max(m.lambda_max_, v);
  }
  m.diag_ = std::move(d);
  return m;
}

Metric Metric::dense(const Eigen::MatrixXd& mat) {
  if (mat.rows() != mat.cols())
    throw std::invalid_argument("Metric::dense: matrix must be square");
  // LLT pivots expose indefiniteness before the (more expensive) eigensolve.
  Eigen::LLT<Eigen::MatrixXd> llt(mat);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("Metric::dense: matrix not positive definite");
  auto data = std::make_shared<DenseData>();
  data->m = 0.5 * (mat + mat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(data->m);
  data->eigvec = es.eigenvectors();
  data->eigval = es.eigenvalues();
  if (data->eigval.minCoeff() <= 0.0)
    throw std::invalid_argument("Metric::dense: matrix not positive definite");
  Metric m;
  m.kind_ = Kind::dense;
  m.dim_ = static_cast<int>(mat.rows());
  m.dense_ = std::move(data);
  m.lambda_min_ = m.dense_->eigval.minCoeff();
  m.lambda_max_ = m.dense_->eigval.maxCoeff();
  return m;
}

double Metric::scalar_value() const {
  if (kind_ != Kind::scalar)
    throw std::logic_error("Metric::scalar_value: not a scalar metric");
  return value_;
}

namespace {

Vector dense_spectral_apply(const Eigen::MatrixXd& v,
                            const Eigen::VectorXd& lam, const Vector& x,
                            double power) {
  Eigen::Map<const Eigen::VectorXd> xm(x.data(), x.size());
  Eigen::VectorXd coeffs = v.transpose() * xm;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= std::pow(lam[i], power);
  Eigen::VectorXd y = v * coeffs;
  return Vector(y.data(), y.data() + y.size());
}

}  // namespace

Vector Metric::apply(const Vector& x) const {
  require_dim(x, static_cast<std::size_t>(dim_), "Metric::apply");
  switch (kind_) {
    case Kind::scalar:
      return scaled(x, value_);
    case Kind::diagonal: {
      Vector y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = diag_[i] * x[i];
      return y;
    }
    case Kind::dense:
      return dense_spectral_apply(dense_->eigvec, dense_->eigval, x,
                                  dense_inverted_ ? -1.0 : 1.0);
  }
  throw std::logic_error("Metric::apply: bad kind");
}

Vector Metric::solve(const Vector& x) const {
  require_dim(x, static_cast<std::size_t>(dim_), "Metric::solve");
  switch (kind_) {
    case Kind::scalar:
      return scaled(x, 1.0 / value_);
    case Kind::diagonal: {
      Vector y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / diag_[i];
      return y;
    }
    case Kind::dense:
      return dense_spectral_apply(dense_->eigvec, dense_->eigval, x,
                                  dense_inverted_ ? 1.0 : -1.0);
  }
  throw std::logic_error("Metric::solve: bad kind");
}

Vector Metric::sqrt_apply(const Vector& x) const {
  require_dim(x, static_cast<std::size_t>(dim_), "Metric::sqrt_apply");
  switch (kind_) {
    case Kind::scalar:
      return scaled(x, std::sqrt(value_));
    case Kind::diagonal: {
      Vector y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = std::sqrt(diag_[i]) * x[i];
      return y;
    }
    case Kind::dense:
      return dense_spectral_apply(dense_->eigvec, dense_->eigval, x,
                                  dense_inverted_ ? -0.5 : 0.5);
  }
  throw std::logic_error("Metric::sqrt_apply: bad kind");
}

Metric Metric::inverse() const {
  switch (kind_) {
    case Kind::scalar:
      return Metric::scalar(1.0 / value_, dim_);
    case Kind::diagonal: {
      Vector d(diag_.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = 1.0 / diag_[i];
      return Metric::diagonal(std::move(d));
    }
    case Kind::dense: {
      Metric m = *this;
      m.dense_inverted_ = !dense_inverted_;
      std::swap(m.lambda_min_, m.lambda_max_);
      m.lambda_min_ = 1.0 / m.lambda_min_;
      m.lambda_max_ = 1.0 / m.lambda_max_;
      return m;
    }
  }
  throw std::logic_error("Metric::inverse: bad kind");
}

Eigen::MatrixXd Metric::as_matrix() const {
  switch (kind_) {
    case Kind::scalar:
      return value_ * Eigen::MatrixXd::Identity(dim_, dim_);
    case Kind::diagonal: {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
      for (int i = 0; i < dim_; ++i) m(i, i) = diag_[i];
      return m;
    }
    case Kind::dense: {
      if (!dense_inverted_) return dense_->m;
      return dense_->eigvec * dense_->eigval.cwiseInverse().asDiagonal() *
             dense_->eigvec.transpose();
    }
  }
  throw std::logic_error("Metric::as_matrix: bad kind");
}

LinearOp Metric::as_op() const {
  Metric self = *this;
  LinearOp op;
  op.in_dim = op.out_dim = dim_;
  auto fn = [self](const double* in, double* out) {
    Vector x(in, in + self.dim());
    Vector y = self.apply(x);
    std::copy(y.begin(), y.end(), out);
  };
  op.fwd = fn;
  op.adj = fn;
  return op;
}

double adjoint_check(const LinearOp& op, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("adjoint_check: trials >= 1");
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector x = rng.normal_vector(op.in_dim);
    Vector u = rng.normal_vector(op.out_dim);
    Vector lx = op.apply(x);
    Vector ltu = op.apply_adjoint(u);
    const double a = dot(lx, u);
    const double b = dot(x, ltu);
    worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
  }
  return worst;
}

PowerIterationResult power_iteration(const LinearOp& op, double tol,
                                     int max_iter, std::uint64_t seed) {
  if (tol <= 0.0) throw std::invalid_argument("power_iteration: tol > 0");
  Rng rng(seed);
  Vector x = rng.uniform_vector(op.in_dim);
  {
    const double nx = norm(x);
    if (nx == 0.0) x[0] = 1.0;
    else scale(x, 1.0 / nx);
  }
  Vector g(op.normal ? 0 : op.out_dim), y(op.in_dim);
  PowerIterationResult res;
  double prev = -1.0;
  for (int k = 1; k <= max_iter; ++k) {
    double lambda;  // Rayleigh quotient <x, L*L x>, x is unit
    if (op.normal) {
      op.normal(x.data(), y.data());
      lambda = dot(x, y);
    } else {
      op.fwd(x.data(), g.data());
      lambda = norm_sq(g);
      op.adj(g.data(), y.data());
    }
    res.value = lambda;
    res.iterations = k;
    if (k > 1 && std::abs(lambda - prev) < tol) {
      res.converged = true;
      return res;
    }
    prev = lambda;
    const double ny = norm(y);
    if (ny == 0.0) {  // x in the kernel of L*L; the norm estimate is 0
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    kernels::axpby(1.0 / ny, y.data(), 0.0, y.data(), x.data(), x.size());
  }
  res.converged = false;
  return res;
}

ConditionReport check_metric_condition(const Metric& ups, const Metric& sig,
                                       const LinearOp& l, double tol) {
  if (tol < 0.0)
    throw std::invalid_argument("check_metric_condition: tol >= 0");
  if (ups.dim() != l.in_dim || sig.dim() != l.out_dim)
    throw std::invalid_argument("check_metric_condition: dimension mismatch");
  ConditionReport rep;
  const long long n = l.in_dim;
  if (n * n <= kDenseConditionLimit) {
    rep.method = ConditionMethod::dense_eigen;
    Eigen::MatrixXd lm = l.materialize();
    Eigen::MatrixXd u = ups.inverse().as_matrix() -
                        lm.transpose() * sig.as_matrix() * lm;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        Eigen::MatrixXd(0.5 * (u + u.transpose())));
    rep.margin = es.eigenvalues().minCoeff();
  } else {
    rep.method = ConditionMethod::power_iteration;
    const Metric& u = ups;
    const Metric& s = sig;
    LinearOp c;
    c.in_dim = l.in_dim;
    c.out_dim = l.out_dim;
    c.fwd = [u, s, l](const double* in, double* out) {
      Vector x(in, in + l.in_dim);
      Vector y = s.sqrt_apply(l.apply(u.sqrt_apply(x)));
      std::copy(y.begin(), y.end(), out);
    };
    c.adj = [u, s, l](const double* in, double* out) {
      Vector w(in, in + l.out_dim);
      Vector y = u.sqrt_apply(l.apply_adjoint(s.sqrt_apply(w)));
      std::copy(y.begin(), y.end(), out);
    };
    auto pi = power_iteration(c, 1e-10, 200000, 0x5eedULL);
    rep.margin = 1.0 - pi.value;
  }
  rep.is_monotone = rep.margin >= -tol;
  return rep;
}

double cocoercivity_constant(const Metric& ups, const Metric& sig) {
  const double tau = ups.strong_monotonicity();
  const double sigma = sig.strong_monotonicity();
  if (tau <= 0.0 || sigma <= 0.0)
    throw std::invalid_argument("cocoercivity_constant: nonpositive constant");
  return tau * sigma / (tau + sigma);
}

Eigen::MatrixXd block_v_matrix(const Metric& ups, const Metric& sig,
                               const LinearOp& l) {
  const int n = l.in_dim, m = l.out_dim;
  Eigen::MatrixXd lm = l.materialize();
  Eigen::MatrixXd v(n + m, n + m);
  v.topLeftCorner(n, n) = ups.inverse().as_matrix();
  v.topRightCorner(n, m) = -lm.transpose();
  v.bottomLeftCorner(m, n) = -lm;
  v.bottomRightCorner(m, m) = sig.inverse().as_matrix();
  return v;
}

}  // namespace splitdr
