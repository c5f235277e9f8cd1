#include "splitdr/prox.hpp"

#include <mutex>
#include <optional>
#include <stdexcept>
#include <variant>

namespace splitdr {

Vector soft_threshold(const Vector& x, double level) {
  if (level < 0.0) throw std::invalid_argument("soft_threshold: level >= 0");
  Vector y(x.size());
  kernels::soft_threshold(x.data(), level, y.data(), x.size());
  return y;
}

Vector project_box(const Vector& x, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("project_box: lo <= hi");
  Vector y(x.size());
  kernels::clamp(x.data(), lo, hi, y.data(), x.size());
  return y;
}

Vector prox_huber(const Vector& x, double gamma, double delta,
                  const Vector& shift) {
  if (gamma <= 0.0 || delta <= 0.0)
    throw std::invalid_argument("prox_huber: gamma and delta must be positive");
  if (shift.empty()) {
    Vector y(x.size());
    kernels::huber_prox(x.data(), gamma, delta, y.data(), x.size());
    return y;
  }
  require_dim(shift, x.size(), "prox_huber");
  Vector y = sub(x, shift);
  kernels::huber_prox(y.data(), gamma, delta, y.data(), y.size());
  return add(y, shift);
}

Vector resolvent_quadratic(const LinearOp& r, const Vector& b, double tau,
                           const Vector& w) {
  if (tau <= 0.0) throw std::invalid_argument("resolvent_quadratic: tau > 0");
  Eigen::MatrixXd rm = r.materialize();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(r.in_dim, r.in_dim) +
                        tau * rm.transpose() * rm;
  Eigen::LLT<Eigen::MatrixXd> llt(sys);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("resolvent_quadratic: factorization failed");
  Vector rtb = r.apply_adjoint(b);
  Eigen::VectorXd rhs =
      Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()) +
      tau * Eigen::Map<const Eigen::VectorXd>(rtb.data(), rtb.size());
  Eigen::VectorXd y = llt.solve(rhs);
  return Vector(y.data(), y.data() + y.size());
}

namespace {

struct L1Desc {
  double alpha;
};
struct BoxDesc {
  double lo, hi;
};
struct HuberDesc {
  double delta;
  Vector shift;
};
struct QuadDesc {
  LinearOp r;
  Vector b;
  Vector rtb;  // R* b
};
struct LinearDesc {
  Eigen::MatrixXd m;
};
struct ZeroDesc {};
struct CustomScalarDesc {
  std::function<Vector(double, const Vector&)> fn;
};
struct CustomMetricDesc {
  std::function<Vector(const Metric&, const Vector&)> fn;
};
struct StackedDesc {
  std::vector<std::pair<ResolventOp, int>> parts;
};

using Desc = std::variant<L1Desc, BoxDesc, HuberDesc, QuadDesc, LinearDesc,
                          ZeroDesc, CustomScalarDesc, CustomMetricDesc,
                          StackedDesc>;

void require_separable(const Metric& m, const char* what) {
  if (!m.separable())
    throw std::invalid_argument(std::string(what) +
                                ": dense metric not supported here");
}

}  // namespace

struct ResolventOp::Impl {
  Desc desc;

  // Scalar-metric factorization caches for the quadratic and linear
  // descriptors; solvers apply the same step size every iteration.
  mutable std::mutex mu;
  mutable std::optional<double> quad_tau;
  mutable Eigen::LLT<Eigen::MatrixXd> quad_llt;
  mutable Eigen::MatrixXd quad_rtr;  // R* R, built once
  mutable bool quad_rtr_ready = false;
  mutable std::optional<double> lin_tau;
  mutable Eigen::PartialPivLU<Eigen::MatrixXd> lin_lu;

  explicit Impl(Desc d) : desc(std::move(d)) {}
};

ResolventOp ResolventOp::l1(double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("ResolventOp::l1: alpha >= 0");
  ResolventOp op;
  op.impl_ = std::make_shared<Impl>(Desc{L1Desc{alpha}});
  return op;
}

ResolventOp ResolventOp::box(double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("ResolventOp::box: lo <= hi");
  ResolventOp op;
  op.impl_ = std::make_shared<Impl>(Desc{BoxDesc{lo, hi}});
  return op;
}

ResolventOp ResolventOp::huber(double delta, Vector shift) {
  if (delta <= 0.0) throw std::invalid_argument("ResolventOp::huber: delta > 0");
  ResolventOp op;
  op.impl_ = std::make_shared<Impl>(Desc{HuberDesc{delta, std::move(shift)}});
  return op;
}

ResolventOp ResolventOp::quadratic(const LinearOp& r, Vector b) {
  ResolventOp op;
  Vector rtb = r.apply_adjoint(b);
  op.impl_ =
      std::make_shared<Impl>(Desc{QuadDesc{r, std::move(b), std::move(rtb)}});
  return op;
}

ResolventOp ResolventOp::linear(const Eigen::MatrixXd& m) {
  ResolventOp op;
  op.impl_ = std::make_shared<Impl>(Desc{LinearDesc{m}});
  return op;
}

ResolventOp ResolventOp::zero() {
  ResolventOp op;
  op.impl_ = std::make_shared<Impl>(Desc{ZeroDesc{}});
  return op;
}

ResolventOp ResolventOp::custom_scalar(
    std::function<Vector(double, const Vector&)> fn) {
  ResolventOp op;
  op.impl_ = std::make_shared<Impl>(Desc{CustomScalarDesc{std::move(fn)}});
  return op;
}

ResolventOp ResolventOp::custom_metric(
    std::function<Vector(const Metric&, const Vector&)> fn) {
  ResolventOp op;
  op.impl_ = std::make_shared<Impl>(Desc{CustomMetricDesc{std::move(fn)}});
  return op;
}

ResolventOp ResolventOp::stacked(
    std::vector<std::pair<ResolventOp, int>> parts) {
  if (parts.empty())
    throw std::invalid_argument("ResolventOp::stacked: no parts");
  ResolventOp op;
  op.impl_ = std::make_shared<Impl>(Desc{StackedDesc{std::move(parts)}});
  return op;
}

Vector ResolventOp::resolve(const Metric& m, const Vector& w) const {
  if (!impl_) throw std::logic_error("ResolventOp: empty");
  const Impl& im = *impl_;

  if (const auto* d = std::get_if<ZeroDesc>(&im.desc)) {
    (void)d;
    return w;
  }
  if (const auto* d = std::get_if<L1Desc>(&im.desc)) {
    require_separable(m, "l1 resolvent");
    if (m.kind() == Metric::Kind::scalar)
      return soft_threshold(w, m.scalar_value() * d->alpha);
    Vector y(w.size());
    const Vector& diag = m.diagonal_values();
    for (std::size_t i = 0; i < w.size(); ++i)
      kernels::ref::soft_threshold(&w[i], diag[i] * d->alpha, &y[i], 1);
    return y;
  }
  if (const auto* d = std::get_if<BoxDesc>(&im.desc)) {
    require_separable(m, "box resolvent");
    return project_box(w, d->lo, d->hi);
  }
  if (const auto* d = std::get_if<HuberDesc>(&im.desc)) {
    require_separable(m, "huber resolvent");
    if (m.kind() == Metric::Kind::scalar)
      return prox_huber(w, m.scalar_value(), d->delta, d->shift);
    const Vector& diag = m.diagonal_values();
    Vector y = d->shift.empty() ? w : sub(w, d->shift);
    for (std::size_t i = 0; i < y.size(); ++i)
      kernels::ref::huber_prox(&y[i], diag[i], d->delta, &y[i], 1);
    return d->shift.empty() ? y : add(y, d->shift);
  }
  if (const auto* d = std::get_if<QuadDesc>(&im.desc)) {
    const int n = d->r.in_dim;
    std::scoped_lock lock(im.mu);
    if (!im.quad_rtr_ready) {
      Eigen::MatrixXd rm = d->r.materialize();
      im.quad_rtr = rm.transpose() * rm;
      im.quad_rtr_ready = true;
    }
    if (m.kind() == Metric::Kind::scalar) {
      const double tau = m.scalar_value();
      if (!im.quad_tau || *im.quad_tau != tau) {
        Eigen::MatrixXd sys =
            Eigen::MatrixXd::Identity(n, n) + tau * im.quad_rtr;
        im.quad_llt.compute(sys);
        if (im.quad_llt.info() != Eigen::Success)
          throw std::runtime_error("quadratic resolvent: factorization failed");
        im.quad_tau = tau;
      }
      Eigen::VectorXd rhs =
          Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()) +
          tau * Eigen::Map<const Eigen::VectorXd>(d->rtb.data(),
                                                  d->rtb.size());
      Eigen::VectorXd y = im.quad_llt.solve(rhs);
      return Vector(y.data(), y.data() + y.size());
    }
    // (M^{-1} + R*R) y = M^{-1} w + R* b, SPD for any SPD metric M.
    Eigen::MatrixXd sys = m.inverse().as_matrix() + im.quad_rtr;
    Eigen::LLT<Eigen::MatrixXd> llt(sys);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("quadratic resolvent: factorization failed");
    Vector minvw = m.solve(w);
    Eigen::VectorXd rhs =
        Eigen::Map<const Eigen::VectorXd>(minvw.data(), minvw.size()) +
        Eigen::Map<const Eigen::VectorXd>(d->rtb.data(), d->rtb.size());
    Eigen::VectorXd y = llt.solve(rhs);
    return Vector(y.data(), y.data() + y.size());
  }
  if (const auto* d = std::get_if<LinearDesc>(&im.desc)) {
    const int n = static_cast<int>(d->m.rows());
    Eigen::Map<const Eigen::VectorXd> wm(w.data(), w.size());
    std::scoped_lock lock(im.mu);
    if (m.kind() == Metric::Kind::scalar) {
      const double tau = m.scalar_value();
      if (!im.lin_tau || *im.lin_tau != tau) {
        im.lin_lu.compute(Eigen::MatrixXd::Identity(n, n) + tau * d->m);
        im.lin_tau = tau;
      }
      Eigen::VectorXd y = im.lin_lu.solve(wm);
      return Vector(y.data(), y.data() + y.size());
    }
    Eigen::MatrixXd sys =
        Eigen::MatrixXd::Identity(n, n) + m.as_matrix() * d->m;
    Eigen::VectorXd y = sys.partialPivLu().solve(wm);
    return Vector(y.data(), y.data() + y.size());
  }
  if (const auto* d = std::get_if<CustomScalarDesc>(&im.desc)) {
    if (m.kind() != Metric::Kind::scalar)
      throw std::invalid_argument(
          "custom resolvent is not metric-aware; scalar metric required");
    return d->fn(m.scalar_value(), w);
  }
  if (const auto* d = std::get_if<CustomMetricDesc>(&im.desc)) {
    return d->fn(m, w);
  }
  if (const auto* d = std::get_if<StackedDesc>(&im.desc)) {
    require_separable(m, "stacked resolvent");
    Vector out;
    out.reserve(w.size());
    std::size_t off = 0;
    for (const auto& [part, dim] : d->parts) {
      Vector slice(w.begin() + off, w.begin() + off + dim);
      Metric sub = m.kind() == Metric::Kind::scalar
                       ? Metric::scalar(m.scalar_value(), dim)
                       : Metric::diagonal(Vector(
                             m.diagonal_values().begin() + off,
                             m.diagonal_values().begin() + off + dim));
      Vector r = part.resolve(sub, slice);
      out.insert(out.end(), r.begin(), r.end());
      off += dim;
    }
    return out;
  }
  throw std::logic_error("ResolventOp::resolve: bad descriptor");
}

Vector metric_prox(const ResolventOp& f_desc, const Metric& ups,
                   const Vector& w) {
  return f_desc.resolve(ups.inverse(), w);
}

Vector conjugate_resolvent(const ResolventOp& prox_g, double tau,
                           const Vector& x) {
  if (tau <= 0.0) throw std::invalid_argument("conjugate_resolvent: tau > 0");
  return conjugate_resolvent(prox_g, Metric::scalar(tau, static_cast<int>(x.size())), x);
}

Vector conjugate_resolvent(const ResolventOp& b, const Metric& sig,
                           const Vector& x) {
  Vector s = sig.solve(x);
  Vector j = b.resolve(sig.inverse(), s);
  return sig.apply(sub(s, j));
}

}  // namespace splitdr
