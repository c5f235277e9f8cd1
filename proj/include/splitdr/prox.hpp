#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "splitdr/linops.hpp"
#include "splitdr/vec.hpp"

namespace splitdr {

// Componentwise sign(x)*max(|x|-level, 0).
Vector soft_threshold(const Vector& x, double level);

// Componentwise clamp to [lo, hi].
Vector project_box(const Vector& x, double lo, double hi);

// shift + componentwise prox of gamma*phi_delta at (x - shift); pass an
// empty shift for zero.
Vector prox_huber(const Vector& x, double gamma, double delta,
                  const Vector& shift = {});

// argmin_y 1/2 ||Ry - b||^2 + 1/(2 tau) ||y - w||^2, dense factorization.
Vector resolvent_quadratic(const LinearOp& r, const Vector& b, double tau,
                           const Vector& w);

// A maximally monotone operator represented through its metric resolvent
// J_{MA} = (Id + M A)^{-1}. Separable descriptors (l1, box, huber) accept
// scalar and diagonal metrics; quadratic/linear descriptors accept any SPD
// metric; custom callbacks declare whether they are metric-aware.
class ResolventOp {
 public:
  ResolventOp() = default;

  static ResolventOp l1(double alpha);
  static ResolventOp box(double lo, double hi);
  static ResolventOp huber(double delta, Vector shift = {});
  // A = grad of 1/2 ||R. - b||^2
  static ResolventOp quadratic(const LinearOp& r, Vector b);
  // A = m, a monotone matrix
  static ResolventOp linear(const Eigen::MatrixXd& m);
  static ResolventOp zero();
  // metric_aware: callback takes the full metric. Otherwise it takes the
  // scalar factor t of M = t*Id and non-scalar metrics are rejected.
  static ResolventOp custom_scalar(
      std::function<Vector(double, const Vector&)> fn);
  static ResolventOp custom_metric(
      std::function<Vector(const Metric&, const Vector&)> fn);
  // Blockwise resolvent on the product space, (op_i, dim_i) per block;
  // separable metrics are sliced per block.
  static ResolventOp stacked(std::vector<std::pair<ResolventOp, int>> parts);

  // J_{MA}(w)
  Vector resolve(const Metric& m, const Vector& w) const;

  bool valid() const { return impl_ != nullptr; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// prox^{Ups}_f(w) = argmin_y f(y) + 1/2 ||w - y||^2_{Ups} = J_{Ups^{-1} A}(w)
// for A the subdifferential behind f_desc.
Vector metric_prox(const ResolventOp& f_desc, const Metric& ups,
                   const Vector& w);

// tau*(x/tau - prox_{g/tau}(x/tau)), the resolvent J_{tau (dg)^{-1}}.
Vector conjugate_resolvent(const ResolventOp& prox_g, double tau,
                           const Vector& x);

// Metric form: J_{Sig B^{-1}}(x) = Sig (Id - J_{Sig^{-1} B})(Sig^{-1} x).
Vector conjugate_resolvent(const ResolventOp& b, const Metric& sig,
                           const Vector& x);

}  // namespace splitdr
