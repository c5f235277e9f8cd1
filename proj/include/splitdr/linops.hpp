#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "splitdr/vec.hpp"

namespace splitdr {

// Finite-dimensional bounded linear map with adjoint. Instances are value
// types holding closures; immutable after construction and safe to share.
struct LinearOp {
  int in_dim = 0;
  int out_dim = 0;
  std::function<void(const double*, double*)> fwd;
  std::function<void(const double*, double*)> adj;
  // Optional fused L*L application; power iteration uses it when present.
  std::function<void(const double*, double*)> normal;

  Vector apply(const Vector& x) const {
    require_dim(x, static_cast<std::size_t>(in_dim), "LinearOp::apply");
    Vector y(out_dim);
    fwd(x.data(), y.data());
    return y;
  }

  Vector apply_adjoint(const Vector& u) const {
    require_dim(u, static_cast<std::size_t>(out_dim),
                "LinearOp::apply_adjoint");
    Vector x(in_dim);
    adj(u.data(), x.data());
    return x;
  }

  // Dense materialization by probing the standard basis. Desk scale only.
  Eigen::MatrixXd materialize() const;
};

LinearOp identity_op(int n);
LinearOp zero_op(int in_dim, int out_dim);
LinearOp dense_op(const Eigen::MatrixXd& a);
LinearOp scaled_op(double a, const LinearOp& l);
// a after b: x -> a(b(x))
LinearOp compose_ops(const LinearOp& a, const LinearOp& b);
// x -> (l1 x, ..., lm x) stacked; adjoint sums the blocks
LinearOp stack_ops(const std::vector<LinearOp>& blocks);

// Symmetric positive definite operator with exact solve and square-root
// access. Scalar and diagonal metrics short-circuit everywhere; dense
// metrics carry an eigendecomposition computed at construction.
class Metric {
 public:
  enum class Kind { scalar, diagonal, dense };

  static Metric scalar(double value, int dim);
  static Metric diagonal(Vector d);
  static Metric dense(const Eigen::MatrixXd& m);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool separable() const { return kind_ != Kind::dense; }

  double scalar_value() const;
  const Vector& diagonal_values() const { return diag_; }

  Vector apply(const Vector& x) const;
  Vector solve(const Vector& x) const;
  Vector sqrt_apply(const Vector& x) const;
  Metric inverse() const;

  // Largest scale factor beta with <Mx, x> >= beta ||x||^2.
  double strong_monotonicity() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

  Eigen::MatrixXd as_matrix() const;
  LinearOp as_op() const;

 private:
  struct DenseData {
    Eigen::MatrixXd m;
    Eigen::MatrixXd eigvec;
    Eigen::VectorXd eigval;
  };

  Kind kind_ = Kind::scalar;
  int dim_ = 0;
  double value_ = 1.0;      // scalar kind
  Vector diag_;             // diagonal kind
  std::shared_ptr<const DenseData> dense_;  // dense kind
  bool dense_inverted_ = false;  // dense kind: apply with the inverse spectrum
  double lambda_min_ = 1.0;
  double lambda_max_ = 1.0;
};

enum class ConditionMethod { dense_eigen, power_iteration };

struct ConditionReport {
  bool is_monotone = false;
  // dense_eigen: smallest eigenvalue of Ups^{-1} - L* Sig L.
  // power_iteration: 1 - ||Sig^{1/2} L Ups^{1/2}||^2.
  double margin = 0.0;
  ConditionMethod method = ConditionMethod::dense_eigen;
};

struct PowerIterationResult {
  double value = 0.0;  // estimate of ||L||^2
  bool converged = false;
  int iterations = 0;
};

// Max over seeded random pairs of |<Lx,u> - <x,L*u>| / (1 + |<Lx,u>|).
double adjoint_check(const LinearOp& op, int trials, std::uint64_t seed);

// Single power iteration run on L*L from a seeded uniform start vector,
// normalized each step; stops when the successive estimate change drops
// below tol.
PowerIterationResult power_iteration(const LinearOp& op, double tol,
                                     int max_iter, std::uint64_t seed);

// Monotonicity of Ups^{-1} - L* Sig L: dense eigensolve when the squared
// input dimension is at most kDenseConditionLimit, power iteration on
// Sig^{1/2} L Ups^{1/2} above it.
inline constexpr int kDenseConditionLimit = 4096;

ConditionReport check_metric_condition(const Metric& ups, const Metric& sig,
                                       const LinearOp& l, double tol);

// Cocoercivity constant tau*sigma/(tau+sigma) of the block operator
// (x,u) -> (Ups^{-1}x - L*u, Sig^{-1}u - Lx).
double cocoercivity_constant(const Metric& ups, const Metric& sig);

// Dense block matrix of that operator, for cross-checks.
Eigen::MatrixXd block_v_matrix(const Metric& ups, const Metric& sig,
                               const LinearOp& l);

}  // namespace splitdr
