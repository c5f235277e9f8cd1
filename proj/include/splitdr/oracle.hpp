#pragma once

#include <Eigen/Dense>
#include <functional>
#include <variant>

#include "splitdr/vec.hpp"

namespace splitdr {

// Reference solvers independent of the splitting iterations, used by tests
// and by the improvement metric. dense_kkt localizes the active pattern and
// finishes with one exact piecewise-linear solve; proximal_gradient runs a
// plain forward-backward iteration with step 1/Lip. Both certify the result
// through subgradient_check.

enum class OracleMethod { dense_kkt, proximal_gradient };

struct OracleConfig {
  OracleMethod method = OracleMethod::dense_kkt;
  double tol = 1e-12;
  int max_iter = 2000000;
};

// min alpha ||x||_1 + 1/2 ||R x - b||^2
struct LassoProblem {
  Eigen::MatrixXd r;
  Vector b;
  double alpha = 0.0;
};

// min sum phi_delta(x_i - z_i) + alpha ||M x||_1 with M = P diag(d) P^T SPD
struct HuberL1Problem {
  Eigen::MatrixXd p;
  Eigen::VectorXd d;
  Vector z;
  double alpha = 1.0;
  double delta = 1.0;
};

using OracleProblem = std::variant<LassoProblem, HuberL1Problem>;

struct OracleResult {
  Vector x;
  double value = 0.0;
  double certificate = 0.0;
  int iterations = 0;
};

double oracle_objective(const OracleProblem& prob, const Vector& x);

// Distance from 0 to the subdifferential at x (componentwise interval
// arithmetic on the separable piece; the huber problem is evaluated in the
// w = Mx coordinates where the l1 term separates). Entries within tol of a
// kink are treated as sitting on it.
double subgradient_check(const OracleProblem& prob, const Vector& x,
                         double tol = 1e-9);

// Throws on certification failure (residual > 10 * cfg.tol).
OracleResult oracle_solve(const OracleProblem& prob,
                          const OracleConfig& cfg = {});

// Central differences against the analytic gradient; max relative defect
// over coordinates.
double finite_difference_check(const std::function<double(const Vector&)>& f,
                               const std::function<Vector(const Vector&)>& grad,
                               const Vector& x, double h = 1e-6);

// Multiplier-certified stationarity for min f(x) + sum_i g_i(L_i x):
// ||grad f(x) + sum L_i* v_i|| + sum dist(v_i, dg_i(L_i x)).
struct CertBlock {
  enum class Kind { l1, box } kind;
  double alpha = 0.0;  // l1 weight
  double lo = 0.0, hi = 0.0;
  std::function<Vector(const Vector&)> apply;      // L_i
  std::function<Vector(const Vector&)> adjoint;    // L_i*
  Vector multiplier;                               // candidate v_i
};

double composite_kkt_certificate(const Vector& smooth_grad,
                                 const std::vector<CertBlock>& blocks,
                                 const Vector& x, double tol = 1e-9);

// Kuhn-Tucker pair of the linear-quadratic instance A = d(1/2||Ra x - ba||^2),
// B = d(1/2||Rb y - bb||^2): solves the saddle system directly.
std::pair<Vector, Vector> lq_kkt_pair(const Eigen::MatrixXd& ra,
                                      const Vector& ba,
                                      const Eigen::MatrixXd& rb,
                                      const Vector& bb,
                                      const Eigen::MatrixXd& l);

// (f_ref - f_value) * 100 / f_ref, guarded near f_ref = 0.
double improvement_pct(double f_ref, double f_value);

}  // namespace splitdr
