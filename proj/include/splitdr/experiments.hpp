#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>

#include "splitdr/solvers.hpp"
#include "splitdr/vec.hpp"

namespace splitdr {

// Discrete gradient on an n1 x n2 row-major image: forward differences with
// Neumann boundary (zero difference at the last index). Output stacks the
// horizontal-difference plane D1 over the vertical-difference plane D2.
void grad2d(const double* x, double* out, int n1, int n2);
// Exact adjoint: <grad2d x, v> = <x, div2d v> for every v.
void div2d(const double* v, double* out, int n1, int n2);

Vector grad2d(const Vector& img, int n1, int n2);
Vector div2d(const Vector& v, int n1, int n2);
LinearOp grad2d_op(int n1, int n2);

// Circular convolution with a truncated normalized Gaussian kernel,
// diagonalized by the 2-D DFT. The kernel is even, so the operator is
// symmetric and its spectrum is real.
class FftBlur {
 public:
  FftBlur(int n1, int n2, int size = 9, double stddev = 4.0);

  LinearOp op() const;
  // J_{tau df} for f = 1/2 ||R. - b||^2: w -> (Id + tau R*R)^{-1}(w + tau R*b),
  // one forward/inverse transform pair per call.
  ResolventOp data_resolvent(Vector b) const;

  const Vector& spectrum() const;       // eigenvalues of R, n1*n2 values
  const Vector& kernel_taps() const;    // size*size taps, row-major
  int n1() const;
  int n2() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

struct TvProblem {
  int n1 = 0;
  int n2 = 0;
  FftBlur blur;
  Vector b;
  double alpha = 0.05;
  double box_lo = 0.0;
  double box_hi = 255.0;
  double tau = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double grad_norm_sq = 0.0;  // measured ||grad||^2 used by the step sizes
};

// Piecewise-constant test image with seeded rectangles and disks in [0,255].
Vector synthetic_image(int n, std::uint64_t seed);

// b = R xbar + 255 * N(0, noise_std01) per pixel; noise_std01 lives on the
// [0,1]-scaled image.
Vector observe(const FftBlur& blur, const Vector& truth, double noise_std01,
               std::uint64_t seed);

// 1/2 ||Rx-b||^2 + alpha * ||grad x||_1 (anisotropic).
double tv_objective(const TvProblem& prob, const Vector& x);
double psnr(const Vector& ref, const Vector& x, double peak = 255.0);

struct TvRunResult {
  SolveReport report;
  Vector x;
  double objective = 0.0;
};

// Two-block SDR run: (alpha ||.||_1, grad, sigma1) and (box, Id, sigma2)
// against the quadratic data term resolved through the blur spectrum.
TvRunResult run_tv(const TvProblem& prob, const StoppingRule& rule,
                   bool unchecked = false, bool record_objective = true);

enum class HuberClass { A, B, C };

char huber_class_name(HuberClass c);
HuberClass parse_huber_class(char c);

// min F(x) = sum phi_delta(x_i - z_i) + alpha ||M x||_1 with M = P D P^T,
// split through K = P D^{1-eta} P^T and T = P D^eta P^T.
struct HuberProblem {
  int n = 0;
  Eigen::MatrixXd p;   // orthogonal
  Eigen::VectorXd d;   // positive spectrum, kappa = max/min pinned to 50
  Vector z;
  double alpha = 1.0;
  double delta = 1.0;
  double eta = 1.0;
  HuberClass cls = HuberClass::A;
  double kappa = 50.0;

  Eigen::MatrixXd m_matrix() const;
  Eigen::MatrixXd k_matrix() const;
  Eigen::MatrixXd t_matrix() const;
  double k_norm_sq() const;  // ||K||^2 = (max_i d_i^{1-eta})^2
  double objective(const Vector& x) const;
};

// lambda_max per class: A = n/1000, B = 4n, C = 100n; spectrum log-uniform
// with both endpoints pinned so kappa = 50 exactly.
HuberProblem build_huber(int n, HuberClass cls, std::uint64_t seed);

// Semismooth Newton solve of sigma grad h(. - z) + T*(T . - (T p_prev -
// sigma K* y)) = 0; generalized Jacobian sigma*diag(phi'') + T^T T.
Vector huber_p_update(const LinearOp& t, const LinearOp& k, double sigma,
                      const Vector& y, const Vector& p_prev, const Vector& z,
                      double delta, int* inner_iters = nullptr);

struct HuberRunResult {
  SolveReport report;
  Vector p;
  double objective = 0.0;
};

// sigma defaults to 0.99/(tau ||K||^2); eta = 0 runs the fully explicit
// split, eta > 0 runs SADMM with the Newton p-update.
HuberRunResult run_huber(const HuberProblem& prob, double tau,
                         const StoppingRule& rule, double sigma_override = 0.0,
                         bool record_objective = true);

}  // namespace splitdr
