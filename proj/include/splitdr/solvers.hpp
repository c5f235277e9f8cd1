#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "splitdr/linops.hpp"
#include "splitdr/prox.hpp"
#include "splitdr/vec.hpp"

namespace splitdr {

// Primal-dual inclusion 0 in Ax + L*u, 0 in B^{-1}u - Lx with preconditioners
// Ups (on H) and Sig (on G). Construction verifies that Ups^{-1} - L* Sig L
// is monotone unless explicitly bypassed.
struct SdrProblem {
  ResolventOp a;
  ResolventOp b;
  LinearOp l;
  Metric ups;
  Metric sig;
  Metric ups_inv;
  Metric sig_inv;
  ConditionReport condition;
  bool condition_bypassed = false;

  static SdrProblem make(ResolventOp a, ResolventOp b, LinearOp l, Metric ups,
                         Metric sig, bool unchecked = false,
                         double tol = 1e-9);
};

struct SdrState {
  Vector x;
  Vector u;
  Vector lx;      // cached L x, refreshed once per step
  Vector last_v;  // v_n computed by the latest step
  Vector last_z;  // z_n computed by the latest step

  static SdrState start(const SdrProblem& prob, Vector x0, Vector u0);
};

// One pass of the recurrence
//   v = Sig (Id - J_{Sig^{-1} B})(L x + Sig^{-1} u)
//   z = x - Ups L* v
//   x+ = J_{Ups A} z
//   u+ = Sig L (x+ - x) + v
// with exactly one application of L and one of L*.
SdrState sdr_step(const SdrProblem& prob, const SdrState& s);

// The fixed-point map behind sdr_step; same code path.
std::pair<Vector, Vector> apply_T(const SdrProblem& prob, const Vector& x,
                                  const Vector& u);

// Primal-dual splitting form: primal iterates coincide with SDR when
// v0 = Sig (Id - J_{Sig^{-1} B})(L x0 + Sig^{-1} u0).
std::pair<Vector, Vector> pds_step(const SdrProblem& prob, const Vector& x,
                                   const Vector& v);

// Product-space form for 0 in Ax + sum_i L_i* B_i L_i x.
struct SdrBlock {
  ResolventOp b;
  LinearOp l;
  Metric sig;
  Metric sig_inv;

  SdrBlock(ResolventOp b_, LinearOp l_, Metric sig_)
      : b(std::move(b_)), l(std::move(l_)), sig(std::move(sig_)),
        sig_inv(sig.inverse()) {}
};

struct MultiblockProblem {
  ResolventOp a;
  std::vector<SdrBlock> blocks;
  Metric ups;
  Metric ups_inv;
  ConditionReport condition;
  bool condition_bypassed = false;

  static MultiblockProblem make(ResolventOp a, std::vector<SdrBlock> blocks,
                                Metric ups, bool unchecked = false,
                                double tol = 1e-9);
};

struct MultiblockState {
  Vector x;
  std::vector<Vector> v;
};

MultiblockState sdr_multiblock_step(const MultiblockProblem& prob,
                                    const MultiblockState& s);

// Metric Douglas-Rachford: z+ = J_{Ups L*BL}(2 J_{Ups A} z - z) + z - J_{Ups A} z.
Vector drs_step(const ResolventOp& a,
                const std::function<Vector(const Vector&)>& j_ups_lbl,
                const Metric& ups, const Vector& z);

// J_{Ups L*BL} = Id - Ups L* (L Ups L* + B^{-1})^{-1} L for surjective L and
// an invertible monotone matrix B. Throws when L Ups L* + B^{-1} is singular.
std::function<Vector(const Vector&)> make_composed_resolvent(
    const LinearOp& l, const Eigen::MatrixXd& b, const Metric& ups);

// Split-ADMM for min g(p) + f(KTp). The p-subproblem solver returns
// argmin_p g(p) + 1/2 ||Tp - r||^2_{Sig^{-1}} given r and a warm start.
struct SadmmProblem {
  std::function<Vector(const Vector& r, const Vector& warm)> p_solver;
  ResolventOp f;
  LinearOp t;
  LinearOp k;
  Metric ups;
  Metric sig;
  Metric ups_inv;
  ConditionReport condition;
  bool condition_bypassed = false;

  static SadmmProblem make(
      std::function<Vector(const Vector&, const Vector&)> p_solver,
      ResolventOp f, LinearOp t, LinearOp k, Metric ups, Metric sig,
      bool unchecked = false, double tol = 1e-9);
};

struct SadmmState {
  Vector p;
  Vector q;
  Vector x;
  Vector tp;   // cached T p
  Vector ktp;  // cached K T p
  Vector u;    // recovered dual, u+ = Sig K*(x+ - x) - T p+

  static SadmmState start(const SadmmProblem& prob, Vector p0, Vector q0,
                          Vector x0);
};

SadmmState sadmm_step(const SadmmProblem& prob, const SadmmState& s);

// Two-operator form for min g(p) + h(v) s.t. KTp + Jv = 0. The v-subproblem
// solver returns argmin_v h(v) + 1/2 ||Jv + c||^2_{Ups}.
struct Admm2Problem {
  std::function<Vector(const Vector& r, const Vector& warm)> p_solver;
  std::function<Vector(const Vector& c, const Vector& warm)> v_solver;
  LinearOp t;
  LinearOp k;
  LinearOp j;
  Metric ups;
  Metric sig;
  Metric ups_inv;

  static Admm2Problem make(
      std::function<Vector(const Vector&, const Vector&)> p_solver,
      std::function<Vector(const Vector&, const Vector&)> v_solver, LinearOp t,
      LinearOp k, LinearOp j, Metric ups, Metric sig, bool unchecked = false,
      double tol = 1e-9);
};

struct Admm2State {
  Vector p;
  Vector v;
  Vector x;
  Vector tp;
  Vector ktp;
  Vector jv;

  static Admm2State start(const Admm2Problem& prob, Vector p0, Vector v0,
                          Vector x0);
};

Admm2State admm2_step(const Admm2Problem& prob, const Admm2State& s);

// Fully explicit split (T = Id): both subproblems are metric proxes.
struct ExplicitSplitProblem {
  ResolventOp g;
  ResolventOp f;
  LinearOp k;
  Metric ups;
  Metric sig;
  Metric ups_inv;
  Metric sig_inv;

  static ExplicitSplitProblem make(ResolventOp g, ResolventOp f, LinearOp k,
                                   Metric ups, Metric sig,
                                   bool unchecked = false, double tol = 1e-9);
};

struct ExplicitSplitState {
  Vector p;
  Vector q;
  Vector x;
  Vector kp;  // cached K p
  Vector u;

  static ExplicitSplitState start(const ExplicitSplitProblem& prob, Vector p0,
                                  Vector q0, Vector x0);
};

ExplicitSplitState explicit_split_step(const ExplicitSplitProblem& prob,
                                       const ExplicitSplitState& s);

// sqrt(||new - old||^2 / ||old||^2); plain ||new - old|| when old = 0.
double relative_residual(const Vector& na, const Vector& nb, const Vector& oa,
                         const Vector& ob);

// max of the two natural-map residuals; zero exactly on Kuhn-Tucker pairs.
double kkt_residual(const SdrProblem& prob, const Vector& x, const Vector& u);

// Descent quantity of the convergence proof:
// ||x - xhat||^2_{Ups^{-1}} + ||u - uhat||^2_{Sig^{-1}} + ||x - x_prev||^2_U
// with U = Ups^{-1} - L* Sig L.
double fejer_quantity(const SdrProblem& prob, const Vector& x, const Vector& u,
                      const Vector& x_prev, const Vector& xhat,
                      const Vector& uhat);

enum class ResidualKind { relative_change, kkt };

struct StoppingRule {
  double eps = 1e-6;
  int max_iter = 100000;
  ResidualKind residual = ResidualKind::relative_change;
};

enum class SolveStatus { converged, max_iter };

struct SolveReport {
  int iterations = 0;
  SolveStatus status = SolveStatus::max_iter;
  std::vector<double> residual_history;
  std::optional<std::vector<double>> objective_history;
  double wall_seconds = 0.0;
  std::string warning;
};

// Runs step_and_residual until the returned residual is <= eps or max_iter
// is hit. The callable advances the underlying state and returns this
// iteration's residual; an optional objective callable is recorded per
// iteration. Never throws on max_iter.
SolveReport solve(const std::function<double()>& step_and_residual,
                  const StoppingRule& rule,
                  const std::function<double()>& objective = {});

}  // namespace splitdr
