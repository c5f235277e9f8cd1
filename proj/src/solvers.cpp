#include "splitdr/solvers.hpp"

#include <chrono>
#include <stdexcept>

namespace splitdr {

namespace {

void require_monotone(const ConditionReport& rep, const char* what) {
  if (!rep.is_monotone)
    throw std::invalid_argument(
        std::string(what) +
        ": metric condition violated (margin " + std::to_string(rep.margin) +
        "); pass unchecked=true to bypass");
}

}  // namespace

SdrProblem SdrProblem::make(ResolventOp a, ResolventOp b, LinearOp l,
                            Metric ups, Metric sig, bool unchecked,
                            double tol) {
  SdrProblem p{std::move(a), std::move(b), std::move(l), std::move(ups),
               std::move(sig), Metric::scalar(1.0, 1), Metric::scalar(1.0, 1),
               {}, unchecked};
  p.ups_inv = p.ups.inverse();
  p.sig_inv = p.sig.inverse();
  p.condition = check_metric_condition(p.ups, p.sig, p.l, tol);
  if (!unchecked) require_monotone(p.condition, "SdrProblem");
  return p;
}

SdrState SdrState::start(const SdrProblem& prob, Vector x0, Vector u0) {
  require_dim(x0, static_cast<std::size_t>(prob.l.in_dim), "SdrState");
  require_dim(u0, static_cast<std::size_t>(prob.l.out_dim), "SdrState");
  SdrState s;
  s.lx = prob.l.apply(x0);
  s.x = std::move(x0);
  s.u = std::move(u0);
  return s;
}

SdrState sdr_step(const SdrProblem& prob, const SdrState& s) {
  // v = Sig (Id - J_{Sig^{-1} B})(L x + Sig^{-1} u)
  Vector w = add(s.lx, prob.sig.solve(s.u));
  Vector jb = prob.b.resolve(prob.sig_inv, w);
  Vector v = prob.sig.apply(sub(w, jb));
  // z = x - Ups L* v
  Vector z = sub(s.x, prob.ups.apply(prob.l.apply_adjoint(v)));
  SdrState ns;
  ns.x = prob.a.resolve(prob.ups, z);
  ns.lx = prob.l.apply(ns.x);
  // u+ = Sig L (x+ - x) + v
  ns.u = add(prob.sig.apply(sub(ns.lx, s.lx)), v);
  ns.last_v = std::move(v);
  ns.last_z = std::move(z);
  return ns;
}

std::pair<Vector, Vector> apply_T(const SdrProblem& prob, const Vector& x,
                                  const Vector& u) {
  SdrState s = SdrState::start(prob, x, u);
  SdrState ns = sdr_step(prob, s);
  return {std::move(ns.x), std::move(ns.u)};
}

std::pair<Vector, Vector> pds_step(const SdrProblem& prob, const Vector& x,
                                   const Vector& v) {
  Vector xn = prob.a.resolve(
      prob.ups, sub(x, prob.ups.apply(prob.l.apply_adjoint(v))));
  Vector w = add(v, prob.sig.apply(prob.l.apply(axpby(2.0, xn, -1.0, x))));
  Vector vn = conjugate_resolvent(prob.b, prob.sig, w);
  return {std::move(xn), std::move(vn)};
}

MultiblockProblem MultiblockProblem::make(ResolventOp a,
                                          std::vector<SdrBlock> blocks,
                                          Metric ups, bool unchecked,
                                          double tol) {
  if (blocks.empty())
    throw std::invalid_argument("MultiblockProblem: no blocks");
  MultiblockProblem p{std::move(a), std::move(blocks), std::move(ups),
                      Metric::scalar(1.0, 1), {}, unchecked};
  p.ups_inv = p.ups.inverse();
  // Condition (on the stacked operator): Ups^{-1} - sum_i L_i* Sig_i L_i.
  // Scalar block metrics fold into the stack as sqrt(sig_i) L_i against the
  // identity metric; that keeps fused normal operators usable and leaves the
  // defect operator unchanged.
  bool all_scalar = true;
  for (const auto& b : p.blocks)
    all_scalar = all_scalar && b.sig.kind() == Metric::Kind::scalar;
  if (all_scalar) {
    std::vector<LinearOp> ls;
    for (const auto& b : p.blocks)
      ls.push_back(scaled_op(std::sqrt(b.sig.scalar_value()), b.l));
    LinearOp stacked = stack_ops(ls);
    p.condition = check_metric_condition(
        p.ups, Metric::scalar(1.0, stacked.out_dim), stacked, tol);
  } else {
    std::vector<LinearOp> ls;
    bool all_separable = true;
    for (const auto& b : p.blocks) {
      ls.push_back(b.l);
      all_separable = all_separable && b.sig.separable();
    }
    LinearOp stacked = stack_ops(ls);
    Metric sig_all = [&]() {
      if (all_separable) {
        Vector d;
        for (const auto& b : p.blocks) {
          if (b.sig.kind() == Metric::Kind::scalar)
            d.insert(d.end(), b.sig.dim(), b.sig.scalar_value());
          else
            d.insert(d.end(), b.sig.diagonal_values().begin(),
                     b.sig.diagonal_values().end());
        }
        return Metric::diagonal(std::move(d));
      }
      Eigen::MatrixXd m =
          Eigen::MatrixXd::Zero(stacked.out_dim, stacked.out_dim);
      int off = 0;
      for (const auto& b : p.blocks) {
        m.block(off, off, b.sig.dim(), b.sig.dim()) = b.sig.as_matrix();
        off += b.sig.dim();
      }
      return Metric::dense(m);
    }();
    p.condition = check_metric_condition(p.ups, sig_all, stacked, tol);
  }
  if (!unchecked) require_monotone(p.condition, "MultiblockProblem");
  return p;
}

MultiblockState sdr_multiblock_step(const MultiblockProblem& prob,
                                    const MultiblockState& s) {
  const std::size_t n = s.x.size();
  Vector acc(n, 0.0);
  for (std::size_t i = 0; i < prob.blocks.size(); ++i) {
    Vector t = prob.blocks[i].l.apply_adjoint(s.v[i]);
    kernels::axpby(1.0, acc.data(), 1.0, t.data(), acc.data(), n);
  }
  MultiblockState ns;
  ns.x = prob.a.resolve(prob.ups, sub(s.x, prob.ups.apply(acc)));
  Vector e = axpby(2.0, ns.x, -1.0, s.x);
  ns.v.reserve(prob.blocks.size());
  for (std::size_t i = 0; i < prob.blocks.size(); ++i) {
    const auto& blk = prob.blocks[i];
    try {
      Vector w = add(s.v[i], blk.sig.apply(blk.l.apply(e)));
      // J_{Sig_i B_i^{-1}} via the conjugation identity
      Vector sw = blk.sig.solve(w);
      Vector jb = blk.b.resolve(blk.sig_inv, sw);
      ns.v.push_back(blk.sig.apply(sub(sw, jb)));
    } catch (const std::exception& e2) {
      throw std::runtime_error("block " + std::to_string(i) + ": " +
                               e2.what());
    }
  }
  return ns;
}

Vector drs_step(const ResolventOp& a,
                const std::function<Vector(const Vector&)>& j_ups_lbl,
                const Metric& ups, const Vector& z) {
  Vector ja = a.resolve(ups, z);
  Vector reflected = axpby(2.0, ja, -1.0, z);
  Vector jb = j_ups_lbl(reflected);
  // z+ = J_{Ups L*BL}(2 J_{Ups A} z - z) + z - J_{Ups A} z
  Vector out = add(jb, sub(z, ja));
  return out;
}

std::function<Vector(const Vector&)> make_composed_resolvent(
    const LinearOp& l, const Eigen::MatrixXd& b, const Metric& ups) {
  Eigen::MatrixXd lm = l.materialize();
  Eigen::MatrixXd lul = lm * ups.as_matrix() * lm.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> binv_lu(b);
  if (!binv_lu.isInvertible())
    throw std::invalid_argument("make_composed_resolvent: B not invertible");
  Eigen::MatrixXd sys = lul + binv_lu.inverse();
  auto lu = std::make_shared<Eigen::FullPivLU<Eigen::MatrixXd>>(sys);
  if (!lu->isInvertible())
    throw std::invalid_argument(
        "make_composed_resolvent: L Ups L* + B^{-1} singular");
  LinearOp lcopy = l;
  Metric ucopy = ups;
  return [lcopy, ucopy, lu](const Vector& z) {
    Vector lz = lcopy.apply(z);
    Eigen::VectorXd sol =
        lu->solve(Eigen::Map<const Eigen::VectorXd>(lz.data(), lz.size()));
    Vector s(sol.data(), sol.data() + sol.size());
    return sub(z, ucopy.apply(lcopy.apply_adjoint(s)));
  };
}

SadmmProblem SadmmProblem::make(
    std::function<Vector(const Vector&, const Vector&)> p_solver,
    ResolventOp f, LinearOp t, LinearOp k, Metric ups, Metric sig,
    bool unchecked, double tol) {
  SadmmProblem p{std::move(p_solver), std::move(f),  std::move(t),
                 std::move(k),        std::move(ups), std::move(sig),
                 Metric::scalar(1.0, 1), {}, unchecked};
  p.ups_inv = p.ups.inverse();
  // Alg. condition: Sig^{-1} - K* Ups K monotone.
  p.condition = check_metric_condition(p.sig, p.ups, p.k, tol);
  if (!unchecked) require_monotone(p.condition, "SadmmProblem");
  return p;
}

SadmmState SadmmState::start(const SadmmProblem& prob, Vector p0, Vector q0,
                             Vector x0) {
  SadmmState s;
  s.tp = prob.t.apply(p0);
  s.ktp = prob.k.apply(s.tp);
  s.p = std::move(p0);
  s.q = std::move(q0);
  s.x = std::move(x0);
  return s;
}

SadmmState sadmm_step(const SadmmProblem& prob, const SadmmState& s) {
  // y = x + Ups(K T p - q)
  Vector y = add(s.x, prob.ups.apply(sub(s.ktp, s.q)));
  // p+ = argmin g(p) + 1/2 ||Tp - (Tp_n - Sig K* y)||^2_{Sig^{-1}}
  Vector r = sub(s.tp, prob.sig.apply(prob.k.apply_adjoint(y)));
  SadmmState ns;
  ns.p = prob.p_solver(r, s.p);
  ns.tp = prob.t.apply(ns.p);
  ns.ktp = prob.k.apply(ns.tp);
  // q+ = prox^{Ups}_f(Ups^{-1} x + K T p+)
  ns.q = metric_prox(prob.f, prob.ups, add(prob.ups.solve(s.x), ns.ktp));
  // x+ = x + Ups(K T p+ - q+)
  ns.x = add(s.x, prob.ups.apply(sub(ns.ktp, ns.q)));
  // u+ = Sig K*(x+ - x) - T p+
  ns.u = sub(prob.sig.apply(prob.k.apply_adjoint(sub(ns.x, s.x))), ns.tp);
  return ns;
}

Admm2Problem Admm2Problem::make(
    std::function<Vector(const Vector&, const Vector&)> p_solver,
    std::function<Vector(const Vector&, const Vector&)> v_solver, LinearOp t,
    LinearOp k, LinearOp j, Metric ups, Metric sig, bool unchecked,
    double tol) {
  Admm2Problem p{std::move(p_solver), std::move(v_solver), std::move(t),
                 std::move(k),        std::move(j),        std::move(ups),
                 std::move(sig),      Metric::scalar(1.0, 1)};
  p.ups_inv = p.ups.inverse();
  ConditionReport rep = check_metric_condition(p.sig, p.ups, p.k, tol);
  if (!unchecked) require_monotone(rep, "Admm2Problem");
  return p;
}

Admm2State Admm2State::start(const Admm2Problem& prob, Vector p0, Vector v0,
                             Vector x0) {
  Admm2State s;
  s.tp = prob.t.apply(p0);
  s.ktp = prob.k.apply(s.tp);
  s.jv = prob.j.apply(v0);
  s.p = std::move(p0);
  s.v = std::move(v0);
  s.x = std::move(x0);
  return s;
}

Admm2State admm2_step(const Admm2Problem& prob, const Admm2State& s) {
  // y = x + Ups(K T p + J v)
  Vector y = add(s.x, prob.ups.apply(add(s.ktp, s.jv)));
  Vector r = sub(s.tp, prob.sig.apply(prob.k.apply_adjoint(y)));
  Admm2State ns;
  ns.p = prob.p_solver(r, s.p);
  ns.tp = prob.t.apply(ns.p);
  ns.ktp = prob.k.apply(ns.tp);
  // v+ = argmin h(v) + 1/2 ||Jv + K T p+ + Ups^{-1} x||^2_{Ups}
  Vector c = add(ns.ktp, prob.ups.solve(s.x));
  ns.v = prob.v_solver(c, s.v);
  ns.jv = prob.j.apply(ns.v);
  // x+ = x + Ups(K T p+ + J v+)
  ns.x = add(s.x, prob.ups.apply(add(ns.ktp, ns.jv)));
  return ns;
}

ExplicitSplitProblem ExplicitSplitProblem::make(ResolventOp g, ResolventOp f,
                                                LinearOp k, Metric ups,
                                                Metric sig, bool unchecked,
                                                double tol) {
  ExplicitSplitProblem p{std::move(g),  std::move(f),
                         std::move(k),  std::move(ups),
                         std::move(sig), Metric::scalar(1.0, 1),
                         Metric::scalar(1.0, 1)};
  p.ups_inv = p.ups.inverse();
  p.sig_inv = p.sig.inverse();
  ConditionReport rep = check_metric_condition(p.sig, p.ups, p.k, tol);
  if (!unchecked) require_monotone(rep, "ExplicitSplitProblem");
  return p;
}

ExplicitSplitState ExplicitSplitState::start(const ExplicitSplitProblem& prob,
                                             Vector p0, Vector q0, Vector x0) {
  ExplicitSplitState s;
  s.kp = prob.k.apply(p0);
  s.p = std::move(p0);
  s.q = std::move(q0);
  s.x = std::move(x0);
  return s;
}

ExplicitSplitState explicit_split_step(const ExplicitSplitProblem& prob,
                                       const ExplicitSplitState& s) {
  // y = x + Ups(K p - q)
  Vector y = add(s.x, prob.ups.apply(sub(s.kp, s.q)));
  ExplicitSplitState ns;
  // p+ = prox^{Sig^{-1}}_g(p - Sig K* y)
  ns.p = metric_prox(prob.g, prob.sig_inv,
                     sub(s.p, prob.sig.apply(prob.k.apply_adjoint(y))));
  ns.kp = prob.k.apply(ns.p);
  // q+ = prox^{Ups}_f(Ups^{-1} x + K p+)
  ns.q = metric_prox(prob.f, prob.ups, add(prob.ups.solve(s.x), ns.kp));
  // x+ = x + Ups(K p+ - q+)
  ns.x = add(s.x, prob.ups.apply(sub(ns.kp, ns.q)));
  ns.u = sub(prob.sig.apply(prob.k.apply_adjoint(sub(ns.x, s.x))), ns.p);
  return ns;
}

double relative_residual(const Vector& na, const Vector& nb, const Vector& oa,
                         const Vector& ob) {
  const double diff = pair_dist_sq(na, nb, oa, ob);
  const double base = pair_norm_sq(oa, ob);
  if (base == 0.0) return std::sqrt(diff);
  return std::sqrt(diff / base);
}

double kkt_residual(const SdrProblem& prob, const Vector& x, const Vector& u) {
  Vector r1 = sub(x, prob.a.resolve(prob.ups,
                                    sub(x, prob.ups.apply(
                                               prob.l.apply_adjoint(u)))));
  Vector w = add(u, prob.sig.apply(prob.l.apply(x)));
  Vector r2 = sub(u, conjugate_resolvent(prob.b, prob.sig, w));
  return std::max(norm(r1), norm(r2));
}

double fejer_quantity(const SdrProblem& prob, const Vector& x, const Vector& u,
                      const Vector& x_prev, const Vector& xhat,
                      const Vector& uhat) {
  Vector dx = sub(x, xhat);
  Vector du = sub(u, uhat);
  double q = dot(dx, prob.ups.solve(dx)) + dot(du, prob.sig.solve(du));
  Vector step = sub(x, x_prev);
  Vector lstep = prob.l.apply(step);
  q += dot(step, prob.ups.solve(step)) - dot(lstep, prob.sig.apply(lstep));
  return q;
}

SolveReport solve(const std::function<double()>& step_and_residual,
                  const StoppingRule& rule,
                  const std::function<double()>& objective) {
  if (rule.max_iter < 1)
    throw std::invalid_argument("StoppingRule: max_iter >= 1");
  if (rule.eps < 0.0) throw std::invalid_argument("StoppingRule: eps >= 0");
  SolveReport rep;
  if (objective) rep.objective_history.emplace();
  const auto t0 = std::chrono::steady_clock::now();
  for (int it = 1; it <= rule.max_iter; ++it) {
    double r;
    try {
      r = step_and_residual();
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(it) + ": " +
                               e.what());
    }
    rep.residual_history.push_back(r);
    if (objective) rep.objective_history->push_back(objective());
    rep.iterations = it;
    if (r <= rule.eps) {
      rep.status = SolveStatus::converged;
      break;
    }
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace splitdr
