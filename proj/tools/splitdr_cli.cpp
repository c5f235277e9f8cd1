// splitdr command-line front end: TV restoration and Huber sparse-recovery
// benchmarks, the metric condition checker, and the reduction-theorem
// demonstrations. Emits RFC-4180 CSV with 17 significant digits so repeated
// runs with the same seeds are byte-identical up to the wall_ms column.

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "splitdr/equivalence.hpp"
#include "splitdr/experiments.hpp"
#include "splitdr/oracle.hpp"
#include "splitdr/pgm.hpp"
#include "splitdr/rng.hpp"

namespace {

using namespace splitdr;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int thread_budget(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("SPLITDR_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw)
      hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(std::min<std::size_t>(hw, jobs));
}

// Runs fn(i) for i in [0, jobs) on up to SPLITDR_THREADS workers. Results
// must be written to preallocated slots so output order stays fixed.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const int workers = thread_budget(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= jobs) return;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& l : lines) out << l << "\r\n";
}

void dump_iterate(const std::string& path, const Vector& x) {
  std::ofstream out(path);
  for (double v : x) out << fmt(v) << "\n";
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Flat key=value config support with precedence CLI > file > defaults:
// file entries are injected as options right after the subcommand name, so
// anything typed on the command line overrides them (TakeLast policy).
std::vector<std::string> inject_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") path = args[i + 1];
  if (path.empty() || args.size() < 2) return args;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string t) {
      const auto a = t.find_first_not_of(" \t\r");
      const auto b = t.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    injected.push_back("--" + key);
    std::stringstream ss(value);
    std::string tok;
    while (ss >> tok) injected.push_back(tok);
  }
  std::vector<std::string> merged(args.begin(), args.begin() + 2);
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + 2, args.end());
  return merged;
}

struct TvOptions {
  std::vector<int> synthetic;  // n seed
  std::string image;
  double alpha = 0.05;
  double noise_std = 1e-3;
  bool no_noise = false;
  int seeds = 5;
  std::string kappa_sweep;
  double tau = 0.0, sigma1 = 0.0, sigma2 = 0.0;
  bool boundary = false;
  double ell = 0.0;
  double eps = 1e-6;
  int max_iter = 200000;
  std::string out = "tv_results.csv";
  bool dump_iterates = false;
  bool unchecked = false;
};

int cmd_tv(const TvOptions& opt) {
  Vector truth;
  int n1 = 0, n2 = 0;
  std::uint64_t base_seed = 1;
  if (!opt.synthetic.empty()) {
    if (opt.synthetic.size() != 2) {
      std::cerr << "tv: --synthetic needs N SEED\n";
      return 2;
    }
    n1 = n2 = opt.synthetic[0];
    base_seed = static_cast<std::uint64_t>(opt.synthetic[1]);
    truth = synthetic_image(n1, base_seed);
  } else if (!opt.image.empty()) {
    PgmImage img = read_pgm(opt.image);
    n1 = img.n1;
    n2 = img.n2;
    truth = std::move(img.pixels);
  } else {
    std::cerr << "tv: provide --synthetic N SEED or --image PATH\n";
    return 2;
  }
  if (opt.eps <= 0.0) {
    std::cerr << "tv: eps must be positive\n";
    return 2;
  }

  auto grad = grad2d_op(n1, n2);
  auto pi = power_iteration(grad, 1e-12, 500000, 0x5eedULL);
  const double gn2 = pi.value;

  struct ParamSet {
    double tau, sigma1, sigma2;
    std::string label;
  };
  std::vector<ParamSet> sets;
  if (!opt.kappa_sweep.empty()) {
    int lo = 0, hi = 0;
    if (std::sscanf(opt.kappa_sweep.c_str(), "%d:%d", &lo, &hi) != 2 ||
        lo > hi) {
      std::cerr << "tv: --kappa-sweep expects LO:HI\n";
      return 2;
    }
    for (int k = lo; k <= hi; ++k) {
      const double s = k / (10.0 * std::sqrt(1.0 + gn2));
      sets.push_back({s, s, s, "kappa=" + std::to_string(k)});
    }
  } else if (opt.boundary) {
    if (opt.tau <= 0.0 || opt.ell <= 0.0 || opt.ell >= 1.0) {
      std::cerr << "tv: --boundary needs --tau > 0 and 0 < --ell < 1\n";
      return 2;
    }
    sets.push_back({opt.tau, (1.0 - opt.ell) / (opt.tau * gn2),
                    opt.ell / opt.tau, "boundary"});
  } else {
    if (opt.tau <= 0.0 || opt.sigma1 <= 0.0 || opt.sigma2 <= 0.0) {
      std::cerr << "tv: provide --kappa-sweep, --boundary, or tau/sigma1/sigma2\n";
      return 2;
    }
    sets.push_back({opt.tau, opt.sigma1, opt.sigma2, "manual"});
  }

  FftBlur blur(n1, n2);
  const int nseeds = std::max(1, opt.seeds);

  struct Row {
    int set = 0;
    std::uint64_t seed = 0;
    double tau = 0, s1 = 0, s2 = 0;
    int iterations = 0;
    double final_residual = 0, objective = 0, psnr_db = 0, wall_ms = 0;
    bool converged = true;
    Vector x;
  };
  std::vector<Row> rows(sets.size() * nseeds);

  // the condition depends only on the parameter set; verify before running
  for (const auto& ps : sets) {
    std::vector<SdrBlock> blocks;
    blocks.emplace_back(ResolventOp::l1(opt.alpha), grad,
                        Metric::scalar(ps.sigma1, 2 * n1 * n2));
    blocks.emplace_back(ResolventOp::box(0.0, 255.0), identity_op(n1 * n2),
                        Metric::scalar(ps.sigma2, n1 * n2));
    try {
      MultiblockProblem::make(ResolventOp::zero(), std::move(blocks),
                              Metric::scalar(ps.tau, n1 * n2), opt.unchecked);
    } catch (const std::invalid_argument& e) {
      std::cerr << "tv: " << ps.label << ": " << e.what() << "\n";
      return 1;
    }
  }

  parallel_for(rows.size(), [&](std::size_t idx) {
    const std::size_t si = idx / nseeds;
    const std::uint64_t seed = base_seed + idx % nseeds;
    const auto& ps = sets[si];
    Vector b = opt.no_noise ? blur.op().apply(truth)
                            : observe(blur, truth, opt.noise_std, seed);
    TvProblem prob{n1,    n2,     blur,      std::move(b), opt.alpha, 0.0,
                   255.0, ps.tau, ps.sigma1, ps.sigma2,    gn2};
    auto res = run_tv(prob, {opt.eps, opt.max_iter}, /*unchecked=*/true);
    Row& r = rows[idx];
    r.set = static_cast<int>(si);
    r.seed = seed;
    r.tau = ps.tau;
    r.s1 = ps.sigma1;
    r.s2 = ps.sigma2;
    r.iterations = res.report.iterations;
    r.final_residual = res.report.residual_history.empty()
                           ? 0.0
                           : res.report.residual_history.back();
    r.objective = res.objective;
    r.psnr_db = psnr(truth, res.x);
    r.wall_ms = res.report.wall_seconds * 1e3;
    r.converged = res.report.status == SolveStatus::converged;
    if (opt.dump_iterates) r.x = std::move(res.x);
  });

  std::vector<std::string> lines;
  lines.push_back(
      "run_id,seed,tau,sigma1,sigma2,iterations,final_residual,objective,"
      "psnr,wall_ms");
  bool all_converged = true;
  for (std::size_t idx = 0; idx < rows.size(); ++idx) {
    const Row& r = rows[idx];
    all_converged = all_converged && r.converged;
    lines.push_back(std::to_string(idx) + "," + std::to_string(r.seed) + "," +
                    fmt(r.tau) + "," + fmt(r.s1) + "," + fmt(r.s2) + "," +
                    std::to_string(r.iterations) + "," +
                    fmt(r.final_residual) + "," + fmt(r.objective) + "," +
                    fmt(r.psnr_db) + "," + fmt(r.wall_ms));
    if (opt.dump_iterates)
      dump_iterate(opt.out + ".run" + std::to_string(idx) + ".txt", r.x);
  }
  for (std::size_t si = 0; si < sets.size(); ++si) {
    std::vector<double> iters, resid, obj, ps_db, wall;
    for (const Row& r : rows)
      if (r.set == static_cast<int>(si)) {
        iters.push_back(r.iterations);
        resid.push_back(r.final_residual);
        obj.push_back(r.objective);
        ps_db.push_back(r.psnr_db);
        wall.push_back(r.wall_ms);
      }
    lines.push_back("agg" + std::to_string(si) + ",," + fmt(sets[si].tau) +
                    "," + fmt(sets[si].sigma1) + "," + fmt(sets[si].sigma2) +
                    "," + fmt(mean(iters)) + "," + fmt(mean(resid)) + "," +
                    fmt(mean(obj)) + "," + fmt(mean(ps_db)) + "," +
                    fmt(mean(wall)));
  }
  write_lines(opt.out, lines);
  std::cout << "wrote " << opt.out << " (" << rows.size() << " runs)\n";
  return all_converged ? 0 : 1;
}

struct HuberOptions {
  int n = 50;
  std::string classes = "A,B,C";
  std::string etas = "0,0.8,0.9,1";
  int seeds = 10;
  std::uint64_t seed = 1;
  double tau = 1.0;
  double sigma = 0.0;
  double alpha = 1.0;
  double delta = 1.0;
  double eps = 1e-6;
  int max_iter = 2000000;
  std::string out = "huber_results.csv";
};

int cmd_huber(const HuberOptions& opt) {
  if (opt.n < 2 || opt.tau <= 0.0 || opt.eps <= 0.0) {
    std::cerr << "huber: bad n/tau/eps\n";
    return 2;
  }
  std::vector<HuberClass> classes;
  for (char c : opt.classes)
    if (c != ',' && c != ' ') {
      try {
        classes.push_back(parse_huber_class(c));
      } catch (const std::exception& e) {
        std::cerr << "huber: " << e.what() << "\n";
        return 2;
      }
    }
  std::vector<double> etas;
  {
    std::stringstream ss(opt.etas);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const double e = std::stod(tok);
      if (e < 0.0 || e > 1.0) {
        std::cerr << "huber: eta must lie in [0,1]\n";
        return 2;
      }
      etas.push_back(e);
    }
  }
  if (classes.empty() || etas.empty() || opt.seeds < 1) {
    std::cerr << "huber: empty sweep\n";
    return 2;
  }

  struct Row {
    HuberClass cls = HuberClass::A;
    double eta = 0;
    std::uint64_t seed = 0;
    int iterations = 0;
    double wall_ms = 0, f_final = 0, improvement = 0;
    std::string status = "ok";
  };
  const std::size_t jobs = classes.size() * etas.size() * opt.seeds;
  std::vector<Row> rows(jobs);

  // one reference value per (class, seed) instance
  std::vector<double> fref(classes.size() * opt.seeds, 0.0);
  std::vector<std::string> fref_status(classes.size() * opt.seeds, "ok");
  parallel_for(fref.size(), [&](std::size_t i) {
    const std::size_t ci = i / opt.seeds;
    const std::uint64_t seed = opt.seed + i % opt.seeds;
    auto prob = build_huber(opt.n, classes[ci], seed);
    prob.alpha = opt.alpha;
    prob.delta = opt.delta;
    HuberL1Problem op{prob.p, prob.d, prob.z, prob.alpha, prob.delta};
    try {
      auto res = oracle_solve(OracleProblem{op},
                              {OracleMethod::dense_kkt, 1e-9, 2000000});
      fref[i] = res.value;
    } catch (const std::exception&) {
      fref_status[i] = "oracle_failure";
    }
  });

  parallel_for(jobs, [&](std::size_t idx) {
    const std::size_t per_class = etas.size() * opt.seeds;
    const std::size_t ci = idx / per_class;
    const std::size_t ei = (idx % per_class) / opt.seeds;
    const std::uint64_t seed = opt.seed + idx % opt.seeds;
    Row& r = rows[idx];
    r.cls = classes[ci];
    r.eta = etas[ei];
    r.seed = seed;
    auto prob = build_huber(opt.n, classes[ci], seed);
    prob.alpha = opt.alpha;
    prob.delta = opt.delta;
    prob.eta = etas[ei];
    try {
      auto res = run_huber(prob, opt.tau, {opt.eps, opt.max_iter}, opt.sigma,
                           /*record_objective=*/false);
      r.iterations = res.report.iterations;
      r.wall_ms = res.report.wall_seconds * 1e3;
      r.f_final = res.objective;
      const std::size_t fi = ci * opt.seeds + idx % opt.seeds;
      if (fref_status[fi] == "ok")
        r.improvement = improvement_pct(fref[fi], r.f_final);
      else
        r.status = fref_status[fi];
      if (res.report.status == SolveStatus::max_iter) r.status = "max_iter";
    } catch (const std::exception&) {
      r.status = "inner_failure";
      r.f_final = std::numeric_limits<double>::quiet_NaN();
    }
  });

  std::vector<std::string> lines;
  lines.push_back(
      "N,class,eta,seed,iterations,wall_ms,F_final,improvement_pct,status");
  bool all_ok = true;
  for (const Row& r : rows) {
    all_ok = all_ok && r.status == "ok";
    lines.push_back(std::to_string(opt.n) + "," +
                    std::string(1, huber_class_name(r.cls)) + "," +
                    fmt(r.eta) + "," + std::to_string(r.seed) + "," +
                    std::to_string(r.iterations) + "," + fmt(r.wall_ms) +
                    "," + fmt(r.f_final) + "," + fmt(r.improvement) + "," +
                    r.status);
  }
  for (std::size_t ci = 0; ci < classes.size(); ++ci)
    for (double eta : etas) {
      std::vector<double> iters, wall, f, imp;
      for (const Row& r : rows)
        if (r.cls == classes[ci] && r.eta == eta) {
          iters.push_back(r.iterations);
          wall.push_back(r.wall_ms);
          f.push_back(r.f_final);
          imp.push_back(r.improvement);
        }
      lines.push_back(std::to_string(opt.n) + "," +
                      std::string(1, huber_class_name(classes[ci])) + "," +
                      fmt(eta) + ",," + fmt(mean(iters)) + "," +
                      fmt(mean(wall)) + "," + fmt(mean(f)) + "," +
                      fmt(mean(imp)) + ",agg");
    }
  write_lines(opt.out, lines);
  std::cout << "wrote " << opt.out << " (" << rows.size() << " runs)\n";
  return all_ok ? 0 : 1;
}

struct CheckOptions {
  int grid = 0;
  int dim = 0;
  double tau = 1.0;
  double sigma = 1.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double tol = 1e-9;
};

int cmd_check(const CheckOptions& opt) {
  ConditionReport rep;
  if (opt.grid > 0) {
    const int n = opt.grid * opt.grid;
    const double s1 = opt.sigma1 > 0.0 ? opt.sigma1 : opt.sigma;
    const double s2 = opt.sigma2 > 0.0 ? opt.sigma2 : opt.sigma;
    std::vector<LinearOp> parts;
    parts.push_back(scaled_op(std::sqrt(s1), grad2d_op(opt.grid, opt.grid)));
    parts.push_back(scaled_op(std::sqrt(s2), identity_op(n)));
    LinearOp stacked = stack_ops(parts);
    rep = check_metric_condition(Metric::scalar(opt.tau, n),
                                 Metric::scalar(1.0, stacked.out_dim), stacked,
                                 opt.tol);
  } else if (opt.dim > 0) {
    rep = check_metric_condition(Metric::scalar(opt.tau, opt.dim),
                                 Metric::scalar(opt.sigma, opt.dim),
                                 identity_op(opt.dim), opt.tol);
  } else {
    std::cerr << "check: provide --grid N or --dim N\n";
    return 2;
  }
  std::cout << "monotone: " << (rep.is_monotone ? "yes" : "no") << "\n"
            << "margin:   " << fmt(rep.margin) << "\n"
            << "method:   "
            << (rep.method == ConditionMethod::dense_eigen ? "dense_eigen"
                                                           : "power_iteration")
            << "\n";
  return rep.is_monotone ? 0 : 1;
}

struct EquivOptions {
  int dim = 8;
  std::uint64_t seed = 1;
  int iters = 0;
  int instances = 3;
};

int cmd_equiv(const EquivOptions& opt) {
  double worst_pds = 0.0, worst_drs = 0.0, worst_sadmm = 0.0;
  for (int k = 0; k < opt.instances; ++k) {
    const std::uint64_t s = opt.seed + k;
    worst_pds = std::max(
        worst_pds, equiv_sdr_pds(s, opt.dim, opt.iters > 0 ? opt.iters : 50));
    worst_drs = std::max(
        worst_drs, equiv_sdr_drs(s, opt.dim, std::max(2, opt.dim / 2),
                                 opt.iters > 0 ? opt.iters : 200));
    worst_sadmm = std::max(
        worst_sadmm,
        equiv_sadmm_sdr(s, opt.dim, opt.iters > 0 ? opt.iters : 100));
  }
  std::cout << "sdr vs pds   max deviation: " << fmt(worst_pds) << "\n"
            << "sdr vs drs   max deviation: " << fmt(worst_drs) << "\n"
            << "sadmm vs sdr max deviation: " << fmt(worst_sadmm) << "\n";
  const bool ok =
      worst_pds <= 1e-9 && worst_drs <= 1e-9 && worst_sadmm <= 1e-9;
  std::cout << (ok ? "all reductions hold" : "DEVIATION ABOVE 1e-9") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splitdr: split Douglas-Rachford / split ADMM toolkit"};
  app.require_subcommand(1);

  TvOptions tv;
  auto* tv_cmd = app.add_subcommand("tv", "total-variation restoration runs");
  tv_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string tv_config;
  tv_cmd->add_option("--config", tv_config, "flat key=value config file");
  tv_cmd->add_option("--synthetic", tv.synthetic,
                     "synthetic piecewise-constant image: N SEED")
      ->expected(2);
  tv_cmd->add_option("--image", tv.image, "input PGM image");
  tv_cmd->add_option("--alpha", tv.alpha, "TV weight");
  tv_cmd->add_option("--noise-std", tv.noise_std,
                     "gaussian noise std on the [0,1] scale");
  tv_cmd->add_flag("--no-noise", tv.no_noise, "observe without noise");
  tv_cmd->add_option("--seeds", tv.seeds, "noise realizations per setting");
  tv_cmd->add_option("--kappa-sweep", tv.kappa_sweep,
                     "LO:HI sweep with tau=sigma=kappa/(10 sqrt(1+|grad|^2))");
  tv_cmd->add_option("--tau", tv.tau, "primal step");
  tv_cmd->add_option("--sigma1", tv.sigma1, "gradient-block dual step");
  tv_cmd->add_option("--sigma2", tv.sigma2, "box-block dual step");
  tv_cmd->add_flag("--boundary", tv.boundary,
                   "place steps on tau(sigma1 |grad|^2 + sigma2) = 1");
  tv_cmd->add_option("--ell", tv.ell, "boundary split parameter");
  tv_cmd->add_option("--eps", tv.eps, "stopping tolerance");
  tv_cmd->add_option("--max-iter", tv.max_iter, "iteration cap");
  tv_cmd->add_option("--out", tv.out, "output CSV path");
  tv_cmd->add_flag("--dump-iterates", tv.dump_iterates,
                   "write final iterates next to the CSV");
  tv_cmd->add_flag("--unchecked", tv.unchecked,
                   "bypass the metric condition check");

  HuberOptions hu;
  auto* hu_cmd = app.add_subcommand("huber", "huber + l1 spectral-split runs");
  hu_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string hu_config;
  hu_cmd->add_option("--config", hu_config, "flat key=value config file");
  hu_cmd->add_option("--n", hu.n, "problem dimension");
  hu_cmd->add_option("--classes", hu.classes, "matrix classes, e.g. A,B,C");
  hu_cmd->add_option("--etas", hu.etas, "spectral split exponents");
  hu_cmd->add_option("--seeds", hu.seeds, "instances per class");
  hu_cmd->add_option("--seed", hu.seed, "base seed");
  hu_cmd->add_option("--tau", hu.tau, "primal step");
  hu_cmd->add_option("--sigma", hu.sigma,
                     "dual step (default 0.99/(tau ||K||^2))");
  hu_cmd->add_option("--alpha", hu.alpha, "l1 weight");
  hu_cmd->add_option("--delta", hu.delta, "huber parameter");
  hu_cmd->add_option("--eps", hu.eps, "stopping tolerance");
  hu_cmd->add_option("--max-iter", hu.max_iter, "iteration cap");
  hu_cmd->add_option("--out", hu.out, "output CSV path");

  CheckOptions ck;
  auto* ck_cmd =
      app.add_subcommand("check", "metric monotonicity condition report");
  ck_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string ck_config;
  ck_cmd->add_option("--config", ck_config, "flat key=value config file");
  ck_cmd->add_option("--grid", ck.grid, "TV-shaped check on an NxN grid");
  ck_cmd->add_option("--dim", ck.dim, "identity-operator check in R^N");
  ck_cmd->add_option("--tau", ck.tau, "primal metric");
  ck_cmd->add_option("--sigma", ck.sigma, "dual metric (both blocks)");
  ck_cmd->add_option("--sigma1", ck.sigma1, "gradient-block metric");
  ck_cmd->add_option("--sigma2", ck.sigma2, "box-block metric");
  ck_cmd->add_option("--tol", ck.tol, "monotonicity slack");

  EquivOptions eq;
  auto* eq_cmd =
      app.add_subcommand("equiv", "run the three reduction-theorem checks");
  eq_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string eq_config;
  eq_cmd->add_option("--config", eq_config, "flat key=value config file");
  eq_cmd->add_option("--dim", eq.dim, "instance dimension");
  eq_cmd->add_option("--seed", eq.seed, "base seed");
  eq_cmd->add_option("--iters", eq.iters, "override iteration counts");
  eq_cmd->add_option("--instances", eq.instances, "seeded instances per check");

  std::vector<std::string> args;
  try {
    args = inject_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  std::vector<char*> argp;
  for (auto& a : args) argp.push_back(a.data());
  CLI11_PARSE(app, static_cast<int>(argp.size()), argp.data());

  try {
    if (tv_cmd->parsed()) return cmd_tv(tv);
    if (hu_cmd->parsed()) return cmd_huber(hu);
    if (ck_cmd->parsed()) return cmd_check(ck);
    if (eq_cmd->parsed()) return cmd_equiv(eq);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
