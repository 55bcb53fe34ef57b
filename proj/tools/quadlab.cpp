#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quadlab/approx.hpp"
#include "quadlab/config.hpp"
#include "quadlab/domains.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/fooling.hpp"
#include "quadlab/harness.hpp"
#include "quadlab/montecarlo.hpp"
#include "quadlab/mz_cubature.hpp"
#include "quadlab/polyspace.hpp"

namespace {

using namespace quadlab;

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string config;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write " + path);
  f << text;
}

double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity") return INFINITY;
  std::size_t used = 0;
  const double p = std::stod(s, &used);
  if (used != s.size() || !(p >= 1.0)) throw PreconditionError("p must be a number >= 1 or 'inf'");
  return p;
}

std::string p_text(double p) { return std::isinf(p) ? "inf" : format_double(p); }

ProductWeight weight_or_unit(const std::string& path, int d) {
  return path.empty() ? ProductWeight(d) : load_weight(path);
}

std::string point_csv(const SpherePoint& x) {
  std::string s;
  for (std::size_t i = 0; i < x.ambient(); ++i) {
    if (i) s += ',';
    s += format_double(x[i]);
  }
  return s;
}

// --- mz-build -------------------------------------------------------------

struct MzArgs {
  int degree = 8;
  std::string weight;
  int dim = 2;
  double delta = kDefaultDelta;
  int trials = 0;
};

void run_mz(const Globals& g, const MzArgs& a) {
  const ProductWeight w = weight_or_unit(a.weight, a.dim);
  Rng rng = make_rng(g.seed, static_cast<std::uint64_t>(a.degree));
  MZFamily fam = build_mz_family(w, a.degree, a.delta, rng);
  if (a.trials > 0) {
    Rng vr = make_rng(g.seed, 1u << 20);
    const auto [A, B] = verify_mz(fam, w, 2.0, a.trials, vr);
    fam.empirical_A = A;
    fam.empirical_B = B;
  }
  std::cerr << "mz-build: n = " << a.degree << ", nodes = " << fam.size() << ", delta = " << fam.delta << '\n';
  write_output(g.out, mz_family_to_json(fam, w) + "\n");
}

// --- cubature ---------------------------------------------------------------

struct CubArgs {
  int degree = 6;
  std::string weight;
  int dim = 2;
  double delta = kDefaultDelta;
  double tol = 1e-10;
};

void run_cubature(const Globals& g, const CubArgs& a) {
  const ProductWeight w = weight_or_unit(a.weight, a.dim);
  CubatureOptions o;
  o.delta = a.delta;
  o.tol = a.tol;
  o.seed = g.seed;
  const CubatureRule rule = build_positive_cubature(w, a.degree, o);
  std::cerr << "cubature: N = " << a.degree << ", nodes = " << rule.size() << ", residual = " << rule.residual << '\n';
  write_output(g.out, cubature_to_json(rule) + "\n");
}

// --- approx -----------------------------------------------------------------

struct ApproxArgs {
  std::vector<int> degrees{8};
  std::string p = "2";
  std::string q;
  std::string weight;
  int dim = 2;
  std::string fn = "exp_x3";
  double delta = kDefaultDelta;
  std::string report;
};

void run_approx(const Globals& g, const ApproxArgs& a) {
  const ProductWeight w = weight_or_unit(a.weight, a.dim);
  const double p = parse_p(a.p);
  const double q = a.q.empty() ? p : parse_p(a.q);
  const SphereFunction f = sphere_function(a.fn, w.dim());
  std::ostringstream os;
  os << "n,p,q,nodes,iterations,converged,discrete_objective,error\n";
  for (int n : a.degrees) {
    const MZFamily& fam = cached_mz_family(w, n, a.delta, g.seed);
    const LpFitResult fit = least_lp_fit(f, fam, p);
    const SphericalPolynomial& P = fit.poly;
    const double err = norm_pw([&](const SpherePoint& x) { return f(x) - P(x); }, q, w);
    os << n << ',' << p_text(p) << ',' << p_text(q) << ',' << fam.size() << ',' << fit.iterations << ','
       << (fit.converged ? 1 : 0) << ',' << format_double(fit.objective) << ',' << format_double(err) << '\n';
  }
  write_output(a.report.empty() ? g.out : a.report, os.str());
}

// --- integrate / convergence -------------------------------------------------

struct IntegrateArgs {
  std::string mode = "ran";
  std::string estimator = "composite";
  int budget = 256;
  std::string p = "2";
  std::string weight;
  std::string domain;
  int dim = 2;
  std::string fn = "exp_x3";
  int reps = 1;
  double delta = kDefaultDelta;
};

void run_integrate(const Globals& g, const IntegrateArgs& a, const CLI::App& sub) {
  ConvergenceConfig c;
  if (!g.config.empty()) c = load_convergence_config(g.config);
  if (g.config.empty() || sub.count("--fn")) c.function = a.fn;
  if (g.config.empty() || sub.count("--mode")) c.mode = parse_mode(a.mode);
  if (g.config.empty() || sub.count("--estimator"))
    c.estimator = a.estimator == "standard" ? Estimator::Standard : Estimator::Composite;
  if (g.config.empty() || sub.count("--p")) c.p = parse_p(a.p);
  if (g.config.empty() || sub.count("--reps")) c.reps = a.reps;
  if (g.config.empty() || sub.count("--delta")) c.delta = a.delta;
  if (g.config.empty() || sub.count("--budget")) c.budgets = {a.budget};
  if (!a.domain.empty()) {
    c.domain = load_domain_weight(a.domain);
    c.weight = ProductWeight(c.domain->dim);
  } else if (g.config.empty() || sub.count("--weight") || sub.count("--dim")) {
    c.weight = weight_or_unit(a.weight, a.dim);
  }
  c.seed = g.seed;
  c.id = "integrate";
  const ConvergenceReport r = run_convergence(c, g.threads);
  write_output(g.out, report_csv(r));
}

struct ConvergenceArgs {
  std::string json;
};

void run_convergence_cmd(const Globals& g, const ConvergenceArgs& a, const CLI::App& app) {
  if (g.config.empty()) throw PreconditionError("convergence: --config is required");
  ConvergenceConfig c = load_convergence_config(g.config);
  if (app.count("--seed")) c.seed = g.seed;
  const ConvergenceReport r = run_convergence(c, g.threads);
  std::cerr << "convergence: " << c.id << " finished in " << r.wall_seconds << " s\n";
  write_output(g.out, report_csv(r));
  std::string json_path = a.json;
  if (json_path.empty() && !g.out.empty() && g.out != "-") json_path = g.out + ".json";
  if (!json_path.empty()) write_output(json_path, report_json(r));
}

// --- fooling ------------------------------------------------------------------

struct FoolingArgs {
  int N = 32;
  std::string weight;
  int dim = 2;
  int count = 64;
  bool check_norms = false;
  std::vector<int> scaling;
};

void run_fooling(const Globals& g, const FoolingArgs& a) {
  const ProductWeight w = weight_or_unit(a.weight, a.dim);
  const int Ns[] = {a.N};
  const double eps = strip_halfwidth_for(w, Ns);
  Rng rng = make_rng(g.seed);
  const std::vector<SpherePoint> centers = strip_complement_centers(w, a.N, static_cast<std::size_t>(a.count), rng, eps);
  std::ostringstream os;
  os << "kind,index,key,value\n";
  os << "param,,epsilon," << format_double(eps) << '\n';
  os << "param,,min_separation," << format_double(min_separation(centers)) << '\n';
  for (std::size_t j = 0; j < centers.size(); ++j)
    os << "center," << j << ",\"" << point_csv(centers[j]) << "\"," << format_double(w(centers[j])) << '\n';
  if (a.check_norms) {
    const double strip = std::sin(2.0 * eps);
    bool strip_ok = true;
    for (const SpherePoint& x : centers)
      for (const SpherePoint& v : w.directions()) strip_ok = strip_ok && std::abs(dot(x, v)) > strip;
    const bool disjoint = min_separation(centers) > 2.0 / a.N;
    os << "check,,disjoint_supports," << (disjoint ? 1 : 0) << '\n';
    os << "check,,strip_avoidance," << (strip_ok ? 1 : 0) << '\n';
    for (double p : {1.0, 2.0, static_cast<double>(INFINITY)}) {
      double mean = 0.0;
      for (const SpherePoint& x : centers) mean += bump_norm(w, x, a.N, p);
      os << "norm,," << p_text(p) << ',' << format_double(mean / static_cast<double>(centers.size())) << '\n';
    }
  }
  if (a.scaling.size() >= 2) {
    for (double p : {1.0, 2.0, static_cast<double>(INFINITY)}) {
      Rng sr = make_rng(g.seed, 1);
      const NormScaling s = verify_norm_scaling(w, p, a.scaling, sr, static_cast<std::size_t>(a.count));
      os << "slope,," << p_text(p) << ',' << format_double(s.slope) << '\n';
    }
  }
  write_output(g.out, os.str());
}

// --- transfer-check -------------------------------------------------------------

struct TransferArgs {
  std::string domain;
  std::vector<std::string> fns{"one"};
  int random = 0;
  int degree = 10;
  double tol = 1e-11;
};

void run_transfer(const Globals& g, const TransferArgs& a) {
  if (a.domain.empty()) throw PreconditionError("transfer-check: --domain is required");
  const DomainWeight w = load_domain_weight(a.domain);
  std::vector<std::string> fns = a.fns;
  for (int i = 0; i < a.random; ++i)
    fns.push_back("randpoly:" + std::to_string(a.degree) + ":" + std::to_string(derive_seed(g.seed, i)));
  std::ostringstream os;
  os << "function,domain_side,sphere_side,abs_diff\n";
  os << "calibration," << format_double(calibration(w.domain, w.dim)) << ",,\n";
  for (const std::string& fn : fns) {
    const TransferIntegral t = transfer_integral(domain_function(fn, w.dim), w, a.tol);
    os << fn << ',' << format_double(t.domain_side) << ',' << format_double(t.sphere_side) << ','
       << format_double(std::abs(t.domain_side - t.sphere_side)) << '\n';
  }
  write_output(g.out, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted quadrature and approximation on spheres, balls and simplices"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for replicated runs")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--config", g.config, "Experiment configuration (TOML or JSON)");

  MzArgs mz;
  auto* mz_cmd = app.add_subcommand("mz-build", "Build a Marcinkiewicz-Zygmund family");
  mz_cmd->add_option("--degree", mz.degree, "Polynomial degree n")->required();
  mz_cmd->add_option("--weight", mz.weight, "Weight file (default: unit weight)");
  mz_cmd->add_option("--dim", mz.dim, "Sphere dimension when no weight file is given");
  mz_cmd->add_option("--delta", mz.delta, "Separation factor (nodes are delta/n separated)");
  mz_cmd->add_option("--verify", mz.trials, "Random polynomials for an empirical p = 2 check");

  CubArgs cub;
  auto* cub_cmd = app.add_subcommand("cubature", "Build a positive cubature rule");
  cub_cmd->add_option("--degree", cub.degree, "Exactness degree N")->required();
  cub_cmd->add_option("--weight", cub.weight, "Weight file (default: unit weight)");
  cub_cmd->add_option("--dim", cub.dim, "Sphere dimension when no weight file is given");
  cub_cmd->add_option("--delta", cub.delta, "Candidate separation factor");
  cub_cmd->add_option("--tol", cub.tol, "Moment residual tolerance");

  ApproxArgs ap;
  auto* ap_cmd = app.add_subcommand("approx", "Weighted least-lp approximation errors");
  ap_cmd->add_option("--degree", ap.degrees, "Degree(s) n")->required();
  ap_cmd->add_option("--p", ap.p, "Fitting norm (number >= 1 or inf)");
  ap_cmd->add_option("--q", ap.q, "Error norm (default: p)");
  ap_cmd->add_option("--weight", ap.weight, "Weight file (default: unit weight)");
  ap_cmd->add_option("--dim", ap.dim, "Sphere dimension when no weight file is given");
  ap_cmd->add_option("--fn", ap.fn, "Test function");
  ap_cmd->add_option("--delta", ap.delta, "MZ separation factor");
  ap_cmd->add_option("--report", ap.report, "CSV report file (default: --out)");

  IntegrateArgs in;
  auto* in_cmd = app.add_subcommand("integrate", "Deterministic or randomized quadrature at one budget");
  in_cmd->add_option("--mode", in.mode, "det or ran")->check(CLI::IsMember({"det", "ran"}));
  in_cmd->add_option("--estimator", in.estimator, "composite or standard (ran only)")
      ->check(CLI::IsMember({"composite", "standard"}));
  in_cmd->add_option("--budget", in.budget, "Function evaluation budget n");
  in_cmd->add_option("--p", in.p, "Fitting norm of the composite rule");
  in_cmd->add_option("--weight", in.weight, "Weight file (default: unit weight)");
  in_cmd->add_option("--domain", in.domain, "Domain weight file (ball/simplex)");
  in_cmd->add_option("--dim", in.dim, "Sphere dimension when no weight file is given");
  in_cmd->add_option("--fn", in.fn, "Test function");
  in_cmd->add_option("--reps", in.reps, "Replications")->check(CLI::PositiveNumber);
  in_cmd->add_option("--delta", in.delta, "MZ separation factor");

  ConvergenceArgs cv;
  auto* cv_cmd = app.add_subcommand("convergence", "Run a configured convergence experiment");
  cv_cmd->add_option("--json", cv.json, "JSON report (default: <out>.json)");

  FoolingArgs fo;
  auto* fo_cmd = app.add_subcommand("fooling", "Construct fooling bumps and check their norms");
  fo_cmd->add_option("--N", fo.N, "Inverse bump radius")->required();
  fo_cmd->add_option("--weight", fo.weight, "Weight file (default: unit weight)");
  fo_cmd->add_option("--dim", fo.dim, "Sphere dimension when no weight file is given");
  fo_cmd->add_option("--count", fo.count, "Number of bumps");
  fo_cmd->add_flag("--check-norms", fo.check_norms, "Report support checks and mean bump norms");
  fo_cmd->add_option("--scaling", fo.scaling, "N values for norm-vs-n slope fits")->delimiter(',');

  TransferArgs tr;
  auto* tr_cmd = app.add_subcommand("transfer-check", "Compare domain and sphere sides of the transfer identity");
  tr_cmd->add_option("--domain", tr.domain, "Domain weight file")->required();
  tr_cmd->add_option("--fn", tr.fns, "Domain test function(s)");
  tr_cmd->add_option("--random", tr.random, "Additional random polynomials");
  tr_cmd->add_option("--degree", tr.degree, "Degree of the random polynomials");
  tr_cmd->add_option("--tol", tr.tol, "Oracle tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mz_cmd) run_mz(g, mz);
    if (*cub_cmd) run_cubature(g, cub);
    if (*ap_cmd) run_approx(g, ap);
    if (*in_cmd) run_integrate(g, in, *in_cmd);
    if (*cv_cmd) run_convergence_cmd(g, cv, app);
    if (*fo_cmd) run_fooling(g, fo);
    if (*tr_cmd) run_transfer(g, tr);
  } catch (const quadlab::Error& e) {
    std::cerr << "quadlab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "quadlab: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
