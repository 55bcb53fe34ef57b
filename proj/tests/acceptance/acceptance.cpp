// One PASS/FAIL line per acceptance criterion.  Usage:
//   quadlab_acceptance [criterion ...] [--cli path/to/quadlab] [--workdir dir]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "quadlab/approx.hpp"
#include "quadlab/config.hpp"
#include "quadlab/domains.hpp"
#include "quadlab/fooling.hpp"
#include "quadlab/harness.hpp"
#include "quadlab/montecarlo.hpp"
#include "quadlab/mz_cubature.hpp"
#include "quadlab/oracle.hpp"
#include "quadlab/polyspace.hpp"
#include "quadlab/stats.hpp"

namespace fs = std::filesystem;
using namespace quadlab;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string cli;
  fs::path workdir;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ProductWeight axis_weight(std::vector<double> k) {
  const int d = static_cast<int>(k.size()) - 1;
  return ProductWeight::axis(d, k);
}

const ProductWeight& x3sq() {
  static const ProductWeight w = axis_weight({0, 0, 1});
  return w;
}

SphericalPolynomial random_poly(int d, int n, Rng& rng) {
  std::normal_distribution<double> g;
  std::vector<double> c(poly_dim(d, n));
  for (double& v : c) v = g(rng);
  return SphericalPolynomial(d, n, std::move(c));
}

// 1. Closed-form moments against the quadrature oracle.
Outcome criterion_1(const Context&) {
  const double ks[] = {0.0, 0.5, 1.0, 2.5};
  double worst_even = 0.0, worst_odd = 0.0;
  int count = 0;
  for (int d : {1, 2}) {
    std::vector<std::vector<double>> weights;
    for (double a : ks)
      for (double b : ks) {
        if (d == 1) {
          weights.push_back({a, b});
          continue;
        }
        for (double c : ks) weights.push_back({a, b, c});
      }
    for (std::size_t wi = 0; wi < weights.size(); ++wi) {
      const ProductWeight w = axis_weight(weights[wi]);
      // Odd monomials integrate to zero; the oracle side is checked on the
      // constant-κ weights (and on every weight for d = 1).
      const bool odd_too = d == 1 || (weights[wi][0] == weights[wi][1] && weights[wi][1] == weights[wi][2]);
      std::vector<std::array<int, 3>> alphas;
      for (int a = 0; a <= 20; ++a)
        for (int b = 0; a + b <= 20; ++b) {
          if (d == 1) {
            alphas.push_back({a, b, 0});
            continue;
          }
          for (int c = 0; a + b + c <= 20; ++c) alphas.push_back({a, b, c});
        }
      for (const auto& al : alphas) {
        const bool even = al[0] % 2 == 0 && al[1] % 2 == 0 && al[2] % 2 == 0;
        if (!even && !odd_too) continue;
        const std::span<const int> alpha(al.data(), static_cast<std::size_t>(d + 1));
        const double exact = exact_weighted_integral(SphericalPolynomial::monomial(d, alpha), w);
        OracleOptions o;
        o.tol = 1e-11;
        o.coordinate_breaks = false;
        const auto f = [&](const SpherePoint& x) {
          double v = 1.0;
          for (int i = 0; i <= d; ++i) v *= std::pow(x[i], al[i]);
          return v;
        };
        const double oracle = reference_integral(f, w, o);
        ++count;
        if (even) {
          worst_even = std::max(worst_even, std::abs(exact - oracle) / std::abs(oracle));
        } else {
          std::vector<double> e(static_cast<std::size_t>(d + 1));
          for (int i = 0; i <= d; ++i) e[i] = al[i] + 2.0 * weights[wi][i];
          const double scale = sphere_abs_moment(e);
          worst_odd = std::max(worst_odd, std::max(std::abs(exact), std::abs(oracle)) / scale);
        }
      }
    }
  }
  const bool pass = worst_even <= 1e-9 && worst_odd <= 1e-9;
  return {pass, fmt("%d monomial/weight pairs; max rel diff %.2e (even), max |value|/scale %.2e (odd)", count,
                    worst_even, worst_odd)};
}

// 2. Cap measures.
Outcome criterion_2(const Context&) {
  Rng rng = make_rng(2);
  std::uniform_real_distribution<double> u(1e-3, pi);
  double worst_area = 0.0, worst_mass = 0.0, worst_oracle = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double r = u(rng);
    const Cap cap(random_uniform_point(2, rng), r);
    const double closed = (1.0 - std::cos(r)) / 2.0;
    worst_area = std::max(worst_area, std::abs(cap_surface_measure(cap) - closed));
    worst_mass = std::max(worst_mass, std::abs(cap_mass(ProductWeight(2), cap) - closed));
    // The same cap through the quadrature oracle, which knows nothing about the closed form.
    OracleOptions o;
    o.tol = 1e-11;
    const double numeric = integrate_cap([](const SpherePoint&) { return 1.0; }, ProductWeight(2), cap, o).value;
    worst_oracle = std::max(worst_oracle, std::abs(numeric - closed));
  }
  const bool pass = worst_area <= 1e-10 && worst_mass <= 1e-8 && worst_oracle <= 1e-8;
  return {pass, fmt("50 radii: |σ − (1−cos r)/2| ≤ %.2e, cap_mass ≤ %.2e, oracle ≤ %.2e", worst_area, worst_mass,
                    worst_oracle)};
}

// 3. Empirical MZ constants.
Outcome criterion_3(const Context&) {
  bool pass = true;
  std::ostringstream os;
  for (double p : {1.0, 2.0, static_cast<double>(INFINITY)}) {
    std::vector<double> ratios;
    for (int n : {4, 8, 16}) {
      const MZFamily& fam = cached_mz_family(x3sq(), n, 0.5, 0x5eed);
      Rng rng = make_rng(3, static_cast<std::uint64_t>(n));
      const auto [A, B] = verify_mz(fam, x3sq(), p, 200, rng);
      pass = pass && A > 0.0 && B / A <= 10.0;
      ratios.push_back(B / A);
    }
    if (ratios[0] < ratios[1] && ratios[1] < ratios[2]) pass = false;
    os << "p=" << (std::isinf(p) ? std::string("inf") : fmt("%g", p)) << " B/A "
       << fmt("%.3f/%.3f/%.3f", ratios[0], ratios[1], ratios[2]) << "; ";
  }
  return {pass, os.str() + "n = 4/8/16, 200 polynomials each"};
}

// 4. Positive cubature up to degree 12.
Outcome criterion_4(const Context&) {
  const std::vector<ProductWeight> weights = {ProductWeight(2), x3sq(), axis_weight({0, 0, 0.5})};
  double worst = 0.0, min_lambda = INFINITY;
  std::size_t max_nodes = 0;
  for (const ProductWeight& w : weights)
    for (int N = 0; N <= 12; ++N) {
      const CubatureRule r = build_positive_cubature(w, N);
      for (double l : r.lambda) min_lambda = std::min(min_lambda, l);
      worst = std::max(worst, cubature_moment_error(r));
      max_nodes = std::max(max_nodes, r.size());
    }
  const bool pass = min_lambda >= 0.0 && worst <= 1e-8;
  return {pass, fmt("39 rules: min λ = %.3e, max moment error %.2e, largest rule %zu nodes", min_lambda, worst,
                    max_nodes)};
}

// 5. Least-ℓp contract.
Outcome criterion_5(const Context&) {
  const int n = 6;
  const MZFamily& fam = cached_mz_family(x3sq(), n, 0.5, 0x5eed);
  Rng rng = make_rng(5);
  bool pass = true;
  std::ostringstream os;
  double worst_repro = 0.0;
  for (double p : {1.0, 2.0, static_cast<double>(INFINITY)}) {
    const SphericalPolynomial P = random_poly(2, n, rng);
    const LpFitResult r = least_lp_fit(P, fam, p);
    for (std::size_t k = 0; k < P.coeffs().size(); ++k)
      worst_repro = std::max(worst_repro, std::abs(r.poly.coeffs()[k] - P.coeffs()[k]));
  }
  pass = pass && worst_repro <= 1e-8;
  os << fmt("reproduction %.1e; ", worst_repro);

  const auto f = [](const SpherePoint& x) { return std::pow(std::abs(x[2]), 1.5) + std::exp(x[0]); };
  std::vector<double> values(fam.size());
  for (std::size_t i = 0; i < fam.size(); ++i) values[i] = f(fam.nodes[i]);
  std::normal_distribution<double> g;
  for (double p : {1.0, 2.0, static_cast<double>(INFINITY)}) {
    const LpFitResult r = least_lp_fit(values, fam, p);
    double margin = INFINITY;
    for (int t = 0; t < 50; ++t) {
      // Random direction, scaled so the perturbation is comparable to the residual.
      std::vector<double> c(r.poly.coeffs().begin(), r.poly.coeffs().end()), dir(c.size());
      double norm = 0.0;
      for (double& v : dir) {
        v = g(rng);
        norm += v * v;
      }
      const double scale = r.objective * std::pow(10.0, -2.0 * (t % 3)) / std::sqrt(norm);
      for (std::size_t k = 0; k < c.size(); ++k) c[k] += scale * dir[k];
      const SphericalPolynomial Q(2, n, c);
      std::vector<double> res(fam.size());
      for (std::size_t i = 0; i < fam.size(); ++i) res[i] = values[i] - Q(fam.nodes[i]);
      margin = std::min(margin, discretized_norm(res, fam, p) / r.objective - 1.0);
    }
    pass = pass && margin >= -1e-9;
    os << "p=" << (std::isinf(p) ? std::string("inf") : fmt("%g", p)) << fmt(" margin %.1e; ", margin);
  }

  const LpFitResult once = least_lp_fit(values, fam, 2.0);
  const LpFitResult twice = least_lp_fit(once.poly, fam, 2.0);
  double idem = 0.0;
  for (std::size_t k = 0; k < once.poly.coeffs().size(); ++k)
    idem = std::max(idem, std::abs(once.poly.coeffs()[k] - twice.poly.coeffs()[k]));
  pass = pass && idem <= 1e-8;
  os << fmt("idempotence %.1e", idem);
  return {pass, os.str()};
}

// 6. Standard Monte Carlo: unbiasedness and the M^{-1/2} rate.
Outcome criterion_6(const Context&) {
  const auto f = [](const SpherePoint& x) { return std::exp(x[2]); };
  const double exact = reference_integral(f, x3sq());
  const int runs = 10000;
  double sum = 0.0, se2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    const RandomizedEstimate e = standard_mc(f, x3sq(), 100, derive_seed(6, r));
    sum += e.value;
    se2 += e.std_error * e.std_error;
  }
  const double mean = sum / runs, combined = std::sqrt(se2) / runs;
  const bool unbiased = std::abs(mean - exact) <= 4.0 * combined;

  std::vector<double> x, y;
  for (int M : {100, 1000, 10000, 100000}) {
    const int reps = 200;
    double sq = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double v = standard_mc(f, x3sq(), static_cast<std::uint64_t>(M), derive_seed(60 + M, r)).value;
      sq += (v - exact) * (v - exact);
    }
    x.push_back(std::log(M));
    y.push_back(0.5 * std::log(sq / reps));
  }
  const RateFit fit = fit_rate(x, y);
  const bool rate = std::abs(fit.slope + 0.5) <= 0.05;
  return {unbiased && rate, fmt("grand mean off by %.2f SE (10^4 runs, M = 100); RMS slope %.3f ± %.3f",
                                std::abs(mean - exact) / combined, fit.slope, fit.stderr_slope)};
}

// 7. Composite randomized quadrature.
Outcome criterion_7(const Context&) {
  const ProductWeight& w = x3sq();
  const int n0 = 512;
  const int m = composite_degree(n0, w);
  Rng prng = make_rng(7);
  const SphericalPolynomial P = random_poly(2, m, prng);
  const double exact_P = exact_weighted_integral(P, w);
  double worst_poly = 0.0;
  for (int s = 0; s < 100; ++s) {
    const RandomizedEstimate e = composite_randomized_quadrature(P, n0, 2.0, w, derive_seed(70, s));
    worst_poly = std::max(worst_poly, std::abs(e.value - exact_P));
  }

  ConvergenceConfig c;
  c.id = "composite";
  c.function = "exp_x3";
  c.weight = w;
  c.budgets = geometric_budgets(128, 4096);
  c.reps = 200;
  c.seed = 7;
  const ConvergenceReport comp = run_convergence(c);
  ConvergenceConfig plain = c;
  plain.estimator = Estimator::Standard;
  plain.budgets = {2048};
  const ConvergenceReport mc = run_convergence(plain);

  double comp_2048 = 0.0;
  bool honest = true;
  for (const BudgetSummary& s : comp.summary) {
    if (s.n == 2048) comp_2048 = s.mean_abs_error;
    honest = honest && s.max_function_evals <= static_cast<std::uint64_t>(s.n);
  }
  const double mc_2048 = mc.summary.front().mean_abs_error;
  const bool slope_ok = comp.mean_abs_fit && comp.mean_abs_fit->slope < -0.5;
  const bool pass = worst_poly <= 1e-8 && comp_2048 <= 0.1 * mc_2048 && slope_ok && honest;
  return {pass, fmt("Π_%d exact to %.1e over 100 seeds; n=2048 error %.2e vs plain MC %.2e (ratio %.1e); slope %.2f",
                    m, worst_poly, comp_2048, mc_2048, comp_2048 / mc_2048,
                    comp.mean_abs_fit ? comp.mean_abs_fit->slope : NAN)};
}

// 8. Recovery decay for the cusp.
Outcome criterion_8(const Context&) {
  const auto f = [](const SpherePoint& x) { return std::pow(std::abs(x[2]), 1.5); };
  std::vector<double> x, y;
  std::ostringstream os;
  for (int n : {4, 8, 16, 32, 64}) {
    const double e = recovery_error(f, n, 2.0, 2.0, x3sq());
    x.push_back(std::log(n));
    y.push_back(std::log(e));
    os << fmt("%.2e ", e);
  }
  const RateFit fit = fit_rate(x, y);
  const bool pass = std::abs(fit.slope + 0.75) <= 0.3;
  return {pass, fmt("errors n=4..64: %sslope %.2f (target −0.75 ± 0.3)", os.str().c_str(), fit.slope)};
}

// 9. Fooling-function norm scalings.
Outcome criterion_9(const Context&) {
  const ProductWeight& w = x3sq();
  const int Ns[] = {8, 16, 32, 64};
  const double eps = strip_halfwidth_for(w, Ns);
  double slopes[3];
  int i = 0;
  for (double p : {1.0, 2.0, static_cast<double>(INFINITY)}) {
    Rng rng = make_rng(9);
    slopes[i++] = verify_norm_scaling(w, p, Ns, rng).slope;
  }
  bool disjoint = true, strips = true;
  for (int N : Ns) {
    Rng rng = make_rng(90, static_cast<std::uint64_t>(N));
    const auto centers = strip_complement_centers(w, N, 4 * static_cast<std::size_t>(N), rng, eps);
    disjoint = disjoint && min_separation(centers) > 2.0 / N;
    for (const SpherePoint& c : centers) strips = strips && std::abs(c[2]) > std::sin(2 * eps);
    // Points inside one support see no other bump.
    const FoolingFunction f(centers, N);
    Rng pts = make_rng(91, static_cast<std::uint64_t>(N));
    std::normal_distribution<double> g;
    for (std::size_t j = 0; j < centers.size(); ++j)
      for (int t = 0; t < 20; ++t) {
        const double r = (1.0 / N) * std::abs(g(pts)) / 3.0;
        const SpherePoint dir = random_uniform_point(2, pts);
        // Move from the center along a random tangent direction.
        std::array<double, 3> v{};
        const double ip = dot(dir, centers[j]);
        double nv = 0.0;
        for (int k = 0; k < 3; ++k) {
          v[k] = dir[k] - ip * centers[j][k];
          nv += v[k] * v[k];
        }
        nv = std::sqrt(nv);
        std::array<double, 3> q{};
        for (int k = 0; k < 3; ++k) q[k] = std::cos(r) * centers[j][k] + std::sin(r) * v[k] / nv;
        const SpherePoint x(q);
        if (geodesic_distance(x, centers[j]) >= 1.0 / N) continue;
        disjoint = disjoint && f(x) == f.bump(j, x);
      }
  }
  const bool pass = std::abs(slopes[0] + 1.0) <= 0.1 && std::abs(slopes[1] + 0.5) <= 0.1 &&
                    std::abs(slopes[2]) <= 0.05 && disjoint && strips;
  return {pass, fmt("slopes p=1 %.3f, p=2 %.3f, p=inf %.3f (ε = %.3f); disjoint %s, strip-avoiding %s", slopes[0],
                    slopes[1], slopes[2], eps, disjoint ? "yes" : "no", strips ? "yes" : "no")};
}

// 10. Transfer identity on the disc.
Outcome criterion_10(const Context&) {
  double worst_transfer = 0.0, worst_det = 0.0, worst_ran = 0.0;
  int ran_degree = 0;
  for (double mu : {0.0, 0.5, 1.0}) {
    const DomainWeight w(Domain::Ball, 2, {0.0, 0.0}, mu);
    const int n_ran = 8192;
    ran_degree = std::min(10, composite_degree(n_ran, transfer_weight(w)));
    for (int k = 0; k < 50; ++k) {
      const int degree = 1 + k % 10;
      const DomainFunction f = domain_function(fmt("randpoly:%d:%d", degree, 100 + k), 2);
      const TransferIntegral t = transfer_integral(f, w, 1e-11);
      const double scale = std::max(1.0, std::abs(t.domain_side));
      worst_transfer = std::max(worst_transfer, std::abs(t.domain_side - t.sphere_side) / scale);
      const RandomizedEstimate det = domain_quadrature(f, w, 121, QuadratureMode::Deterministic, 2.0, 0);
      worst_det = std::max(worst_det, std::abs(det.value - t.domain_side) / scale);
      if (degree <= ran_degree && k < 20) {
        const RandomizedEstimate ran =
            domain_quadrature(f, w, n_ran, QuadratureMode::Randomized, 2.0, derive_seed(10, k));
        worst_ran = std::max(worst_ran, std::abs(ran.value - t.domain_side) / scale);
      }
    }
  }
  const bool pass = worst_transfer <= 1e-8 && worst_det <= 1e-8 && worst_ran <= 1e-8;
  return {pass, fmt("μ ∈ {0, 1/2, 1}, 50 polynomials each: transfer %.1e, det (n=121) %.1e, ran (deg ≤ %d) %.1e",
                    worst_transfer, worst_det, ran_degree, worst_ran)};
}

// 11. CLI determinism.
Outcome criterion_11(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli given"};
  const fs::path dir = ctx.workdir.empty() ? fs::temp_directory_path() / "quadlab_acceptance" : ctx.workdir;
  fs::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& text) { std::ofstream(dir / name) << text; };
  write("w.toml", "dim = 2\n[[factors]]\ndirection = [0, 0, 1]\nkappa = 1.0\n");
  write("ball.toml", "domain = \"ball\"\ndim = 2\nmu = 1.0\nkappa = [0, 0]\n");
  write("ran.toml",
        "id = \"ran\"\nfunction = \"exp_x3\"\nweight = \"w.toml\"\nmode = \"ran\"\np = 2\nreps = 20\nseed = 5\n"
        "grid = { start = 128, stop = 1024 }\n");
  write("det.toml", "id = \"det\"\nfunction = \"cusp\"\nweight = \"w.toml\"\nmode = \"det\"\nbudgets = [16, 36, 64, 100]\n");
  write("ball_ran.json",
        R"({"id": "ball", "function": "exp_x1", "domain": {"domain": "ball", "dim": 2, "mu": 0.5}, "mode": "ran", "reps": 5, "budgets": [256, 512]})");

  const std::string q = "\"" + ctx.cli + "\"";
  const std::string d = "\"" + dir.string() + "/";
  struct Command {
    std::string name, args, output;
  };
  const std::vector<Command> commands = {
      {"convergence-ran", "--seed 5 --config " + d + "ran.toml\"", "conv_ran.csv"},
      {"convergence-det", "--config " + d + "det.toml\"", "conv_det.csv"},
      {"convergence-ball", "--seed 3 --config " + d + "ball_ran.json\"", "conv_ball.csv"},
      {"integrate", "integrate --mode ran --budget 512 --p 2 --weight " + d + "w.toml\" --fn builtin:exp_x3 --reps 10 --seed 11",
       "integrate.csv"},
      {"approx", "approx --degree 4 8 --p 2 --weight " + d + "w.toml\" --fn builtin:cusp --seed 1", "approx.csv"},
      {"fooling", "fooling --N 32 --weight " + d + "w.toml\" --count 64 --check-norms --seed 4", "fooling.csv"},
      {"transfer-check", "transfer-check --domain " + d + "ball.toml\" --random 5 --seed 8", "transfer.csv"},
      {"mz-build", "mz-build --degree 6 --weight " + d + "w.toml\" --seed 2", "mz.json"},
      {"cubature", "cubature --degree 6 --weight " + d + "w.toml\" --seed 2", "rule.json"},
  };
  std::ostringstream os;
  bool pass = true;
  int identical = 0;
  for (const Command& c : commands) {
    std::string outs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / (std::to_string(run) + "_" + c.output);
      std::string args = c.args;
      if (args.rfind("--", 0) == 0) args = "convergence " + args;
      // The thread count must not matter either.
      const std::string threads = run == 0 ? " --threads 1" : " --threads 2";
      const std::string cmd = q + " " + args + threads + " --out \"" + out.string() + "\" 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) {
        pass = false;
        os << c.name << " failed; ";
        break;
      }
      outs[run] = read_text_file(out);
    }
    if (!outs[0].empty() && outs[0] == outs[1])
      ++identical;
    else {
      pass = false;
      os << c.name << " differs; ";
    }
  }
  os << identical << "/" << commands.size() << " experiments byte-identical across reruns";
  return {pass, os.str()};
}

const char* const kTitles[] = {
    "",
    "moment formula vs oracle",
    "cap geometry",
    "MZ inequality",
    "positive cubature",
    "least-lp contract",
    "Monte Carlo unbiasedness and rate",
    "composite randomized quadrature",
    "recovery decay for the cusp",
    "fooling-function scalings",
    "transfer identity on the disc",
    "CLI determinism",
};

using Criterion = Outcome (*)(const Context&);
const Criterion kCriteria[] = {nullptr,     criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5,
                               criterion_6, criterion_7, criterion_8, criterion_9, criterion_10, criterion_11};

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  Context ctx;
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc)
      ctx.cli = argv[++i];
    else if (a == "--workdir" && i + 1 < argc)
      ctx.workdir = argv[++i];
    else
      which.push_back(std::atoi(a.c_str()));
  }
  if (which.empty())
    for (int k = 1; k <= 11; ++k) which.push_back(k);

  bool all = true;
  for (int k : which) {
    if (k < 1 || k > 11) {
      std::printf("unknown criterion %d\n", k);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = kCriteria[k](ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s — %s [%.1f s]\n", k, o.pass ? "PASS" : "FAIL", kTitles[k], o.detail.c_str(),
                secs);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
