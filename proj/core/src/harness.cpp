#include "quadlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "config_util.hpp"
#include "json_util.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/oracle.hpp"
#include "quadlab/polyspace.hpp"

namespace quadlab {

namespace {

std::string_view strip_prefix(std::string_view spec) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.substr(0, prefix.size()) == prefix) spec.remove_prefix(prefix.size());
  return spec;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("bad integer '" + s + "' in " + std::string(what));
  }
}

std::vector<int> parse_exponents(std::string_view list, int count, std::string_view spec) {
  const auto parts = split(list, ',');
  if (static_cast<int>(parts.size()) != count)
    throw DimensionError("function '" + std::string(spec) + "' needs " + std::to_string(count) + " exponents");
  std::vector<int> e;
  for (const auto& p : parts) {
    const int v = parse_int(p, spec);
    if (v < 0) throw PreconditionError("negative exponent in '" + std::string(spec) + "'");
    e.push_back(v);
  }
  return e;
}

// randpoly:n[:seed] → (n, seed)
std::pair<int, std::uint64_t> parse_randpoly(std::string_view rest, std::string_view spec) {
  const auto parts = split(rest, ':');
  if (parts.empty() || parts.size() > 2) throw PreconditionError("bad function spec '" + std::string(spec) + "'");
  const int n = parse_int(parts[0], spec);
  if (n < 0) throw PreconditionError("negative degree in '" + std::string(spec) + "'");
  const std::uint64_t seed = parts.size() == 2 ? static_cast<std::uint64_t>(std::stoull(parts[1])) : 1;
  return {n, seed};
}

}  // namespace

SphereFunction sphere_function(std::string_view spec_in, int d) {
  if (d != 1 && d != 2) throw DimensionError("sphere_function: d must be 1 or 2");
  const std::string_view spec = strip_prefix(spec_in);
  if (spec == "exp_x3") return [d](const SpherePoint& x) { return std::exp(x[d]); };
  if (spec == "cusp") return [d](const SpherePoint& x) { return std::pow(std::abs(x[d]), 1.5); };
  if (spec == "one") return [](const SpherePoint&) { return 1.0; };
  if (spec.rfind("monomial:", 0) == 0) {
    const std::vector<int> e = parse_exponents(spec.substr(9), d + 1, spec);
    return [e](const SpherePoint& x) {
      double v = 1.0;
      for (std::size_t i = 0; i < e.size(); ++i) v *= std::pow(x[i], e[i]);
      return v;
    };
  }
  if (spec.rfind("randpoly:", 0) == 0) {
    const auto [n, seed] = parse_randpoly(spec.substr(9), spec);
    Rng rng = make_rng(seed);
    std::normal_distribution<double> g;
    std::vector<double> c(poly_dim(d, n));
    for (double& v : c) v = g(rng);
    SphericalPolynomial P(d, n, std::move(c));
    return [P](const SpherePoint& x) { return P(x); };
  }
  if (spec.rfind("poly:", 0) == 0) {
    SphericalPolynomial P = polynomial_from_json(read_text_file(std::string(spec.substr(5))));
    if (P.dim() != d) throw DimensionError("poly: file is for a different sphere dimension");
    return [P](const SpherePoint& x) { return P(x); };
  }
  throw PreconditionError("unknown sphere function '" + std::string(spec_in) + "'");
}

DomainFunction domain_function(std::string_view spec_in, int d) {
  if (d != 1 && d != 2) throw DimensionError("domain_function: d must be 1 or 2");
  const std::string_view spec = strip_prefix(spec_in);
  if (spec == "one") return [](const DomainPoint&) { return 1.0; };
  if (spec == "exp_x1") return [](const DomainPoint& x) { return std::exp(x[0]); };
  if (spec.rfind("monomial:", 0) == 0) {
    const std::vector<int> e = parse_exponents(spec.substr(9), d, spec);
    return [e](const DomainPoint& x) {
      double v = 1.0;
      for (std::size_t i = 0; i < e.size(); ++i) v *= std::pow(x[i], e[i]);
      return v;
    };
  }
  if (spec.rfind("randpoly:", 0) == 0) {
    const auto [n, seed] = parse_randpoly(spec.substr(9), spec);
    Rng rng = make_rng(seed);
    std::normal_distribution<double> g;
    struct Term {
      int a, b;
      double c;
    };
    std::vector<Term> terms;
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= (d == 2 ? n - a : 0); ++b) terms.push_back({a, b, g(rng)});
    return [terms, d](const DomainPoint& x) {
      double v = 0.0;
      for (const Term& t : terms) v += t.c * std::pow(x[0], t.a) * (d == 2 ? std::pow(x[1], t.b) : 1.0);
      return v;
    };
  }
  throw PreconditionError("unknown domain function '" + std::string(spec_in) + "'");
}

std::vector<int> geometric_budgets(int start, int stop, int ratio) {
  if (start < 1 || stop < start || ratio < 2) throw PreconditionError("geometric_budgets: need 1 <= start <= stop, ratio >= 2");
  std::vector<int> out;
  for (long long n = start; n <= stop; n *= ratio) out.push_back(static_cast<int>(n));
  return out;
}

ConvergenceConfig parse_convergence_config(std::string_view text, ConfigFormat format,
                                           const std::filesystem::path& base_dir) {
  const nlohmann::json j = detail::parse_document(text, format);
  const auto resolve = [&](const std::string& name) {
    const std::filesystem::path p(name);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  ConvergenceConfig c;
  try {
    c.id = j.value("id", c.id);
    c.function = j.value("function", c.function);
    if (j.contains("domain")) {
      const auto& d = j.at("domain");
      c.domain = d.is_string() ? load_domain_weight(resolve(d.get<std::string>())) : detail::domain_weight_from_json(d);
    }
    if (j.contains("weight")) {
      const auto& w = j.at("weight");
      c.weight = w.is_string() ? load_weight(resolve(w.get<std::string>())) : detail::weight_from_json(w);
    } else if (c.domain) {
      c.weight = ProductWeight(c.domain->dim);
    }
    c.mode = parse_mode(j.value("mode", std::string("ran")));
    const std::string est = j.value("estimator", std::string("composite"));
    if (est == "composite")
      c.estimator = Estimator::Composite;
    else if (est == "standard")
      c.estimator = Estimator::Standard;
    else
      throw PreconditionError("config: estimator must be composite or standard");
    if (j.contains("p")) {
      const auto& p = j.at("p");
      c.p = p.is_string() && (p.get<std::string>() == "inf" || p.get<std::string>() == "infinity")
                ? INFINITY
                : p.get<double>();
    }
    if (j.contains("budgets")) {
      c.budgets = j.at("budgets").get<std::vector<int>>();
    } else if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.budgets = geometric_budgets(g.at("start").get<int>(), g.at("stop").get<int>(), g.value("ratio", 2));
    }
    c.reps = j.value("reps", c.reps);
    c.seed = j.value("seed", c.seed);
    c.delta = j.value("delta", c.delta);
    c.family_seed = j.value("family_seed", c.family_seed);
    c.reference_tol = j.value("reference_tol", c.reference_tol);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }
  if (c.budgets.empty()) throw PreconditionError("config: no budgets given");
  for (std::size_t i = 1; i < c.budgets.size(); ++i)
    if (c.budgets[i] <= c.budgets[i - 1]) throw PreconditionError("config: budgets must be strictly increasing");
  if (c.reps < 1) throw PreconditionError("config: reps must be >= 1");
  if (c.domain && c.domain->dim != c.weight.dim()) throw DimensionError("config: domain and weight dimensions differ");
  return c;
}

ConvergenceConfig load_convergence_config(const std::filesystem::path& path) {
  return parse_convergence_config(read_text_file(path), format_for(path), path.parent_path());
}

namespace {

struct Problem {
  SphereFunction f;
  DomainFunction g;
  double reference = 0.0;
};

Problem make_problem(const ConvergenceConfig& c) {
  Problem pb;
  if (c.domain) {
    pb.g = domain_function(c.function, c.domain->dim);
    pb.reference = domain_integral(pb.g, *c.domain, c.reference_tol).value;
  } else {
    pb.f = sphere_function(c.function, c.weight.dim());
    pb.reference = reference_integral(pb.f, c.weight, c.reference_tol);
  }
  return pb;
}

RandomizedEstimate run_one(const ConvergenceConfig& c, const Problem& pb, int n, std::uint64_t seed) {
  CompositeOptions co;
  co.delta = c.delta;
  co.family_seed = c.family_seed;
  DeterministicOptions dopts;
  dopts.delta = c.delta;
  if (c.domain) {
    if (c.mode == QuadratureMode::Randomized && c.estimator == Estimator::Standard)
      throw UnsupportedError("standard estimator is not available on domains");
    DomainQuadratureOptions o;
    o.composite = co;
    o.deterministic = dopts;
    return domain_quadrature(pb.g, *c.domain, n, c.mode, c.p, seed, o);
  }
  if (c.mode == QuadratureMode::Deterministic) return deterministic_quadrature(pb.f, n, c.weight, dopts);
  if (c.estimator == Estimator::Standard) return standard_mc(pb.f, c.weight, static_cast<std::uint64_t>(n), seed);
  return composite_randomized_quadrature(pb.f, n, c.p, c.weight, seed, co);
}

}  // namespace

ConvergenceReport run_convergence(const ConvergenceConfig& c, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  ConvergenceReport report;
  report.id = c.id;
  const Problem pb = make_problem(c);
  report.reference = pb.reference;
  for (int r = 0; r < c.reps; ++r) report.seeds.push_back(derive_seed(c.seed, static_cast<std::uint64_t>(r)));

  // Deterministic rules do not depend on the seed: one run per budget.
  const bool det = c.mode == QuadratureMode::Deterministic;
  const int runs = det ? 1 : c.reps;
  const std::size_t total = c.budgets.size() * static_cast<std::size_t>(runs);
  std::vector<RandomizedEstimate> results(total);

  // Warm the shared family/rule caches with one serial run per budget.
  for (std::size_t b = 0; b < c.budgets.size(); ++b) {
    try {
      results[b * runs] = run_one(c, pb, c.budgets[b], report.seeds[0]);
    } catch (const Error& e) {
      throw ConstructionError("n = " + std::to_string(c.budgets[b]) + ", seed = " + std::to_string(report.seeds[0]) +
                              ": " + e.what());
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::string first_error;
  const auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= total) return;
      const std::size_t b = k / runs;
      const int r = static_cast<int>(k % runs);
      if (r == 0) continue;
      try {
        results[k] = run_one(c, pb, c.budgets[b], report.seeds[r]);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mutex);
        if (first_error.empty())
          first_error = "n = " + std::to_string(c.budgets[b]) + ", seed = " + std::to_string(report.seeds[r]) + ": " +
                        e.what();
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  }
  if (!first_error.empty()) throw ConstructionError(first_error);

  for (std::size_t b = 0; b < c.budgets.size(); ++b) {
    BudgetSummary s;
    s.n = c.budgets[b];
    s.reps = c.reps;
    double sum_est = 0.0, sum_abs = 0.0, sum_sq = 0.0, sum_se = 0.0;
    for (int r = 0; r < c.reps; ++r) {
      const RandomizedEstimate& e = results[b * runs + (det ? 0 : r)];
      RepResult row;
      row.n = s.n;
      row.rep = r;
      row.seed = det ? 0 : report.seeds[r];
      row.estimate = e.value;
      row.abs_error = std::abs(e.value - pb.reference);
      row.std_error = e.std_error;
      row.function_evals = e.function_evals;
      report.rows.push_back(row);
      sum_est += row.estimate;
      sum_abs += row.abs_error;
      sum_sq += row.abs_error * row.abs_error;
      sum_se += row.std_error;
      s.max_function_evals = std::max(s.max_function_evals, row.function_evals);
    }
    s.mean_estimate = sum_est / c.reps;
    s.mean_abs_error = sum_abs / c.reps;
    s.rms_error = std::sqrt(sum_sq / c.reps);
    s.mean_std_error = sum_se / c.reps;
    report.summary.push_back(s);
  }

  if (report.summary.size() >= 4) {
    std::vector<double> x, ya, yr;
    bool positive = true;
    for (const BudgetSummary& s : report.summary) {
      x.push_back(std::log(static_cast<double>(s.n)));
      // Errors at rounding level carry no rate information.
      const double floor = 1e-14 * std::max(1.0, std::abs(pb.reference));
      if (!(s.mean_abs_error > floor) || !(s.rms_error > floor)) positive = false;
      ya.push_back(std::log(s.mean_abs_error));
      yr.push_back(std::log(s.rms_error));
    }
    if (positive) {
      report.mean_abs_fit = fit_rate(x, ya);
      report.rms_fit = fit_rate(x, yr);
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string report_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "kind,n,rep,seed,estimate,abs_error,std_error,function_evals,rms_error\n";
  for (const RepResult& r : report.rows)
    os << "rep," << r.n << ',' << r.rep << ',' << r.seed << ',' << format_double(r.estimate) << ','
       << format_double(r.abs_error) << ',' << format_double(r.std_error) << ',' << r.function_evals << ",\n";
  for (const BudgetSummary& s : report.summary)
    os << "summary," << s.n << ',' << s.reps << ",," << format_double(s.mean_estimate) << ','
       << format_double(s.mean_abs_error) << ',' << format_double(s.mean_std_error) << ',' << s.max_function_evals
       << ',' << format_double(s.rms_error) << '\n';
  const auto fit_row = [&](const char* name, const std::optional<RateFit>& f) {
    os << name << ",,,,";
    if (f)
      os << format_double(f->slope) << ",," << format_double(f->stderr_slope) << ",,";
    else
      os << "undefined,,,,";
    os << '\n';
  };
  fit_row("fit_mean_abs", report.mean_abs_fit);
  fit_row("fit_rms", report.rms_fit);
  return os.str();
}

std::string report_json(const ConvergenceReport& report) {
  nlohmann::json j;
  j["id"] = report.id;
  j["reference"] = report.reference;
  j["seeds"] = report.seeds;
  nlohmann::json budgets = nlohmann::json::array();
  for (const BudgetSummary& s : report.summary)
    budgets.push_back({{"n", s.n},
                       {"reps", s.reps},
                       {"mean_estimate", s.mean_estimate},
                       {"mean_abs_error", s.mean_abs_error},
                       {"rms_error", s.rms_error},
                       {"mean_std_error", s.mean_std_error},
                       {"max_function_evals", s.max_function_evals}});
  j["budgets"] = std::move(budgets);
  const auto fit = [](const std::optional<RateFit>& f) -> nlohmann::json {
    if (!f) return nullptr;
    return {{"slope", f->slope}, {"stderr", f->stderr_slope}, {"intercept", f->intercept}};
  };
  j["fit_mean_abs"] = fit(report.mean_abs_fit);
  j["fit_rms"] = fit(report.rms_fit);
  nlohmann::json rows = nlohmann::json::array();
  for (const RepResult& r : report.rows)
    rows.push_back({{"n", r.n},
                    {"rep", r.rep},
                    {"seed", r.seed},
                    {"estimate", r.estimate},
                    {"abs_error", r.abs_error},
                    {"std_error", r.std_error},
                    {"function_evals", r.function_evals}});
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace quadlab
