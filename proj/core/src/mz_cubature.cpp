#include "quadlab/mz_cubature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

#include "json_util.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/nnls.hpp"
#include "quadlab/oracle.hpp"

namespace quadlab {

MZFamily build_mz_family(const ProductWeight& w, int n, double delta, Rng& rng, const MZOptions& opts) {
  if (n < 1) throw PreconditionError("build_mz_family: n must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("build_mz_family: delta must lie in (0, 1]");
  const int d = w.dim();
  const std::size_t need = poly_dim(d, n);
  MZFamily fam;
  fam.d = d;
  fam.degree = n;
  for (int attempt = 0; attempt <= opts.max_halvings; ++attempt, delta *= 0.5) {
    const double eps = delta / n;
    fam.nodes = build_separated_set(d, eps, rng);
    fam.delta = delta;
    if (fam.nodes.size() >= need) break;
  }
  if (fam.nodes.size() < need)
    throw ConstructionError("build_mz_family: separated set smaller than dim Π_n after halving delta",
                            static_cast<double>(fam.nodes.size()));
  if (opts.compute_tau) {
    const double eps = fam.delta / n;
    fam.tau.resize(fam.nodes.size());
    for (std::size_t k = 0; k < fam.nodes.size(); ++k) fam.tau[k] = cap_mass(w, Cap(fam.nodes[k], eps), opts.cap_tol);
  }
  return fam;
}

namespace {
std::mutex g_family_mutex;
std::mutex g_rule_mutex;
}  // namespace

const MZFamily& cached_mz_family(const ProductWeight& w, int n, double delta, std::uint64_t seed) {
  static std::map<std::string, std::unique_ptr<MZFamily>> cache;
  char buf[64];
  std::snprintf(buf, sizeof buf, "|n=%d|delta=%.17g|seed=%llu", n, delta, static_cast<unsigned long long>(seed));
  const std::string key = w.key() + buf;
  {
    std::lock_guard lock(g_family_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(n));
  auto fam = std::make_unique<MZFamily>(build_mz_family(w, n, delta, rng));
  std::lock_guard lock(g_family_mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::move(fam);
  return *slot;
}

namespace {

Eigen::MatrixXd basis_matrix(int n, std::span<const SpherePoint> pts) {
  if (pts.empty()) return {};
  const std::size_t dim = poly_dim(pts.front().dim(), n);
  Eigen::MatrixXd B(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(dim));
  std::vector<double> row(dim);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    basis_eval_into(n, pts[i], row);
    for (std::size_t k = 0; k < dim; ++k) B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  return B;
}

double abs_pow(double v, double p) {
  const double a = std::abs(v);
  return p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
}

}  // namespace

std::pair<double, double> verify_mz(const MZFamily& family, const ProductWeight& w, double p, int trials, Rng& rng) {
  if (!(p >= 1.0)) throw PreconditionError("verify_mz: p must be in [1, inf]");
  if (trials < 1) throw PreconditionError("verify_mz: trials must be >= 1");
  if (family.tau.size() != family.nodes.size()) throw PreconditionError("verify_mz: family has no weights");
  const int n = family.degree;
  const std::size_t dim = poly_dim(family.d, n);
  const bool sup = std::isinf(p);

  std::normal_distribution<double> normal;
  Eigen::MatrixXd C(static_cast<Eigen::Index>(dim), trials);
  for (int t = 0; t < trials; ++t)
    for (std::size_t k = 0; k < dim; ++k) C(static_cast<Eigen::Index>(k), t) = normal(rng);

  // Discrete side.
  Eigen::ArrayXd disc = Eigen::ArrayXd::Zero(trials);
  constexpr std::size_t kBlock = 4096;
  for (std::size_t s = 0; s < family.nodes.size(); s += kBlock) {
    const std::size_t e = std::min(family.nodes.size(), s + kBlock);
    const Eigen::MatrixXd V = basis_matrix(n, std::span(family.nodes).subspan(s, e - s)) * C;
    for (std::size_t i = s; i < e; ++i)
      for (int t = 0; t < trials; ++t) {
        const double v = V(static_cast<Eigen::Index>(i - s), t);
        disc[t] = sup ? std::max(disc[t], std::abs(v)) : disc[t] + family.tau[i] * abs_pow(v, p);
      }
  }

  // Continuous side on a tensor rule; 16 points per panel, panels scaled with n.
  const ProductGrid grid = sphere_product_grid(w, std::max(2, (n + 7) / 4), 16);
  Eigen::ArrayXd cont = Eigen::ArrayXd::Zero(trials);
  for (std::size_t s = 0; s < grid.nodes.size(); s += kBlock) {
    const std::size_t e = std::min(grid.nodes.size(), s + kBlock);
    const Eigen::MatrixXd V = basis_matrix(n, std::span(grid.nodes).subspan(s, e - s)) * C;
    for (std::size_t i = s; i < e; ++i)
      for (int t = 0; t < trials; ++t) {
        const double v = V(static_cast<Eigen::Index>(i - s), t);
        cont[t] = sup ? std::max(cont[t], std::abs(v)) : cont[t] + grid.weights[i] * abs_pow(v, p);
      }
  }
  if (sup) cont = cont.max(disc);

  const Eigen::ArrayXd ratio = disc / cont;
  return {ratio.minCoeff(), ratio.maxCoeff()};
}

CubatureRule build_positive_cubature(const ProductWeight& w, int N, const CubatureOptions& opts) {
  if (N < 0) throw PreconditionError("build_positive_cubature: N must be >= 0");
  const int d = w.dim();
  const std::vector<double>& moments = basis_moments(w, N, opts.monomial_cap);
  const Eigen::Map<const Eigen::VectorXd> b(moments.data(), static_cast<Eigen::Index>(moments.size()));
  const int cand_degree = std::max(2 * N, N + 2);

  double delta = opts.delta;
  double residual = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= opts.densify_steps; ++step) {
    Rng rng = make_rng(opts.seed, static_cast<std::uint64_t>(N) * 16 + static_cast<std::uint64_t>(step));
    MZOptions mo;
    mo.compute_tau = false;
    const MZFamily cand = build_mz_family(w, cand_degree, std::min(delta, 1.0), rng, mo);
    const Eigen::MatrixXd A = basis_matrix(N, cand.nodes).transpose();
    NnlsOptions no;
    no.stop_residual = 1e-3 * opts.tol;
    const NnlsResult sol = nnls(A, b, no);
    const Eigen::VectorXd err = A * sol.x - b;
    residual = err.cwiseAbs().maxCoeff();
    if (residual <= opts.tol) {
      CubatureRule rule;
      rule.d = d;
      rule.degree = N;
      rule.residual = residual;
      rule.delta = cand.delta;
      rule.weight = w;
      for (Eigen::Index i = 0; i < sol.x.size(); ++i) {
        if (sol.x[i] > 0.0) {
          rule.nodes.push_back(cand.nodes[static_cast<std::size_t>(i)]);
          rule.lambda.push_back(sol.x[i]);
        }
      }
      return rule;
    }
    // Double the candidate count: node count scales like δ^{−d}.
    delta /= std::pow(2.0, 1.0 / d);
  }
  throw ConstructionError("build_positive_cubature: moment residual " + std::to_string(residual) +
                              " above tolerance after densification",
                          residual);
}

const CubatureRule& cached_positive_cubature(const ProductWeight& w, int N, const CubatureOptions& opts) {
  static std::map<std::string, std::unique_ptr<CubatureRule>> cache;
  char buf[128];
  std::snprintf(buf, sizeof buf, "|N=%d|delta=%.17g|tol=%.17g|seed=%llu|cap=%d", N, opts.delta, opts.tol,
                static_cast<unsigned long long>(opts.seed), opts.monomial_cap);
  const std::string key = w.key() + buf;
  {
    std::lock_guard lock(g_rule_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto rule = std::make_unique<CubatureRule>(build_positive_cubature(w, N, opts));
  std::lock_guard lock(g_rule_mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::move(rule);
  return *slot;
}

double apply_cubature(const CubatureRule& rule, const SphereFunction& f) {
  long double s = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.lambda[i] * f(rule.nodes[i]);
  return static_cast<double>(s);
}

double cubature_moment_error(const CubatureRule& rule, int monomial_cap) {
  const auto& b = basis_moments(rule.weight, rule.degree, monomial_cap);
  std::vector<long double> q(b.size(), 0.0L);
  std::vector<double> row(b.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    basis_eval_into(rule.degree, rule.nodes[i], row);
    for (std::size_t k = 0; k < b.size(); ++k) q[k] += rule.lambda[i] * row[k];
  }
  double e = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) e = std::max(e, static_cast<double>(std::abs(q[k] - b[k])));
  return e;
}

std::string cubature_to_json(const CubatureRule& rule) {
  nlohmann::json j;
  j["d"] = rule.d;
  j["N"] = rule.degree;
  j["weight"] = detail::weight_json(rule.weight);
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& x : rule.nodes) nodes.push_back(detail::point_json(x));
  j["nodes"] = std::move(nodes);
  j["lambdas"] = rule.lambda;
  j["residual"] = rule.residual;
  j["delta"] = rule.delta;
  return j.dump(1);
}

CubatureRule cubature_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    CubatureRule rule;
    rule.d = j.at("d").get<int>();
    rule.degree = j.at("N").get<int>();
    rule.weight = detail::weight_from_json(j.at("weight"));
    for (const auto& x : j.at("nodes")) rule.nodes.push_back(detail::point_from_json(x));
    rule.lambda = j.at("lambdas").get<std::vector<double>>();
    rule.residual = j.at("residual").get<double>();
    if (j.contains("delta")) rule.delta = j.at("delta").get<double>();
    if (rule.lambda.size() != rule.nodes.size()) throw PreconditionError("cubature_from_json: size mismatch");
    return rule;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("cubature_from_json: ") + e.what());
  }
}

std::string mz_family_to_json(const MZFamily& family, const ProductWeight& w) {
  nlohmann::json j;
  j["d"] = family.d;
  j["n"] = family.degree;
  j["delta"] = family.delta;
  j["weight"] = detail::weight_json(w);
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& x : family.nodes) nodes.push_back(detail::point_json(x));
  j["nodes"] = std::move(nodes);
  j["tau"] = family.tau;
  if (!std::isnan(family.empirical_A)) {
    j["A"] = family.empirical_A;
    j["B"] = family.empirical_B;
  }
  return j.dump(1);
}

}  // namespace quadlab
