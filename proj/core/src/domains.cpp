#include "quadlab/domains.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "quadlab/errors.hpp"
#include "quadlab/gauss.hpp"
#include "quadlab/mz_cubature.hpp"

namespace quadlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBoundaryTol = 1e-12;

void check_dim(int d) {
  if (d != 1 && d != 2) throw DimensionError("domains: d must be 1 or 2");
}

}  // namespace

const char* domain_name(Domain domain) noexcept { return domain == Domain::Ball ? "ball" : "simplex"; }

Domain parse_domain(std::string_view text) {
  if (text == "ball") return Domain::Ball;
  if (text == "simplex") return Domain::Simplex;
  throw PreconditionError("unknown domain '" + std::string(text) + "' (expected ball or simplex)");
}

DomainPoint::DomainPoint(Domain domain, std::span<const double> coords)
    : domain_(domain), coords_(coords.begin(), coords.end()) {
  check_dim(dim());
  if (domain == Domain::Ball) {
    double r2 = 0.0;
    for (double c : coords_) r2 += c * c;
    if (r2 > 1.0 + kBoundaryTol) throw PreconditionError("DomainPoint: outside the unit ball");
  } else {
    double s = 0.0;
    for (double c : coords_) {
      if (c < -kBoundaryTol) throw PreconditionError("DomainPoint: negative simplex coordinate");
      s += c;
    }
    if (s > 1.0 + kBoundaryTol) throw PreconditionError("DomainPoint: outside the simplex");
  }
}

DomainPoint::DomainPoint(Domain domain, std::initializer_list<double> coords)
    : DomainPoint(domain, std::span<const double>(coords.begin(), coords.size())) {}

DomainWeight::DomainWeight(Domain domain_, int d, std::vector<double> kappa_, double mu_)
    : domain(domain_), dim(d), kappa(std::move(kappa_)), mu(mu_) {
  check_dim(d);
  if (kappa.empty()) kappa.assign(static_cast<std::size_t>(d), domain == Domain::Simplex ? 0.5 : 0.0);
  if (kappa.size() != static_cast<std::size_t>(d)) throw DimensionError("DomainWeight: need one κ per coordinate");
  if (mu < 0.0) throw PreconditionError("DomainWeight: μ must be >= 0");
  for (double k : kappa)
    if (k < 0.0) throw PreconditionError("DomainWeight: κ must be >= 0");
}

DomainWeight DomainWeight::lebesgue(Domain domain, int d) {
  return DomainWeight(domain, d, std::vector<double>(static_cast<std::size_t>(d), domain == Domain::Ball ? 0.0 : 0.5),
                      0.5);
}

double DomainWeight::operator()(const DomainPoint& x) const {
  if (x.dim() != dim || x.domain() != domain) throw DimensionError("DomainWeight: point/weight mismatch");
  double v = 1.0;
  if (domain == Domain::Ball) {
    double r2 = 0.0;
    for (int j = 0; j < dim; ++j) {
      r2 += x[j] * x[j];
      if (kappa[j] != 0.0) v *= std::pow(std::abs(x[j]), 2.0 * kappa[j]);
    }
    if (mu != 0.5) v *= std::pow(std::max(0.0, 1.0 - r2), mu - 0.5);
  } else {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) {
      s += x[j];
      if (kappa[j] != 0.5) v *= std::pow(std::max(0.0, x[j]), kappa[j] - 0.5);
    }
    if (mu != 0.5) v *= std::pow(std::max(0.0, 1.0 - s), mu - 0.5);
  }
  return v;
}

double domain_distance(const DomainPoint& x, const DomainPoint& y) {
  if (x.domain() != y.domain() || x.dim() != y.dim()) throw DimensionError("domain_distance: mismatched points");
  double ip = 0.0, a = 0.0, b = 0.0;
  for (int j = 0; j < x.dim(); ++j) {
    if (x.domain() == Domain::Ball) {
      ip += x[j] * y[j];
      a += x[j] * x[j];
      b += y[j] * y[j];
    } else {
      ip += std::sqrt(std::max(0.0, x[j] * y[j]));
      a += x[j];
      b += y[j];
    }
  }
  ip += std::sqrt(std::max(0.0, 1.0 - a)) * std::sqrt(std::max(0.0, 1.0 - b));
  return std::acos(std::clamp(ip, -1.0, 1.0));
}

SpherePoint lift_to_sphere(const DomainPoint& x, unsigned signs) {
  const int d = x.dim();
  std::array<double, 3> c{};
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    if (x.domain() == Domain::Ball) {
      c[j] = x[j];
      s += x[j] * x[j];
    } else {
      s += x[j];
      c[j] = std::sqrt(std::max(0.0, x[j]));
      if (signs >> j & 1u) c[j] = -c[j];
    }
  }
  c[d] = std::sqrt(std::max(0.0, 1.0 - s));
  if (signs >> d & 1u) c[d] = -c[d];
  return SpherePoint(std::span<const double>(c.data(), static_cast<std::size_t>(d + 1)));
}

DomainPoint psi(Domain domain, const SpherePoint& xbar) {
  const int d = xbar.dim();
  check_dim(d);
  std::array<double, 2> c{};
  for (int j = 0; j < d; ++j) c[j] = domain == Domain::Ball ? xbar[j] : xbar[j] * xbar[j];
  if (domain == Domain::Ball) {
    // Rounding may push ‖x‖ a hair past 1.
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) r2 += c[j] * c[j];
    if (r2 > 1.0)
      for (int j = 0; j < d; ++j) c[j] /= std::sqrt(r2);
  } else {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += c[j];
    if (s > 1.0)
      for (int j = 0; j < d; ++j) c[j] /= s;
  }
  return DomainPoint(domain, std::span<const double>(c.data(), static_cast<std::size_t>(d)));
}

ProductWeight transfer_weight(const DomainWeight& w) {
  std::vector<double> k(w.kappa.begin(), w.kappa.end());
  k.push_back(w.mu);
  return ProductWeight::axis(w.dim, k);
}

namespace {

using Integrand2 = std::function<double(double, double)>;

double pow_or_one(double base, double e) { return e == 0.0 ? 1.0 : std::pow(base, e); }

// g on [a0,a1] × [b0,b1] (outer a, inner b) with fixed break lists.
IntegralEstimate nested(const Integrand2& g, std::vector<double> abreaks, std::vector<double> bbreaks, double tol) {
  // Coarse tensor pass for the scale that the absolute floors refer to.
  const GaussRule& gl = gauss_legendre(32);
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < abreaks.size(); ++i)
    for (std::size_t k = 0; k + 1 < bbreaks.size(); ++k) {
      const double ha = 0.5 * (abreaks[i + 1] - abreaks[i]), ma = 0.5 * (abreaks[i + 1] + abreaks[i]);
      const double hb = 0.5 * (bbreaks[k + 1] - bbreaks[k]), mb = 0.5 * (bbreaks[k + 1] + bbreaks[k]);
      for (std::size_t p = 0; p < gl.nodes.size(); ++p)
        for (std::size_t q = 0; q < gl.nodes.size(); ++q)
          scale += ha * hb * gl.weights[p] * gl.weights[q] * std::abs(g(ma + ha * gl.nodes[p], mb + hb * gl.nodes[q]));
    }
  const double alen = abreaks.back() - abreaks.front();
  const double inner_tol = 0.1 * tol;
  const double inner_abs = inner_tol * scale / alen * 1e-2;
  const auto outer = [&](double a) {
    const IntegralEstimate e =
        integrate_1d([&](double b) { return g(a, b); }, bbreaks, inner_tol, inner_abs);
    return e.value;
  };
  IntegralEstimate e = integrate_1d(outer, abreaks, 0.85 * tol, 0.5 * tol * scale);
  e.abs_value = std::max(e.abs_value, scale);
  return e;
}

std::vector<double> uniform_breaks(double a, double b, int pieces) {
  std::vector<double> out;
  for (int i = 0; i <= pieces; ++i) out.push_back(a + (b - a) * i / pieces);
  return out;
}

}  // namespace

IntegralEstimate domain_integral(const DomainFunction& f, const DomainWeight& w, double tol) {
  if (tol < 1e-13) throw PreconditionError("domain_integral: tol must be >= 1e-13");
  const int d = w.dim;
  IntegralEstimate e;
  if (w.domain == Domain::Ball) {
    if (d == 1) {
      // x = sin s: dx = cos s ds, (1−x²)^{μ−1/2} dx = cos^{2μ} s ds.
      const auto g = [&](double s) {
        const double x = std::sin(s);
        return f(DomainPoint(Domain::Ball, {x})) * pow_or_one(std::cos(s), 2.0 * w.mu) *
               pow_or_one(std::abs(x), 2.0 * w.kappa[0]);
      };
      e = integrate_1d(g, {-kPi / 2, 0.0, kPi / 2}, tol);
      e.value /= 2.0;
      e.error /= 2.0;
      e.abs_value /= 2.0;
    } else {
      // x = sin s·(cos φ, sin φ): dx = sin s cos s ds dφ.
      const auto g = [&](double phi, double s) {
        const double r = std::sin(s);
        const double x1 = r * std::cos(phi), x2 = r * std::sin(phi);
        return f(DomainPoint(Domain::Ball, {x1, x2})) * r * pow_or_one(std::cos(s), 2.0 * w.mu) *
               pow_or_one(std::abs(x1), 2.0 * w.kappa[0]) * pow_or_one(std::abs(x2), 2.0 * w.kappa[1]);
      };
      e = nested(g, uniform_breaks(0.0, 2 * kPi, 4), {0.0, kPi / 4, kPi / 2}, tol);
      e.value /= kPi;
      e.error /= kPi;
      e.abs_value /= kPi;
    }
  } else {
    if (d == 1) {
      // x = sin² a: (1−x)^{μ−1/2} x^{κ−1/2} dx = 2 sin^{2κ} a cos^{2μ} a da.
      const auto g = [&](double a) {
        const double s = std::sin(a);
        return 2.0 * f(DomainPoint(Domain::Simplex, {s * s})) * pow_or_one(s, 2.0 * w.kappa[0]) *
               pow_or_one(std::cos(a), 2.0 * w.mu);
      };
      e = integrate_1d(g, {0.0, kPi / 4, kPi / 2}, tol);
    } else {
      // x = sin² a·(cos² b, sin² b): the weighted element becomes
      // 4 sin^{2κ1+2κ2+1} a cos^{2μ} a cos^{2κ1} b sin^{2κ2} b da db; |T²| = 1/2.
      const auto g = [&](double a, double b) {
        const double sa = std::sin(a), ca = std::cos(a), sb = std::sin(b), cb = std::cos(b);
        const double r = sa * sa;
        const double x1 = r * cb * cb, x2 = r * sb * sb;
        return 8.0 * f(DomainPoint(Domain::Simplex, {x1, x2})) * pow_or_one(sa, 2.0 * (w.kappa[0] + w.kappa[1]) + 1.0) *
               pow_or_one(ca, 2.0 * w.mu) * pow_or_one(cb, 2.0 * w.kappa[0]) * pow_or_one(sb, 2.0 * w.kappa[1]);
      };
      e = nested(g, {0.0, kPi / 4, kPi / 2}, {0.0, kPi / 4, kPi / 2}, tol);
    }
  }
  if (e.error > tol * std::max(e.abs_value, std::abs(e.value)))
    throw ConvergenceError("domain_integral: tolerance not reached", e.error);
  return e;
}

double calibration(Domain domain, int d) {
  check_dim(d);
  static std::mutex mutex;
  static std::map<std::pair<int, int>, double> cache;
  const auto key = std::make_pair(static_cast<int>(domain), d);
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const DomainWeight unit = DomainWeight::lebesgue(domain, d);
  const double lhs = domain_integral([](const DomainPoint&) { return 1.0; }, unit, 1e-13).value;
  const double rhs = reference_integral([](const SpherePoint&) { return 1.0; }, transfer_weight(unit), 1e-13);
  const double c = lhs / rhs;
  std::lock_guard lock(mutex);
  cache.emplace(key, c);
  return c;
}

SphereFunction pull_back(const DomainFunction& f, Domain domain) {
  return [f, domain](const SpherePoint& x) { return f(psi(domain, x)); };
}

TransferIntegral transfer_integral(const DomainFunction& f, const DomainWeight& w, double tol) {
  TransferIntegral t;
  t.domain_side = domain_integral(f, w, tol).value;
  t.sphere_side = calibration(w.domain, w.dim) * reference_integral(pull_back(f, w.domain), transfer_weight(w), tol);
  return t;
}

RandomizedEstimate domain_quadrature(const DomainFunction& f, const DomainWeight& w, int n, QuadratureMode mode,
                                     double p, std::uint64_t seed, const DomainQuadratureOptions& opts) {
  const SphereFunction g = pull_back(f, w.domain);
  const ProductWeight W = transfer_weight(w);
  RandomizedEstimate e = mode == QuadratureMode::Deterministic
                             ? deterministic_quadrature(g, n, W, opts.deterministic)
                             : composite_randomized_quadrature(g, n, p, W, seed, opts.composite);
  const double c = calibration(w.domain, w.dim);
  e.value *= c;
  e.std_error *= c;
  if (mode == QuadratureMode::Randomized) e.seed = seed;
  return e;
}

DomainRule domain_cubature(const DomainWeight& w, int n, const DeterministicOptions& opts) {
  const ProductWeight W = transfer_weight(w);
  const int N = deterministic_degree(n, W, opts);
  if (N < 0) throw PreconditionError("domain_cubature: budget must be >= 1");
  CubatureOptions co;
  co.delta = opts.delta;
  co.tol = opts.tol;
  co.seed = opts.seed;
  co.monomial_cap = opts.max_degree;
  const CubatureRule& rule = cached_positive_cubature(W, N, co);
  const double c = calibration(w.domain, w.dim);
  DomainRule out;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    out.nodes.push_back(psi(w.domain, rule.nodes[i]));
    out.weights.push_back(c * rule.lambda[i]);
  }
  return out;
}

}  // namespace quadlab
