#include "quadlab/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <json.hpp>

#include "quadlab/errors.hpp"
#include "quadlab/oracle.hpp"

namespace quadlab {
namespace {

void check_degree(int d, int n) {
  if (n < 0) throw PreconditionError("polynomial degree must be >= 0");
  if (d != 1 && d != 2) throw UnsupportedError("polynomial space: only d in {1, 2} is supported");
}

// Three-term recurrence coefficients for Q_lm = P̄_lm / sin^m θ, indexed l² + l + m (m ≥ 0).
struct Recurrence {
  int n = -1;
  std::vector<double> a, b, sectoral;
};

const Recurrence& recurrence(int n) {
  thread_local Recurrence rec;
  if (rec.n >= n) return rec;
  const std::size_t size = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1);
  rec.a.assign(size, 0.0);
  rec.b.assign(size, 0.0);
  rec.sectoral.assign(static_cast<std::size_t>(n) + 1, 1.0);
  for (int m = 1; m <= n; ++m)
    rec.sectoral[m] = m == 1 ? std::sqrt(3.0) : rec.sectoral[m - 1] * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
  for (int m = 0; m <= n; ++m) {
    for (int l = m + 1; l <= n; ++l) {
      const double L = l, M = m;
      const std::size_t idx = static_cast<std::size_t>(l * l + l + m);
      rec.a[idx] = std::sqrt((2 * L - 1) * (2 * L + 1) / ((L - M) * (L + M)));
      rec.b[idx] = l - m >= 2 ? std::sqrt((2 * L + 1) * (L + M - 1) * (L - M - 1) / ((2 * L - 3) * (L - M) * (L + M)))
                              : 0.0;
    }
  }
  rec.n = n;
  return rec;
}

}  // namespace

std::size_t poly_dim(int d, int n) {
  check_degree(d, n);
  const auto N = static_cast<std::size_t>(n);
  return d == 2 ? (N + 1) * (N + 1) : 2 * N + 1;
}

int basis_degree(int d, std::size_t k) {
  if (d == 1) return static_cast<int>((k + 1) / 2);
  return static_cast<int>(std::floor(std::sqrt(static_cast<double>(k)) + 1e-12));
}

void basis_eval_into(int n, const SpherePoint& x, std::span<double> out) {
  const int d = x.dim();
  const std::size_t dim = poly_dim(d, n);
  if (out.size() < dim) throw PreconditionError("basis_eval_into: output buffer too small");
  if (d == 1) {
    out[0] = 1.0;
    double c = 1.0, s = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double c2 = c * x[0] - s * x[1];
      s = c * x[1] + s * x[0];
      c = c2;
      out[2 * k - 1] = std::numbers::sqrt2 * c;
      out[2 * k] = std::numbers::sqrt2 * s;
    }
    return;
  }
  const Recurrence& rec = recurrence(n);
  const double X = x[0], Y = x[1], z = x[2];
  double c = 1.0, s = 0.0;  // Re, Im of (X + iY)^m
  for (int m = 0; m <= n; ++m) {
    if (m > 0) {
      const double c2 = c * X - s * Y;
      s = c * Y + s * X;
      c = c2;
    }
    double q2 = 0.0, q1 = rec.sectoral[m];
    for (int l = m; l <= n; ++l) {
      double q;
      if (l == m) {
        q = q1;
      } else {
        const std::size_t idx = static_cast<std::size_t>(l * l + l + m);
        q = rec.a[idx] * z * q1 - rec.b[idx] * q2;
        q2 = q1;
        q1 = q;
      }
      const std::size_t base = static_cast<std::size_t>(l * l + l);
      if (m == 0) {
        out[base] = q;
      } else {
        out[base + m] = q * c;
        out[base - m] = q * s;
      }
    }
  }
}

std::vector<double> basis_eval(int n, const SpherePoint& x) {
  std::vector<double> v(poly_dim(x.dim(), n));
  basis_eval_into(n, x, v);
  return v;
}

SphericalPolynomial::SphericalPolynomial(int d, int n) : d_(d), n_(n), coeffs_(poly_dim(d, n), 0.0) {}

SphericalPolynomial::SphericalPolynomial(int d, int n, std::vector<double> coeffs)
    : d_(d), n_(n), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != poly_dim(d, n))
    throw DimensionError("SphericalPolynomial: coefficient count does not match dim Π_n");
}

double SphericalPolynomial::operator()(const SpherePoint& x) const {
  if (x.dim() != d_) throw DimensionError("SphericalPolynomial: point dimension mismatch");
  thread_local std::vector<double> buf;
  buf.resize(coeffs_.size());
  basis_eval_into(n_, x, buf);
  double s = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) s += coeffs_[k] * buf[k];
  return s;
}

double eval(const SphericalPolynomial& p, const SpherePoint& x) { return p(x); }

SphericalPolynomial SphericalPolynomial::basis_element(int d, int n, std::size_t k) {
  SphericalPolynomial p(d, n);
  if (k >= p.coeffs_.size()) throw PreconditionError("basis_element: index out of range");
  p.coeffs_[k] = 1.0;
  return p;
}

namespace {

// Unweighted sphere moment of x^α (zero if any α_i is odd).
long double unit_moment(const std::array<int, SpherePoint::kMaxDim + 1>& a, std::size_t ambient) {
  std::vector<double> e(ambient);
  for (std::size_t i = 0; i < ambient; ++i) {
    if (a[i] % 2 != 0) return 0.0L;
    e[i] = a[i];
  }
  return sphere_abs_moment(e);
}

std::vector<MonomialExpansion> build_monomials(int d, int n) {
  std::vector<MonomialExpansion> out(poly_dim(d, n));
  auto binom = [](int m, int k) {
    long double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (m - k + i) / i;
    return r;
  };
  // Re / Im of (x1 + i x2)^m as sparse terms in (x1, x2).
  auto power_parts = [&](int m, bool imag) {
    std::vector<std::pair<int, long double>> t;  // (power of x2, coeff); power of x1 = m − k
    for (int k = imag ? 1 : 0; k <= m; k += 2) {
      const int sign = ((imag ? (k - 1) : k) / 2) % 2 == 0 ? 1 : -1;
      t.emplace_back(k, sign * binom(m, k));
    }
    return t;
  };
  if (d == 1) {
    out[0].push_back({{0, 0}, 1.0L});
    const long double r2 = std::sqrt(2.0L);
    for (int k = 1; k <= n; ++k) {
      for (int part = 0; part < 2; ++part) {
        auto& e = out[static_cast<std::size_t>(2 * k - 1 + part)];
        for (auto [py, c] : power_parts(k, part == 1)) e.push_back({{k - py, py}, r2 * c});
      }
    }
    return out;
  }
  for (int m = 0; m <= n; ++m) {
    long double sect = 1.0L;
    for (int j = 1; j <= m; ++j)
      sect = j == 1 ? std::sqrt(3.0L) : sect * std::sqrt((2.0L * j + 1.0L) / (2.0L * j));
    // Q_lm(z) coefficients, index = power of z.
    std::vector<long double> q2, q1{sect};
    for (int l = m; l <= n; ++l) {
      std::vector<long double> q;
      if (l == m) {
        q = q1;
      } else {
        const long double L = l, M = m;
        const long double a = std::sqrt((2 * L - 1) * (2 * L + 1) / ((L - M) * (L + M)));
        const long double b =
            l - m >= 2 ? std::sqrt((2 * L + 1) * (L + M - 1) * (L - M - 1) / ((2 * L - 3) * (L - M) * (L + M))) : 0.0L;
        q.assign(q1.size() + 1, 0.0L);
        for (std::size_t i = 0; i < q1.size(); ++i) q[i + 1] += a * q1[i];
        for (std::size_t i = 0; i < q2.size(); ++i) q[i] -= b * q2[i];
        q2 = q1;
        q1 = q;
      }
      const std::size_t base = static_cast<std::size_t>(l * l + l);
      for (int part = 0; part < (m == 0 ? 1 : 2); ++part) {
        auto& e = out[part == 0 ? base + m : base - m];
        for (auto [py, c] : power_parts(m, part == 1))
          for (std::size_t pz = 0; pz < q.size(); ++pz)
            if (q[pz] != 0.0L) e.push_back({{m - py, py, static_cast<int>(pz)}, c * q[pz]});
      }
    }
  }
  return out;
}

std::mutex g_cache_mutex;

}  // namespace

const std::vector<MonomialExpansion>& basis_monomials(int d, int n) {
  check_degree(d, n);
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<MonomialExpansion>>> cache;
  std::lock_guard lock(g_cache_mutex);
  auto& slot = cache[{d, n}];
  if (!slot) slot = std::make_unique<std::vector<MonomialExpansion>>(build_monomials(d, n));
  return *slot;
}

SphericalPolynomial SphericalPolynomial::monomial(int d, std::span<const int> alpha) {
  if (static_cast<int>(alpha.size()) != d + 1) throw DimensionError("monomial: need d + 1 exponents");
  int deg = 0;
  for (int a : alpha) {
    if (a < 0) throw PreconditionError("monomial: exponents must be >= 0");
    deg += a;
  }
  const auto& basis = basis_monomials(d, deg);
  std::vector<double> c(basis.size());
  const std::size_t ambient = static_cast<std::size_t>(d) + 1;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    long double s = 0;
    for (const auto& t : basis[k]) {
      auto e = t.exps;
      for (std::size_t i = 0; i < ambient; ++i) e[i] += alpha[i];
      s += t.coeff * unit_moment(e, ambient);
    }
    c[k] = static_cast<double>(s);
  }
  SphericalPolynomial p(d, deg, std::move(c));
  MonomialTerm t;
  std::copy(alpha.begin(), alpha.end(), t.exps.begin());
  t.coeff = 1;
  p.monomial_form_ = std::make_shared<const MonomialExpansion>(MonomialExpansion{t});
  return p;
}

double monomial_moment(std::span<const int> alpha, const ProductWeight& w) {
  if (static_cast<int>(alpha.size()) != w.dim() + 1) throw DimensionError("monomial_moment: need d + 1 exponents");
  const auto k = w.axis_kappas();
  std::vector<double> e(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] < 0) throw PreconditionError("monomial_moment: exponents must be >= 0");
    if (alpha[i] % 2 != 0) return 0.0;
    e[i] = alpha[i] + 2.0 * k[i];
  }
  return sphere_abs_moment(e);
}

const std::vector<double>& basis_moments(const ProductWeight& w, int n, int monomial_cap) {
  const int d = w.dim();
  check_degree(d, n);
  static std::map<std::string, std::unique_ptr<std::vector<double>>> cache;
  const std::string key = w.key() + "|n=" + std::to_string(n);
  {
    std::lock_guard lock(g_cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  std::vector<double> b(poly_dim(d, n));
  if (w.axis_aligned()) {
    if (n > monomial_cap)
      throw UnsupportedError("exact moments: degree " + std::to_string(n) + " exceeds the monomial cap " +
                             std::to_string(monomial_cap));
    const auto& basis = basis_monomials(d, n);
    const auto k = w.axis_kappas();
    const std::size_t ambient = static_cast<std::size_t>(d) + 1;
    std::map<std::array<int, SpherePoint::kMaxDim + 1>, long double> memo;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      long double s = 0;
      for (const auto& t : basis[i]) {
        auto [it, fresh] = memo.try_emplace(t.exps, 0.0L);
        if (fresh) {
          bool odd = false;
          std::vector<double> e(ambient);
          for (std::size_t j = 0; j < ambient; ++j) {
            odd = odd || t.exps[j] % 2 != 0;
            e[j] = t.exps[j] + 2.0 * k[j];
          }
          it->second = odd ? 0.0L : static_cast<long double>(sphere_abs_moment(e));
        }
        s += t.coeff * it->second;
      }
      b[i] = static_cast<double>(s);
    }
  } else {
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto p = SphericalPolynomial::basis_element(d, n, i);
      b[i] = reference_integral([&](const SpherePoint& x) { return p(x); }, w, 1e-12);
    }
  }
  std::lock_guard lock(g_cache_mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<std::vector<double>>(std::move(b));
  return *slot;
}

double exact_weighted_integral(const SphericalPolynomial& p, const ProductWeight& w, int monomial_cap) {
  if (p.dim() != w.dim()) throw DimensionError("exact_weighted_integral: dimension mismatch");
  if (p.monomial_form() && w.axis_aligned()) {
    long double s = 0;
    const std::size_t ambient = static_cast<std::size_t>(p.dim()) + 1;
    for (const MonomialTerm& t : *p.monomial_form())
      s += t.coeff * monomial_moment(std::span<const int>(t.exps.data(), ambient), w);
    return static_cast<double>(s);
  }
  const auto& b = basis_moments(w, p.degree(), monomial_cap);
  long double s = 0;
  for (std::size_t k = 0; k < b.size(); ++k) s += static_cast<long double>(p.coeffs()[k]) * b[k];
  return static_cast<double>(s);
}

double norm_pw(const SphereFunction& f, double p, const ProductWeight& w, const NormOptions& opts) {
  if (!(p >= 1.0)) throw PreconditionError("norm_pw: p must be in [1, inf]");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& x : quasi_uniform_grid(w.dim(), opts.sup_mesh)) m = std::max(m, std::abs(f(x)));
    return m;
  }
  const auto integrand = [&](const SpherePoint& x) {
    const double a = std::abs(f(x));
    return p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
  };
  OracleOptions o;
  o.tol = opts.tol;
  o.abs_tol = std::pow(opts.abs_floor, p);
  // Residuals of good approximations carry rounding noise far above a tight
  // relative tolerance; fall back to the best tolerance that is achievable.
  IntegralEstimate e;
  for (;;) {
    try {
      e = integrate_sphere(integrand, w, o);
      break;
    } catch (const ConvergenceError&) {
      if (o.tol >= opts.loosest_tol) throw;
      o.tol = std::min(10.0 * o.tol, opts.loosest_tol);
    }
  }
  return p == 2.0 ? std::sqrt(e.value) : std::pow(e.value, 1.0 / p);
}

SmoothnessIndex::SmoothnessIndex(double r_, double beta_, double s_)
    : r(r_), beta(beta_), s(s_), alpha1(0.5 * r_), alpha2(0.5 * (r_ + s_)) {
  if (!(s >= 1.0)) throw PreconditionError("SmoothnessIndex: s must be >= 1");
  if (!(r > 0.0 && r < s)) throw PreconditionError("SmoothnessIndex: r must lie in (0, s)");
}

double SmoothnessIndex::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  const double lg = std::max(0.0, std::log(1.0 / t));
  return std::pow(t, r) * std::pow(1.0 + lg, -beta);
}

SmoothnessIndex::Check SmoothnessIndex::check(int samples) const {
  Check c;
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) t[i] = std::pow(10.0, -8.0 + 10.0 * i / (samples - 1));
  auto worst_ratio = [&](auto&& g, bool increasing) {
    // max over t1 ≤ t2 of g(t1)/g(t2) (increasing) or g(t2)/g(t1) (decreasing)
    double best = 0.0, run = 0.0;
    if (increasing) {
      for (double x : t) {
        run = std::max(run, g(x));
        best = std::max(best, run / g(x));
      }
    } else {
      for (auto it = t.rbegin(); it != t.rend(); ++it) {
        run = std::max(run, g(*it));
        best = std::max(best, run / g(*it));
      }
    }
    return best;
  };
  const auto& th = *this;
  c.increasing_constant = worst_ratio([&](double x) { return th(x); }, true);
  c.almost_increasing = c.increasing_constant <= 2.0;
  c.alpha1_increasing = worst_ratio([&](double x) { return th(x) / std::pow(x, alpha1); }, true) <= 2.0;
  c.alpha2_decreasing =
      alpha2 < s && worst_ratio([&](double x) { return th(x) / std::pow(x, alpha2); }, false) <= 2.0;
  double dc = 0.0;
  for (double x : t)
    for (int k = 1; k <= 64; k *= 2) dc = std::max(dc, th(k * x) / (std::pow(k, s) * th(x)));
  c.doubling_constant = dc;
  c.doubling = std::isfinite(dc);
  return c;
}

std::string polynomial_to_json(const SphericalPolynomial& p) {
  nlohmann::json j;
  j["d"] = p.dim();
  j["n"] = p.degree();
  j["coeffs"] = std::vector<double>(p.coeffs().begin(), p.coeffs().end());
  return j.dump();
}

SphericalPolynomial polynomial_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    return SphericalPolynomial(j.at("d").get<int>(), j.at("n").get<int>(), j.at("coeffs").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("polynomial_from_json: ") + e.what());
  }
}

}  // namespace quadlab
