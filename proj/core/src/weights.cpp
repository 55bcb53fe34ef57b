#include "quadlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "quadlab/errors.hpp"
#include "quadlab/oracle.hpp"

namespace quadlab {

namespace {

int axis_index(const SpherePoint& v) {
  int idx = -1;
  for (std::size_t i = 0; i < v.ambient(); ++i) {
    const double a = std::abs(v[i]);
    if (a > 1.0 - 1e-15) {
      idx = static_cast<int>(i);
    } else if (a > 1e-15) {
      return -1;
    }
  }
  return idx;
}

}  // namespace

ProductWeight::ProductWeight(int d) : d_(d) {
  if (d < 1 || d > SpherePoint::kMaxDim) throw DimensionError("ProductWeight: unsupported dimension");
}

ProductWeight::ProductWeight(int d, std::vector<SpherePoint> directions, std::vector<double> kappas)
    : ProductWeight(d) {
  if (directions.size() != kappas.size())
    throw PreconditionError("ProductWeight: directions and exponents differ in length");
  std::vector<bool> used(static_cast<std::size_t>(d) + 1, false);
  for (std::size_t j = 0; j < directions.size(); ++j) {
    if (directions[j].dim() != d) throw DimensionError("ProductWeight: direction dimension mismatch");
    if (!(kappas[j] >= 0.0) || !std::isfinite(kappas[j]))
      throw PreconditionError("ProductWeight: exponents must be finite and >= 0");
    if (kappas[j] == 0.0) continue;
    directions_.push_back(directions[j]);
    kappas_.push_back(kappas[j]);
    const int a = axis_index(directions[j]);
    if (a < 0 || used[static_cast<std::size_t>(a)]) {
      axis_aligned_ = false;
    } else {
      used[static_cast<std::size_t>(a)] = true;
    }
    axis_of_.push_back(a);
  }
}

ProductWeight ProductWeight::axis(int d, std::span<const double> kappas) {
  if (static_cast<int>(kappas.size()) != d + 1)
    throw DimensionError("ProductWeight::axis: need one exponent per coordinate");
  std::vector<SpherePoint> dirs;
  std::vector<double> ks;
  for (int i = 0; i <= d; ++i) {
    std::array<double, SpherePoint::kMaxDim + 1> e{};
    e[static_cast<std::size_t>(i)] = 1.0;
    dirs.push_back(SpherePoint::from_unit(std::span<const double>(e.data(), static_cast<std::size_t>(d) + 1)));
    ks.push_back(kappas[static_cast<std::size_t>(i)]);
  }
  return ProductWeight(d, std::move(dirs), std::move(ks));
}

bool ProductWeight::is_unit() const noexcept { return kappas_.empty(); }

double ProductWeight::kappa_sum() const noexcept {
  double s = 0.0;
  for (double k : kappas_) s += k;
  return s;
}

std::vector<double> ProductWeight::axis_kappas() const {
  if (!axis_aligned_) throw UnsupportedError("weight is not axis-aligned");
  std::vector<double> k(static_cast<std::size_t>(d_) + 1, 0.0);
  for (std::size_t j = 0; j < kappas_.size(); ++j) k[static_cast<std::size_t>(axis_of_[j])] = kappas_[j];
  return k;
}

double ProductWeight::operator()(const SpherePoint& x) const {
  if (x.dim() != d_) throw DimensionError("ProductWeight: point dimension mismatch");
  double v = 1.0;
  for (std::size_t j = 0; j < kappas_.size(); ++j) {
    double ip;
    if (axis_of_[j] >= 0) {
      ip = x[static_cast<std::size_t>(axis_of_[j])];
    } else {
      ip = 0.0;
      const SpherePoint& dir = directions_[j];
      for (std::size_t i = 0; i < x.ambient(); ++i) ip += x[i] * dir[i];
    }
    const double a = std::min(std::abs(ip), 1.0);
    const double e = 2.0 * kappas_[j];
    v *= (e == 2.0) ? a * a : (e == 1.0 ? a : std::pow(a, e));
  }
  return v;
}

std::string ProductWeight::key() const {
  std::string s = "d=" + std::to_string(d_);
  char buf[96];
  if (axis_aligned_) {
    const auto k = axis_kappas();
    s += ";axis";
    for (double v : k) {
      std::snprintf(buf, sizeof buf, ":%.17g", v);
      s += buf;
    }
    return s;
  }
  for (std::size_t j = 0; j < kappas_.size(); ++j) {
    s += ";[";
    for (std::size_t i = 0; i < directions_[j].ambient(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", directions_[j][i]);
      s += buf;
    }
    std::snprintf(buf, sizeof buf, "]^%.17g", kappas_[j]);
    s += buf;
  }
  return s;
}

double eval(const ProductWeight& w, const SpherePoint& x) { return w(x); }

double sphere_abs_moment(std::span<const double> exponents) {
  const double d1 = static_cast<double>(exponents.size());  // d + 1
  double total = 0.0;
  double log_v = std::lgamma(0.5 * d1);
  for (double e : exponents) {
    if (e < 0.0) throw PreconditionError("sphere_abs_moment: exponents must be >= 0");
    total += e;
    log_v += std::lgamma(0.5 * (e + 1.0)) - std::lgamma(0.5);
  }
  log_v -= std::lgamma(0.5 * (total + d1));
  return std::exp(log_v);
}

double total_mass(const ProductWeight& w) {
  if (w.is_unit()) return 1.0;
  if (w.axis_aligned()) {
    std::vector<double> e = w.axis_kappas();
    for (double& v : e) v *= 2.0;
    return sphere_abs_moment(e);
  }
  OracleOptions opts;
  opts.tol = 1e-10;
  return reference_integral([](const SpherePoint&) { return 1.0; }, w, opts);
}

double cap_mass(const ProductWeight& w, const Cap& cap, double tol) {
  if (!(tol > 0.0)) throw PreconditionError("cap_mass: tol must be positive");
  if (cap.dim() != w.dim()) throw DimensionError("cap_mass: dimension mismatch");
  if (w.is_unit()) return cap_surface_measure(cap);
  OracleOptions opts;
  opts.tol = tol;
  opts.coordinate_breaks = false;
  const IntegralEstimate e = integrate_cap([](const SpherePoint&) { return 1.0; }, w, cap, opts);
  return e.value;
}

double critical_index(const ProductWeight& w) {
  if (!w.axis_aligned()) throw UnsupportedError("critical_index: weight is not axis-aligned");
  const auto k = w.axis_kappas();
  const double kmin = *std::min_element(k.begin(), k.end());
  return w.dim() + 2.0 * w.kappa_sum() - 2.0 * kmin;
}

double doubling_ratio_probe(const ProductWeight& w, int m, int trials, Rng& rng) {
  if (m < 0) throw PreconditionError("doubling_ratio_probe: m must be >= 0");
  if (m == 0 || trials < 1) return 1.0;
  const double top = std::numbers::pi / std::ldexp(1.0, m);
  std::uniform_real_distribution<double> u(std::log(0.02), 0.0);
  double best = 1.0;
  for (int t = 0; t < trials; ++t) {
    const SpherePoint x = random_uniform_point(w.dim(), rng);
    const double r = top * std::exp(u(rng));
    const double small = cap_mass(w, Cap(x, r), 1e-9);
    const double big = cap_mass(w, Cap(x, std::min(std::numbers::pi, std::ldexp(r, m))), 1e-9);
    if (small > 0.0) best = std::max(best, big / small);
  }
  return best;
}

}  // namespace quadlab
