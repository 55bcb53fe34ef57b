#include "quadlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <queue>
#include <string>

#include "quadlab/errors.hpp"
#include "quadlab/gauss.hpp"

namespace quadlab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ValueAbs {
  double v;
  double a;
};

struct Panel {
  double a, b;
  ValueAbs left, right;
  double coarse;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

// g returns ValueAbs so that nested integrals can carry ∫|g| of the inner
// integrand rather than |∫g|.
template <class G>
IntegralEstimate adaptive(G&& g, std::vector<double> breaks, double rel_tol, double abs_tol,
                          std::size_t max_intervals, int order) {
  const GaussRule& rule = gauss_legendre(order);
  auto gl = [&](double a, double b) {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0, sa = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const ValueAbs r = g(mid + half * rule.nodes[i]);
      s += rule.weights[i] * r.v;
      sa += rule.weights[i] * r.a;
    }
    return ValueAbs{s * half, sa * half};
  };
  auto make = [&](double a, double b, double coarse) {
    const double m = 0.5 * (a + b);
    Panel p{a, b, gl(a, m), gl(m, b), coarse, 0.0};
    p.err = std::abs(p.left.v + p.right.v - coarse);
    return p;
  };

  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::priority_queue<Panel> heap;
  long double value = 0, abs_value = 0, err = 0;
  auto add = [&](const Panel& p, int sign) {
    value += sign * (static_cast<long double>(p.left.v) + p.right.v);
    abs_value += sign * (static_cast<long double>(p.left.a) + p.right.a);
    err += sign * static_cast<long double>(p.err);
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    Panel p = make(breaks[i], breaks[i + 1], gl(breaks[i], breaks[i + 1]).v);
    add(p, +1);
    heap.push(p);
  }
  std::size_t splits = 0;
  while (!heap.empty() && err > std::max<long double>(abs_tol, rel_tol * abs_value)) {
    if (heap.size() >= max_intervals) {
      const double rel = abs_value > 0 ? static_cast<double>(err / abs_value) : static_cast<double>(err);
      char buf[96];
      std::snprintf(buf, sizeof buf, "adaptive quadrature: interval budget exhausted (relative error %.3g)", rel);
      throw ConvergenceError(buf, rel);
    }
    Panel p = heap.top();
    heap.pop();
    add(p, -1);
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      // Width at rounding level: accept the panel as is.
      p.err = 0.0;
      add(p, +1);
      heap.push(p);
      continue;
    }
    Panel l = make(p.a, m, p.left.v), r = make(m, p.b, p.right.v);
    add(l, +1);
    add(r, +1);
    heap.push(l);
    heap.push(r);
    if (++splits % 256 == 0) {
      // Resynchronize the running sums.
      value = abs_value = err = 0;
      auto copy = heap;
      while (!copy.empty()) {
        add(copy.top(), +1);
        copy.pop();
      }
    }
  }
  return {static_cast<double>(value), static_cast<double>(err), static_cast<double>(abs_value)};
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

// A normal is a "plane" of non-smoothness; duplicates up to sign are dropped.
void push_plane(std::vector<SpherePoint>& planes, const SpherePoint& n) {
  for (const auto& q : planes)
    if (std::abs(dot(q, n)) > 1.0 - 1e-14) return;
  planes.push_back(n);
}

bool factor_is_smooth(double kappa) {
  const double e = 2.0 * kappa;
  return std::abs(e - std::round(e)) < 1e-14 && static_cast<long long>(std::round(e)) % 2 == 0;
}

std::vector<SpherePoint> collect_planes(const ProductWeight& w, const OracleOptions& opts) {
  std::vector<SpherePoint> planes;
  const auto dirs = w.directions();
  const auto kap = w.kappas();
  for (std::size_t j = 0; j < dirs.size(); ++j)
    if (!factor_is_smooth(kap[j]) || opts.coordinate_breaks) push_plane(planes, dirs[j]);
  const std::size_t n = static_cast<std::size_t>(w.dim()) + 1;
  if (opts.coordinate_breaks) {
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, SpherePoint::kMaxDim + 1> e{};
      e[i] = 1.0;
      push_plane(planes, SpherePoint::from_unit(std::span<const double>(e.data(), n)));
    }
  }
  for (const auto& p : opts.extra_planes) {
    if (p.ambient() != n) throw DimensionError("oracle: extra plane dimension mismatch");
    push_plane(planes, p);
  }
  return planes;
}

IntegralEstimate integrate_arc(const SphereFunction& f, const ProductWeight& w, const Cap& cap,
                               const OracleOptions& opts) {
  const SpherePoint& c = cap.center();
  const double theta_c = std::atan2(c[1], c[0]);
  const double r = cap.radius();
  const double lo = theta_c - r, hi = theta_c + r;
  std::vector<double> breaks{lo, hi};
  for (const auto& n : collect_planes(w, opts)) {
    // ⟨(cos θ, sin θ), n⟩ = 0 at θ = atan2(n2, n1) ± π/2 (mod 2π).
    const double base = std::atan2(n[1], n[0]) + 0.5 * kPi;
    for (int k = -3; k <= 3; ++k) {
      const double t = base + k * kPi;
      if (t > lo && t < hi) breaks.push_back(t);
    }
  }
  if (opts.coordinate_breaks) {
    for (int k = -8; k <= 8; ++k) {
      const double t = k * 0.5 * kPi;
      if (t > lo && t < hi) breaks.push_back(t);
    }
  }
  auto g = [&](double th) {
    const double xy[2] = {std::cos(th), std::sin(th)};
    const SpherePoint x = SpherePoint::from_unit(std::span<const double>(xy, 2));
    const double v = f(x) * w(x);
    return ValueAbs{v, std::abs(v)};
  };
  IntegralEstimate e = adaptive(g, breaks, opts.tol, opts.abs_tol * kTwoPi, opts.max_intervals, opts.order);
  const double s = 1.0 / kTwoPi;
  return {e.value * s, e.error * s, e.abs_value * s};
}

IntegralEstimate integrate_polar(const SphereFunction& f, const ProductWeight& w, const Cap& cap,
                                 const OracleOptions& opts) {
  const Rotation frame = frame_with_pole(cap.center());
  const double r = cap.radius();
  const bool full = r >= kPi;

  // Planes in local coordinates.
  std::vector<std::array<double, 3>> local;
  for (const auto& n : collect_planes(w, opts)) {
    const SpherePoint m = frame.apply_transpose(n);
    local.push_back({m[0], m[1], m[2]});
  }

  std::vector<double> outer{0.0, kTwoPi};
  auto push_phi = [&](double phi) { outer.push_back(wrap_angle(phi)); };
  if (opts.coordinate_breaks)
    for (int k = 1; k < 4; ++k) outer.push_back(k * 0.5 * kPi);
  for (const auto& n : local) {
    const double rho = std::hypot(n[0], n[1]);
    if (rho < 1e-15) continue;
    const double phi0 = std::atan2(n[1], n[0]);
    // a(φ) = ρ cos(φ − φ0) vanishes: the circle's steepest point in t.
    push_phi(phi0 + 0.5 * kPi);
    push_phi(phi0 - 0.5 * kPi);
    if (!full) {
      // The circle meets the cap boundary: ρ cos(φ − φ0) sin r + n3 cos r = 0.
      const double rhs = -n[2] * std::cos(r) / (rho * std::sin(r));
      if (std::abs(rhs) <= 1.0) {
        const double a = std::acos(rhs);
        push_phi(phi0 + a);
        push_phi(phi0 - a);
      }
    }
  }
  for (std::size_t i = 0; i < local.size(); ++i) {
    for (std::size_t j = i + 1; j < local.size(); ++j) {
      const auto& a = local[i];
      const auto& b = local[j];
      const double cx = a[1] * b[2] - a[2] * b[1];
      const double cy = a[2] * b[0] - a[0] * b[2];
      if (std::hypot(cx, cy) < 1e-15) continue;
      push_phi(std::atan2(cy, cx));
      push_phi(std::atan2(-cy, -cx));
    }
  }

  const double inner_tol = 0.1 * opts.tol;
  auto line_breaks = [&](double cp, double sp) {
    std::vector<double> breaks{0.0, r};
    for (const auto& n : local) {
      const double a = n[0] * cp + n[1] * sp;
      double t = std::atan2(n[2], -a);
      if (t < 0) t += kPi;
      if (t > 0.0 && t < r) breaks.push_back(t);
    }
    std::sort(breaks.begin(), breaks.end());
    return breaks;
  };
  auto point = [&](double t, double cp, double sp) {
    const double st = std::sin(t);
    const double loc[3] = {st * cp, st * sp, std::cos(t)};
    std::array<double, 3> y{};
    for (int i = 0; i < 3; ++i)
      y[i] = frame.m[i * 3 + 0] * loc[0] + frame.m[i * 3 + 1] * loc[1] + frame.m[i * 3 + 2] * loc[2];
    return SpherePoint::from_unit(std::span<const double>(y.data(), 3));
  };

  // A coarse pass estimates ∫∫|g|; it sets an absolute floor for the inner
  // integrals so that lines on which the integrand is pure rounding noise
  // (e.g. along a nodal meridian) do not exhaust the budget.
  double scale = 0.0;
  {
    const GaussRule& rule = gauss_legendre(opts.order);
    constexpr int kLines = 32;
    for (int k = 0; k < kLines; ++k) {
      const double phi = kTwoPi * (k + 0.5) / kLines;
      const double cp = std::cos(phi), sp = std::sin(phi);
      const auto breaks = line_breaks(cp, sp);
      for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double half = 0.5 * (breaks[b + 1] - breaks[b]), mid = 0.5 * (breaks[b + 1] + breaks[b]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
          const double t = mid + half * rule.nodes[i];
          const SpherePoint x = point(t, cp, sp);
          scale += half * rule.weights[i] * std::abs(std::sin(t) * f(x) * w(x));
        }
      }
    }
    scale /= kLines;  // mean line integral of |g|
  }
  const double inner_abs = std::max(inner_tol * scale * 1e-2, 0.1 * opts.abs_tol);

  auto inner = [&](double phi) {
    const double cp = std::cos(phi), sp = std::sin(phi);
    auto g = [&](double t) {
      const SpherePoint x = point(t, cp, sp);
      const double v = std::sin(t) * f(x) * w(x);
      return ValueAbs{v, std::abs(v)};
    };
    IntegralEstimate e = adaptive(g, line_breaks(cp, sp), inner_tol, inner_abs, opts.max_intervals, opts.order);
    return ValueAbs{e.value, e.abs_value};
  };
  IntegralEstimate e = adaptive(inner, outer, 0.85 * opts.tol, opts.abs_tol * 4.0 * kPi, opts.max_intervals, opts.order);
  const double s = 1.0 / (4.0 * kPi);
  // Inner errors are bounded by inner_tol · ∫|g|.
  return {e.value * s, (e.error + inner_tol * e.abs_value + kTwoPi * inner_abs) * s, e.abs_value * s};
}

}  // namespace

IntegralEstimate integrate_1d(const std::function<double(double)>& g, std::vector<double> breaks,
                              double rel_tol, double abs_tol, std::size_t max_intervals, int order) {
  if (breaks.size() < 2) throw PreconditionError("integrate_1d: need at least two breakpoints");
  auto h = [&](double x) {
    const double v = g(x);
    return ValueAbs{v, std::abs(v)};
  };
  return adaptive(h, std::move(breaks), rel_tol, abs_tol, max_intervals, order);
}

IntegralEstimate integrate_cap(const SphereFunction& f, const ProductWeight& w, const Cap& cap,
                               const OracleOptions& opts) {
  if (cap.dim() != w.dim()) throw DimensionError("integrate_cap: cap and weight dimensions differ");
  if (!(opts.tol > 0.0)) throw PreconditionError("oracle: tolerance must be positive");
  switch (w.dim()) {
    case 1:
      return integrate_arc(f, w, cap, opts);
    case 2:
      return integrate_polar(f, w, cap, opts);
    default:
      throw UnsupportedError("oracle: only d in {1, 2} is supported");
  }
}

IntegralEstimate integrate_sphere(const SphereFunction& f, const ProductWeight& w, const OracleOptions& opts) {
  const std::size_t n = static_cast<std::size_t>(w.dim()) + 1;
  std::array<double, SpherePoint::kMaxDim + 1> pole{};
  pole[n - 1] = 1.0;
  const Cap whole(SpherePoint::from_unit(std::span<const double>(pole.data(), n)), kPi);
  return integrate_cap(f, w, whole, opts);
}

double reference_integral(const SphereFunction& f, const ProductWeight& w, const OracleOptions& opts) {
  if (opts.tol < 1e-13) throw PreconditionError("reference_integral: tol must be >= 1e-13");
  const IntegralEstimate e = integrate_sphere(f, w, opts);
  if (e.error > std::max(opts.tol * e.abs_value, opts.abs_tol) && e.error > 0.0) {
    const double rel = e.abs_value > 0 ? e.error / e.abs_value : e.error;
    throw ConvergenceError("reference_integral: tolerance not reached", rel);
  }
  return e.value;
}

double reference_integral(const SphereFunction& f, const ProductWeight& w, double tol) {
  OracleOptions opts;
  opts.tol = tol;
  return reference_integral(f, w, opts);
}

ProductGrid sphere_product_grid(const ProductWeight& w, int panels_per_quadrant, int order) {
  if (panels_per_quadrant < 1 || order < 1) throw PreconditionError("sphere_product_grid: bad resolution");
  const GaussRule& rule = gauss_legendre(order);
  ProductGrid grid;
  auto panel_nodes = [&](double lo, double hi, int panels, std::vector<double>& x, std::vector<double>& wt) {
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * h;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        x.push_back(a + 0.5 * h * (rule.nodes[i] + 1.0));
        wt.push_back(0.5 * h * rule.weights[i]);
      }
    }
  };
  if (w.dim() == 1) {
    std::vector<double> th, wt;
    panel_nodes(0.0, kTwoPi, 4 * panels_per_quadrant, th, wt);
    for (std::size_t i = 0; i < th.size(); ++i) {
      const double xy[2] = {std::cos(th[i]), std::sin(th[i])};
      const SpherePoint x = SpherePoint::from_unit(std::span<const double>(xy, 2));
      grid.nodes.push_back(x);
      grid.weights.push_back(wt[i] * w(x) / kTwoPi);
    }
    return grid;
  }
  if (w.dim() != 2) throw UnsupportedError("sphere_product_grid: only d in {1, 2}");
  std::vector<double> th, wth, ph, wph;
  panel_nodes(0.0, kPi, 2 * panels_per_quadrant, th, wth);
  panel_nodes(0.0, kTwoPi, 4 * panels_per_quadrant, ph, wph);
  grid.nodes.reserve(th.size() * ph.size());
  grid.weights.reserve(th.size() * ph.size());
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double st = std::sin(th[i]), ct = std::cos(th[i]);
    for (std::size_t j = 0; j < ph.size(); ++j) {
      const double c[3] = {st * std::cos(ph[j]), st * std::sin(ph[j]), ct};
      const SpherePoint x = SpherePoint::from_unit(std::span<const double>(c, 3));
      grid.nodes.push_back(x);
      grid.weights.push_back(wth[i] * wph[j] * st * w(x) / (4.0 * kPi));
    }
  }
  return grid;
}

}  // namespace quadlab
