#include "quadlab/fooling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadlab/errors.hpp"
#include "quadlab/oracle.hpp"
#include "quadlab/stats.hpp"

namespace quadlab {

double smooth_bump(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / (t - 0.5));
  return a / (a + b);
}

double strip_measure_constant(int d) {
  if (d == 2) return 2.0;
  if (d == 1) return 4.0 / std::numbers::pi;
  throw UnsupportedError("strip_measure_constant: d must be 1 or 2");
}

double default_strip_halfwidth(const ProductWeight& w) {
  const std::size_t m = w.factor_count();
  if (m == 0) return 0.05;
  return std::min(0.05, 1.0 / (4.0 * strip_measure_constant(w.dim()) * static_cast<double>(m)));
}

double strip_halfwidth_for(const ProductWeight& w, std::span<const int> Ns) {
  if (Ns.empty()) throw PreconditionError("strip_halfwidth_for: empty N list");
  const int nmin = *std::min_element(Ns.begin(), Ns.end());
  if (nmin < 1) throw PreconditionError("strip_halfwidth_for: N must be >= 1");
  double eps = std::max(default_strip_halfwidth(w), 1.0 / nmin);
  const double measure = strip_measure_constant(w.dim()) * static_cast<double>(w.factor_count()) * eps;
  if (measure > 0.5)
    throw PreconditionError("strip_halfwidth_for: N = " + std::to_string(nmin) +
                            " too small for the strip measure condition");
  // Beyond π/4 the strips {|⟨x,v⟩| ≤ sin 2ε} would cover everything.
  if (2.0 * eps >= std::numbers::pi / 2) throw PreconditionError("strip_halfwidth_for: ε too large");
  return eps;
}

namespace {

// Up to `count` admissible centers; may return fewer.
std::vector<SpherePoint> collect_centers(const ProductWeight& w, int N, std::size_t count, Rng& rng,
                                         double epsilon, std::span<const SpherePoint> avoid) {
  if (N < 1) throw PreconditionError("strip_complement_centers: N must be >= 1");
  if (epsilon <= 0.0) epsilon = default_strip_halfwidth(w);
  if (static_cast<double>(N) * epsilon < 1.0 - 1e-12)
    throw PreconditionError("strip_complement_centers: need N >= 1/ε (N = " + std::to_string(N) +
                            ", ε = " + std::to_string(epsilon) + ")");
  const double sep = 2.0 / N * (1.0 + 1e-9);
  if (sep >= std::numbers::pi / 2) throw PreconditionError("strip_complement_centers: N too small");
  const double bound = std::sin(2.0 * epsilon);

  const std::vector<SpherePoint> candidates = build_separated_set(w.dim(), sep, rng);
  std::vector<SpherePoint> avoid_pts(avoid.begin(), avoid.end());
  const ZBandIndex avoid_index(avoid_pts);
  const double radius = 1.0 / N;

  std::vector<SpherePoint> out;
  out.reserve(count);
  for (const SpherePoint& x : candidates) {
    if (out.size() == count) break;
    bool ok = true;
    for (const SpherePoint& v : w.directions()) {
      if (std::abs(dot(x, v)) <= bound) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (!avoid_pts.empty()) {
      bool hit = false;
      avoid_index.for_each_within(x, radius, [&](std::size_t, double) { hit = true; });
      if (hit) continue;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

std::vector<SpherePoint> strip_complement_centers(const ProductWeight& w, int N, std::size_t count, Rng& rng,
                                                  double epsilon, std::span<const SpherePoint> avoid) {
  std::vector<SpherePoint> out = collect_centers(w, N, count, rng, epsilon, avoid);
  if (out.size() < count)
    throw ConstructionError("strip_complement_centers: only " + std::to_string(out.size()) + " of " +
                                std::to_string(count) + " centers can be placed",
                            static_cast<double>(out.size()));
  return out;
}

struct FoolingFunction::Impl {
  std::vector<SpherePoint> centers;
  std::vector<double> alpha;
  ZBandIndex index;

  Impl(std::vector<SpherePoint> c, std::vector<double> a)
      : centers(std::move(c)), alpha(std::move(a)), index(centers) {}
};

FoolingFunction::FoolingFunction(std::vector<SpherePoint> centers, int N, std::vector<double> alpha) : N_(N) {
  if (N < 1) throw PreconditionError("FoolingFunction: N must be >= 1");
  if (alpha.size() != centers.size()) throw DimensionError("FoolingFunction: one sign per center required");
  impl_ = std::make_shared<const Impl>(std::move(centers), std::move(alpha));
}

FoolingFunction::FoolingFunction(std::vector<SpherePoint> centers, int N)
    : FoolingFunction(centers, N, std::vector<double>(centers.size(), 1.0)) {}

double FoolingFunction::operator()(const SpherePoint& x) const {
  double s = 0.0;
  impl_->index.for_each_within(x, support_radius(), [&](std::size_t j, double ip) {
    s += impl_->alpha[j] * smooth_bump(N_ * std::acos(std::clamp(ip, -1.0, 1.0)));
  });
  return s;
}

double FoolingFunction::bump(std::size_t j, const SpherePoint& x) const {
  return smooth_bump(N_ * geodesic_distance(x, impl_->centers.at(j)));
}

std::span<const SpherePoint> FoolingFunction::centers() const noexcept { return impl_->centers; }
std::span<const double> FoolingFunction::alpha() const noexcept { return impl_->alpha; }

FoolingFunction fooling_function(std::vector<SpherePoint> centers, int N, std::vector<double> alpha) {
  return FoolingFunction(std::move(centers), N, std::move(alpha));
}

double bump_norm(const ProductWeight& w, const SpherePoint& center, int N, double p, double tol) {
  if (std::isinf(p)) return 1.0;  // φ(0) = 1 is the maximum
  if (!(p > 0.0)) throw PreconditionError("bump_norm: p must be positive");
  OracleOptions opts;
  opts.tol = tol;
  opts.coordinate_breaks = false;
  const auto f = [&](const SpherePoint& x) { return std::pow(smooth_bump(N * geodesic_distance(x, center)), p); };
  const IntegralEstimate e = integrate_cap(f, w, Cap(center, 1.0 / N), opts);
  return std::pow(e.value, 1.0 / p);
}

NormScaling verify_norm_scaling(const ProductWeight& w, double p, std::span<const int> Ns, Rng& rng,
                                std::size_t max_centers) {
  if (Ns.size() < 2) throw PreconditionError("verify_norm_scaling: need at least two values of N");
  NormScaling out;
  out.epsilon = strip_halfwidth_for(w, Ns);
  for (int N : Ns) {
    const std::vector<SpherePoint> centers = collect_centers(w, N, max_centers, rng, out.epsilon, {});
    if (centers.empty()) throw ConstructionError("verify_norm_scaling: no admissible center");
    double mean = 0.0;
    for (const SpherePoint& c : centers) mean += bump_norm(w, c, N, p);
    mean /= static_cast<double>(centers.size());
    out.log_n.push_back(w.dim() * std::log(static_cast<double>(N)));
    out.log_norm.push_back(std::log(mean));
  }
  const RateFit fit = fit_rate(out.log_n, out.log_norm);
  out.slope = fit.slope;
  out.slope_stderr = fit.stderr_slope;
  out.residual = fit.max_residual;
  return out;
}

}  // namespace quadlab
