#include "quadlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "quadlab/errors.hpp"
#include "quadlab/gauss.hpp"

namespace quadlab {
namespace {

constexpr double kPi = std::numbers::pi;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

void check_size(std::size_t n) {
  if (n < 2 || n > SpherePoint::kMaxDim + 1) {
    throw DimensionError("SpherePoint: ambient dimension must be in [2, " +
                         std::to_string(SpherePoint::kMaxDim + 1) + "], got " + std::to_string(n));
  }
}

}  // namespace

SpherePoint::SpherePoint(std::span<const double> coords) : size_(coords.size()) {
  check_size(size_);
  double norm2 = 0.0;
  for (double c : coords) norm2 += c * c;
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw PreconditionError("SpherePoint: zero or non-finite vector");
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t i = 0; i < size_; ++i) c_[i] = coords[i] * inv;
}

SpherePoint::SpherePoint(std::initializer_list<double> coords)
    : SpherePoint(std::span<const double>(coords.begin(), coords.size())) {}

SpherePoint SpherePoint::from_unit(std::span<const double> coords) {
  check_size(coords.size());
  SpherePoint p;
  p.size_ = coords.size();
  std::copy(coords.begin(), coords.end(), p.c_.begin());
  return p;
}

SpherePoint SpherePoint::operator-() const noexcept {
  SpherePoint p = *this;
  for (std::size_t i = 0; i < size_; ++i) p.c_[i] = -p.c_[i];
  return p;
}

bool SpherePoint::operator==(const SpherePoint& other) const noexcept {
  return size_ == other.size_ && std::equal(c_.begin(), c_.begin() + size_, other.c_.begin());
}

double dot(const SpherePoint& x, const SpherePoint& y) {
  if (x.ambient() != y.ambient()) throw DimensionError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.ambient(); ++i) s += x[i] * y[i];
  return s;
}

double geodesic_distance(const SpherePoint& x, const SpherePoint& y) {
  return std::acos(clamp_unit(dot(x, y)));
}

Cap::Cap(SpherePoint center, double radius) : center_(center), radius_(radius) {
  if (!(radius > 0.0) || radius > kPi) throw PreconditionError("Cap: radius must lie in (0, pi]");
}

bool Cap::contains(const SpherePoint& y) const { return geodesic_distance(center_, y) <= radius_; }

double cap_surface_measure(const Cap& cap) {
  const double r = cap.radius();
  switch (cap.dim()) {
    case 1:
      return r / kPi;
    case 2:
      return (1.0 - std::cos(r)) / 2.0;
    default: {
      // σ(c(x, r)) = ∫_0^r sin^{d−1} t dt / ∫_0^π sin^{d−1} t dt
      const int d = cap.dim();
      const GaussRule& g = gauss_legendre(64);
      auto integrate = [&](double b) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
          const double t = 0.5 * b * (g.nodes[i] + 1.0);
          s += g.weights[i] * std::pow(std::sin(t), d - 1);
        }
        return 0.5 * b * s;
      };
      return std::min(1.0, integrate(r) / integrate(kPi));
    }
  }
}

SpherePoint random_uniform_point(int d, Rng& rng) {
  std::normal_distribution<double> normal;
  std::array<double, SpherePoint::kMaxDim + 1> g{};
  const std::size_t n = static_cast<std::size_t>(d) + 1;
  check_size(n);
  for (;;) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = normal(rng);
      norm2 += g[i] * g[i];
    }
    if (norm2 > 1e-300) return SpherePoint(std::span<const double>(g.data(), n));
  }
}

Rotation Rotation::identity(int ambient) {
  Rotation r;
  r.ambient = ambient;
  for (int i = 0; i < ambient; ++i) r.m[i * ambient + i] = 1.0;
  return r;
}

SpherePoint Rotation::apply(const SpherePoint& x) const {
  if (static_cast<int>(x.ambient()) != ambient) throw DimensionError("Rotation: dimension mismatch");
  std::array<double, SpherePoint::kMaxDim + 1> y{};
  for (int i = 0; i < ambient; ++i) {
    double s = 0.0;
    for (int j = 0; j < ambient; ++j) s += m[i * ambient + j] * x[j];
    y[i] = s;
  }
  return SpherePoint(std::span<const double>(y.data(), ambient));
}

SpherePoint Rotation::apply_transpose(const SpherePoint& x) const {
  if (static_cast<int>(x.ambient()) != ambient) throw DimensionError("Rotation: dimension mismatch");
  std::array<double, SpherePoint::kMaxDim + 1> y{};
  for (int i = 0; i < ambient; ++i) {
    double s = 0.0;
    for (int j = 0; j < ambient; ++j) s += m[j * ambient + i] * x[j];
    y[i] = s;
  }
  return SpherePoint(std::span<const double>(y.data(), ambient));
}

Rotation random_rotation(int d, Rng& rng) {
  const int n = d + 1;
  check_size(static_cast<std::size_t>(n));
  std::normal_distribution<double> normal;
  Rotation r;
  r.ambient = n;
  // Gram–Schmidt on Gaussian rows gives a Haar-distributed orthogonal matrix.
  for (int i = 0; i < n; ++i) {
    for (;;) {
      for (int j = 0; j < n; ++j) r.m[i * n + j] = normal(rng);
      for (int k = 0; k < i; ++k) {
        double proj = 0.0;
        for (int j = 0; j < n; ++j) proj += r.m[i * n + j] * r.m[k * n + j];
        for (int j = 0; j < n; ++j) r.m[i * n + j] -= proj * r.m[k * n + j];
      }
      double norm2 = 0.0;
      for (int j = 0; j < n; ++j) norm2 += r.m[i * n + j] * r.m[i * n + j];
      if (norm2 > 1e-12) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (int j = 0; j < n; ++j) r.m[i * n + j] *= inv;
        break;
      }
    }
  }
  return r;
}

Rotation frame_with_pole(const SpherePoint& pole) {
  const int n = static_cast<int>(pole.ambient());
  Rotation r = Rotation::identity(n);
  std::array<double, SpherePoint::kMaxDim + 1> v{};
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = (i == n - 1 ? 1.0 : 0.0) - pole[i];
    norm2 += v[i] * v[i];
  }
  if (norm2 < 1e-28) return r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.m[i * n + j] -= 2.0 * v[i] * v[j] / norm2;
  return r;
}

std::vector<SpherePoint> fibonacci_lattice(std::size_t count) {
  std::vector<SpherePoint> pts;
  pts.reserve(count);
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    const double c[3] = {rho * std::cos(phi), rho * std::sin(phi), z};
    pts.push_back(SpherePoint(std::span<const double>(c, 3)));
  }
  return pts;
}

std::vector<SpherePoint> quasi_uniform_grid(int d, double mesh_target) {
  if (!(mesh_target > 0.0)) throw PreconditionError("quasi_uniform_grid: mesh must be positive");
  if (d == 1) {
    const auto count = static_cast<std::size_t>(std::ceil(kPi / mesh_target));
    std::vector<SpherePoint> pts;
    pts.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(count);
      const double c[2] = {std::cos(a), std::sin(a)};
      pts.push_back(SpherePoint::from_unit(std::span<const double>(c, 2)));
    }
    return pts;
  }
  if (d == 2) {
    // Covering radius of the Fibonacci lattice is about sqrt(2π/K).
    const auto count = static_cast<std::size_t>(std::ceil(2.5 * kPi / (mesh_target * mesh_target)));
    return fibonacci_lattice(std::max<std::size_t>(count, 4));
  }
  throw UnsupportedError("quasi_uniform_grid: only d in {1, 2}");
}

ZBandIndex::ZBandIndex(std::span<const SpherePoint> points) : points_(points), order_(points.size()) {
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  const auto last = [&](std::size_t i) { return points_[i][points_[i].ambient() - 1]; };
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return last(a) < last(b); });
  z_.resize(order_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) z_[k] = last(order_[k]);
}

void ZBandIndex::for_each_within(const SpherePoint& x, double radius,
                                 const std::function<void(std::size_t, double)>& visit) const {
  if (order_.empty()) return;
  const double zx = clamp_unit(x[x.ambient() - 1]);
  const double theta = std::acos(zx);
  const double zlo = radius >= kPi ? -1.0 : std::cos(std::min(kPi, theta + radius));
  const double zhi = radius >= kPi ? 1.0 : std::cos(std::max(0.0, theta - radius));
  const double min_dot = std::cos(std::min(radius, kPi));
  auto begin = std::lower_bound(z_.begin(), z_.end(), zlo - 1e-15);
  auto end = std::upper_bound(z_.begin(), z_.end(), zhi + 1e-15);
  for (auto it = begin; it != end; ++it) {
    const std::size_t idx = order_[static_cast<std::size_t>(it - z_.begin())];
    const double ip = dot(x, points_[idx]);
    if (ip >= min_dot - 1e-15) visit(idx, ip);
  }
}

std::pair<std::size_t, double> ZBandIndex::nearest(const SpherePoint& x) const {
  if (order_.empty()) throw PreconditionError("ZBandIndex::nearest: empty index");
  double radius = std::min(kPi, 4.0 * std::sqrt(4.0 * kPi / static_cast<double>(order_.size())));
  for (;;) {
    double best = -2.0;
    std::size_t best_idx = 0;
    for_each_within(x, radius, [&](std::size_t idx, double ip) {
      if (ip > best) {
        best = ip;
        best_idx = idx;
      }
    });
    if (best > -2.0) {
      const double dist = std::acos(clamp_unit(best));
      if (dist <= radius || radius >= kPi) return {best_idx, dist};
    }
    if (radius >= kPi) return {best_idx, std::acos(clamp_unit(best))};
    radius = std::min(kPi, 2.0 * radius);
  }
}

namespace {

SeparatedSet circle_separated_set(double epsilon, Rng& rng) {
  const auto count = static_cast<std::size_t>(std::floor(2.0 * kPi / epsilon * (1.0 + 1e-12)));
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi / static_cast<double>(count));
  const double phase = phase_dist(rng);
  SeparatedSet out;
  out.points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double a = phase + 2.0 * kPi * static_cast<double>(k) / static_cast<double>(count);
    const double c[2] = {std::cos(a), std::sin(a)};
    out.points.push_back(SpherePoint::from_unit(std::span<const double>(c, 2)));
  }
  out.grid = quasi_uniform_grid(1, epsilon / 4.0);
  return out;
}

SeparatedSet sphere_farthest_point_set(double epsilon, Rng& rng) {
  const Rotation rot = random_rotation(2, rng);
  std::vector<SpherePoint> cand = quasi_uniform_grid(2, epsilon / 4.0);
  for (auto& c : cand) c = rot.apply(c);
  std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
  const std::size_t start = pick(rng);

  // Structure-of-arrays copy ordered by z for the band scans.
  const std::size_t k = cand.size();
  std::vector<std::uint32_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cand[a][2] < cand[b][2]; });
  std::vector<double> xs(k), ys(k), zs(k);
  std::vector<std::uint32_t> pos_of(k);
  for (std::size_t p = 0; p < k; ++p) {
    xs[p] = cand[order[p]][0];
    ys[p] = cand[order[p]][1];
    zs[p] = cand[order[p]][2];
    pos_of[order[p]] = static_cast<std::uint32_t>(p);
  }

  std::vector<double> max_dot(k, -2.0);
  using Entry = std::pair<double, std::uint32_t>;  // (max_dot, position); smallest first
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<std::uint32_t> chosen;

  auto insert = [&](std::uint32_t p, double radius) {
    chosen.push_back(p);
    const double x = xs[p], y = ys[p], z = zs[p];
    const double theta = std::acos(clamp_unit(z));
    const double zlo = radius >= kPi ? -2.0 : std::cos(std::min(kPi, theta + radius)) - 1e-15;
    const double zhi = radius >= kPi ? 2.0 : std::cos(std::max(0.0, theta - radius)) + 1e-15;
    const auto lo = static_cast<std::size_t>(std::lower_bound(zs.begin(), zs.end(), zlo) - zs.begin());
    const auto hi = static_cast<std::size_t>(std::upper_bound(zs.begin(), zs.end(), zhi) - zs.begin());
    for (std::size_t q = lo; q < hi; ++q) {
      const double ip = x * xs[q] + y * ys[q] + z * zs[q];
      if (ip > max_dot[q]) {
        max_dot[q] = ip;
        heap.emplace(ip, static_cast<std::uint32_t>(q));
      }
    }
    if (heap.size() > 8 * k) {
      std::vector<Entry> live;
      live.reserve(k);
      while (!heap.empty()) {
        if (heap.top().first == max_dot[heap.top().second]) live.push_back(heap.top());
        heap.pop();
      }
      heap = decltype(heap)(std::greater<>(), std::move(live));
    }
  };

  insert(pos_of[start], kPi);
  while (!heap.empty()) {
    const auto [ip, q] = heap.top();
    heap.pop();
    if (ip != max_dot[q]) continue;
    const double dist = std::acos(clamp_unit(ip));
    if (!(dist > epsilon)) break;
    insert(q, dist);
  }

  SeparatedSet out;
  out.points.reserve(chosen.size());
  for (auto p : chosen) out.points.push_back(cand[order[p]]);
  out.grid = std::move(cand);
  return out;
}

}  // namespace

SeparatedSet build_separated_set_with_grid(int d, double epsilon, Rng& rng) {
  if (!(epsilon > 0.0) || !(epsilon < kPi / 2.0)) {
    throw PreconditionError("build_separated_set: epsilon must lie in (0, pi/2)");
  }
  if (d == 1) return circle_separated_set(epsilon, rng);
  if (d == 2) return sphere_farthest_point_set(epsilon, rng);
  throw UnsupportedError("build_separated_set: only d in {1, 2}");
}

std::vector<SpherePoint> build_separated_set(int d, double epsilon, Rng& rng) {
  return build_separated_set_with_grid(d, epsilon, rng).points;
}

double min_separation(std::span<const SpherePoint> points) {
  if (points.size() < 2) return std::numeric_limits<double>::infinity();
  ZBandIndex index(points);
  double best = kPi;
  double radius = std::min(kPi, 4.0 * std::sqrt(4.0 * kPi / static_cast<double>(points.size())));
  for (std::size_t i = 0; i < points.size(); ++i) {
    double r = radius;
    for (;;) {
      double local = -2.0;
      index.for_each_within(points[i], r, [&](std::size_t j, double ip) {
        if (j != i) local = std::max(local, ip);
      });
      if (local > -2.0 || r >= kPi) {
        if (local > -2.0) best = std::min(best, std::acos(clamp_unit(local)));
        break;
      }
      r = std::min(kPi, 2.0 * r);
    }
  }
  return best;
}

double covering_radius(std::span<const SpherePoint> set, std::span<const SpherePoint> grid) {
  if (set.empty()) throw PreconditionError("covering_radius: empty set");
  ZBandIndex index(set);
  double worst = 0.0;
  for (const auto& g : grid) worst = std::max(worst, index.nearest(g).second);
  return worst;
}

}  // namespace quadlab
