#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "quadlab/rng.hpp"

namespace quadlab {

/// Unit vector in R^{d+1}, i.e. a point of the sphere S^d.
///
/// Coordinates are renormalized on construction, so |‖x‖ − 1| stays at
/// rounding level.  Storage is inline; d ≤ kMaxDim.
class SpherePoint {
 public:
  static constexpr int kMaxDim = 3;

  SpherePoint() = default;
  explicit SpherePoint(std::span<const double> coords);
  SpherePoint(std::initializer_list<double> coords);

  /// Trusts the caller that `coords` already has unit norm.
  static SpherePoint from_unit(std::span<const double> coords);

  /// Sphere dimension d (ambient dimension is d + 1).
  int dim() const noexcept { return static_cast<int>(size_) - 1; }
  std::size_t ambient() const noexcept { return size_; }

  double operator[](std::size_t i) const noexcept { return c_[i]; }
  std::span<const double> coords() const noexcept { return {c_.data(), size_}; }

  SpherePoint operator-() const noexcept;
  bool operator==(const SpherePoint& other) const noexcept;

 private:
  std::array<double, kMaxDim + 1> c_{};
  std::size_t size_ = 0;
};

/// Function on the sphere.
using SphereFunction = std::function<double(const SpherePoint&)>;

/// ⟨x, y⟩; throws DimensionError on mismatch.
double dot(const SpherePoint& x, const SpherePoint& y);

/// Geodesic distance arccos⟨x, y⟩ in [0, π], inner product clamped to [−1, 1].
double geodesic_distance(const SpherePoint& x, const SpherePoint& y);

/// c(x, r) = {y : d(x, y) ≤ r}.
class Cap {
 public:
  Cap(SpherePoint center, double radius);

  const SpherePoint& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int dim() const noexcept { return center_.dim(); }

  bool contains(const SpherePoint& y) const;

 private:
  SpherePoint center_;
  double radius_;
};

/// Normalized surface measure σ(cap) ∈ (0, 1].  Closed form for d ∈ {1, 2},
/// one-dimensional Gauss–Legendre quadrature of sin^{d−1} otherwise.
double cap_surface_measure(const Cap& cap);

/// Uniform point on S^d from a normalized standard Gaussian vector.
SpherePoint random_uniform_point(int d, Rng& rng);

/// Orthogonal (d+1)×(d+1) matrix stored row-major.
struct Rotation {
  int ambient = 0;
  std::array<double, (SpherePoint::kMaxDim + 1) * (SpherePoint::kMaxDim + 1)> m{};

  static Rotation identity(int ambient);
  SpherePoint apply(const SpherePoint& x) const;
  SpherePoint apply_transpose(const SpherePoint& x) const;
};

/// Haar-distributed rotation of R^{d+1}.
Rotation random_rotation(int d, Rng& rng);

/// Orthogonal map (a Householder reflection) sending e_{d+1} to `pole`.
Rotation frame_with_pole(const SpherePoint& pole);

/// Fibonacci lattice of `count` points on S^2 (sorted by decreasing z).
std::vector<SpherePoint> fibonacci_lattice(std::size_t count);

/// Quasi-uniform grid with mesh ≤ mesh_target: Fibonacci lattice on S^2,
/// equispaced points on S^1.
std::vector<SpherePoint> quasi_uniform_grid(int d, double mesh_target);

/// Points sorted along the last coordinate, for fixed-radius neighbour queries.
class ZBandIndex {
 public:
  explicit ZBandIndex(std::span<const SpherePoint> points);

  std::size_t size() const noexcept { return order_.size(); }

  /// Calls visit(index, inner_product) for every point y with d(x, y) ≤ radius.
  void for_each_within(const SpherePoint& x, double radius,
                       const std::function<void(std::size_t, double)>& visit) const;

  /// Index of a nearest point and its geodesic distance.
  std::pair<std::size_t, double> nearest(const SpherePoint& x) const;

 private:
  std::span<const SpherePoint> points_;
  std::vector<std::size_t> order_;
  std::vector<double> z_;
};

/// Maximal ε-separated subset of S^d together with the grid on which its
/// covering property is guaranteed.
struct SeparatedSet {
  std::vector<SpherePoint> points;
  /// Every grid point lies within ε of `points`; mesh ≤ ε/4.
  std::vector<SpherePoint> grid;
};

/// d = 2: greedy farthest-point insertion over a randomly rotated Fibonacci
/// lattice of mesh ≤ ε/4, stopped when no lattice point is farther than ε
/// from the set; the lattice doubles as the validation grid.  d = 1: the
/// optimal equispaced configuration of ⌊2π/ε⌋ points with a random phase
/// (separation ≥ ε there, attained with equality when 2π/ε is an integer).
/// Requires 0 < ε < π/2; identical rng state gives identical output.
SeparatedSet build_separated_set_with_grid(int d, double epsilon, Rng& rng);

std::vector<SpherePoint> build_separated_set(int d, double epsilon, Rng& rng);

/// Smallest pairwise geodesic distance (∞ for fewer than two points).
double min_separation(std::span<const SpherePoint> points);

/// max over grid points of the distance to the nearest point of `set`.
double covering_radius(std::span<const SpherePoint> set, std::span<const SpherePoint> grid);

}  // namespace quadlab
