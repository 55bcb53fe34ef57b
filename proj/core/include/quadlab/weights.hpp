#pragma once

#include <span>
#include <string>
#include <vector>

#include "quadlab/geometry.hpp"
#include "quadlab/rng.hpp"

namespace quadlab {

/// w(x) = ∏_j |⟨x, v_j⟩|^{2κ_j} on S^d.
///
/// An empty factor list is the unit weight.  The weight is axis-aligned when
/// every direction is ±e_i and no axis carries two factors; only then are the
/// closed-form moment and critical-index paths available.
class ProductWeight {
 public:
  /// Unit weight on S^d.
  explicit ProductWeight(int d);
  ProductWeight(int d, std::vector<SpherePoint> directions, std::vector<double> kappas);

  /// ∏_i |x_i|^{2κ_i}; `kappas` has one entry per axis (d + 1 entries), zeros dropped.
  static ProductWeight axis(int d, std::span<const double> kappas);

  int dim() const noexcept { return d_; }
  std::span<const SpherePoint> directions() const noexcept { return directions_; }
  std::span<const double> kappas() const noexcept { return kappas_; }
  std::size_t factor_count() const noexcept { return kappas_.size(); }
  bool axis_aligned() const noexcept { return axis_aligned_; }
  /// True when w ≡ 1 (no factor with κ > 0).
  bool is_unit() const noexcept;
  /// |κ| = Σ κ_j.
  double kappa_sum() const noexcept;
  /// κ per axis, d + 1 entries; throws UnsupportedError unless axis-aligned.
  std::vector<double> axis_kappas() const;

  double operator()(const SpherePoint& x) const;

  /// Canonical text form; equal weights give equal keys.
  std::string key() const;

 private:
  int d_;
  std::vector<SpherePoint> directions_;
  std::vector<double> kappas_;
  std::vector<int> axis_of_;  // axis index per factor when axis-aligned
  bool axis_aligned_ = true;
};

/// Evaluates w at x; never exceeds 1 since every factor is at most 1.
double eval(const ProductWeight& w, const SpherePoint& x);

/// Z = ∫ w dσ.  Exact product-Gamma formula when axis-aligned, reference
/// quadrature (relative 1e-10) otherwise.
double total_mass(const ProductWeight& w);

/// ∫_{S^d} ∏ |x_i|^{e_i} dσ for real e_i ≥ 0 (normalized σ).
double sphere_abs_moment(std::span<const double> exponents);

/// w(cap) = ∫_cap w dσ to relative tolerance `tol`.
double cap_mass(const ProductWeight& w, const Cap& cap, double tol = 1e-10);

/// s_w = d + 2|κ| − 2 min_i κ_i over all d + 1 axes (axis-aligned only).
double critical_index(const ProductWeight& w);

/// max over `trials` random caps B of w(2^m B)/w(B).
double doubling_ratio_probe(const ProductWeight& w, int m, int trials, Rng& rng);

}  // namespace quadlab
