#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "quadlab/geometry.hpp"
#include "quadlab/weights.hpp"

namespace quadlab {

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;      // estimated absolute error
  double abs_value = 0.0;  // ∫|g|, the scale the relative tolerance refers to
};

struct OracleOptions {
  double tol = 1e-12;  // relative to ∫|f| w dσ
  /// Absolute floor on the error of the (normalized) integral; lets
  /// integrands that are pure rounding noise terminate.
  double abs_tol = 0.0;
  int order = 12;      // Gauss–Legendre points per interval
  std::size_t max_intervals = 20000;  // per one-dimensional adaptive pass
  /// Also break at the coordinate planes x_i = 0 (useful when f itself has
  /// kinks there, e.g. |x_3|^{3/2}).
  bool coordinate_breaks = true;
  /// Extra great circles {⟨x, n⟩ = 0} across which f is not smooth.
  std::vector<SpherePoint> extra_planes;
};

/// Globally adaptive Gauss–Legendre on [breaks.front(), breaks.back()] with
/// `breaks` as fixed panel boundaries.  The error estimate compares each
/// panel with its two halves; panels are bisected until the summed estimate
/// is ≤ max(abs_tol, rel_tol·∫|g|).  Throws ConvergenceError on budget exhaustion.
IntegralEstimate integrate_1d(const std::function<double(double)>& g, std::vector<double> breaks,
                              double rel_tol, double abs_tol = 0.0, std::size_t max_intervals = 20000,
                              int order = 12);

/// ∫_cap f w dσ.  Polar coordinates (t, φ) about the cap center; the inner
/// t-integral breaks exactly where it crosses a weight zero circle (and the
/// coordinate planes), the outer φ-integral breaks where those circles meet
/// each other or the cap boundary.  A radius-π cap is the whole sphere.
IntegralEstimate integrate_cap(const SphereFunction& f, const ProductWeight& w, const Cap& cap,
                               const OracleOptions& opts = {});

/// ∫_{S^d} f w dσ.
IntegralEstimate integrate_sphere(const SphereFunction& f, const ProductWeight& w,
                                  const OracleOptions& opts = {});

/// ∫ f w dσ to relative tolerance `tol` (tol ≥ 1e-13); throws ConvergenceError
/// when the requested accuracy is not reached.
double reference_integral(const SphereFunction& f, const ProductWeight& w, double tol = 1e-12);
double reference_integral(const SphereFunction& f, const ProductWeight& w, const OracleOptions& opts);

/// Tensor product rule (nodes, weights including w and dσ) with panels split
/// at the coordinate planes; used for discrete norm checks where one fixed
/// rule must be applied to many integrands.
struct ProductGrid {
  std::vector<SpherePoint> nodes;
  std::vector<double> weights;
};
ProductGrid sphere_product_grid(const ProductWeight& w, int panels_per_quadrant, int order);

}  // namespace quadlab
