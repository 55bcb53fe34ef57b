#pragma once

#include <memory>
#include <span>
#include <vector>

#include "quadlab/geometry.hpp"
#include "quadlab/rng.hpp"
#include "quadlab/weights.hpp"

namespace quadlab {

/// C^∞ cut-off: 1 on (−∞, 1/2], 0 on [1, ∞), strictly decreasing in between:
/// g(1−t) / (g(1−t) + g(t−1/2)) with g(s) = exp(−1/s).
double smooth_bump(double t);

/// σ(E) ≤ c_d·ε for the strip E = {x : |π/2 − d(x, v)| ≤ 2ε}: c_2 = 2, c_1 = 4/π.
double strip_measure_constant(int d);

/// min(0.05, 1/(4·c_d·m)) for a weight with m factors (0.05 for the unit weight).
double default_strip_halfwidth(const ProductWeight& w);

/// Strip half-width usable for every N in `Ns`: the default, raised to
/// 1/min(N) when that is needed for N·ε ≥ 1.  Throws PreconditionError if the
/// measure condition c_d·m·ε ≤ 1/2 then fails.
double strip_halfwidth_for(const ProductWeight& w, std::span<const int> Ns);

/// `count` centers pairwise more than 2/N apart with |⟨x, v_j⟩| > sin 2ε for
/// every factor direction, so that every cap c(x, 1/N) misses the strips
/// {|π/2 − d(x, v_j)| ≤ ε}.  Candidates come from a maximal 2/N-separated set;
/// those whose cap would contain a point of `avoid` are skipped.  Requires
/// N·ε ≥ 1.  Throws ConstructionError (detail = achievable count) when short.
std::vector<SpherePoint> strip_complement_centers(const ProductWeight& w, int N, std::size_t count, Rng& rng,
                                                  double epsilon = 0.0, std::span<const SpherePoint> avoid = {});

/// f_α(x) = Σ_j α_j φ(N·d(x, x_j)), φ = smooth_bump.
class FoolingFunction {
 public:
  FoolingFunction(std::vector<SpherePoint> centers, int N, std::vector<double> alpha);
  /// All α_j = 1.
  FoolingFunction(std::vector<SpherePoint> centers, int N);

  double operator()(const SpherePoint& x) const;

  /// φ(N·d(x, x_j)) — the j-th bump alone.
  double bump(std::size_t j, const SpherePoint& x) const;

  std::span<const SpherePoint> centers() const noexcept;
  std::span<const double> alpha() const noexcept;
  int N() const noexcept { return N_; }
  double support_radius() const noexcept { return 1.0 / N_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  int N_;
};

FoolingFunction fooling_function(std::vector<SpherePoint> centers, int N, std::vector<double> alpha);

/// ‖φ(N·d(·, x))‖_{p,w} for one bump.
double bump_norm(const ProductWeight& w, const SpherePoint& center, int N, double p, double tol = 1e-10);

struct NormScaling {
  double slope = 0.0;
  double slope_stderr = 0.0;
  double residual = 0.0;  // max |log‖φ‖ − fit|
  std::vector<double> log_n;
  std::vector<double> log_norm;
  double epsilon = 0.0;
};

/// Fits log(mean_j ‖φ_j‖_{p,w}) against log n, n = N^d, over `Ns`; the mean
/// runs over up to `max_centers` strip-avoiding centers per N.
NormScaling verify_norm_scaling(const ProductWeight& w, double p, std::span<const int> Ns, Rng& rng,
                                std::size_t max_centers = 256);

}  // namespace quadlab
