#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "quadlab/mz_cubature.hpp"
#include "quadlab/polyspace.hpp"

namespace quadlab {

/// (Σ τ_k |f(x_k)|^p)^{1/p}, or max_k |f(x_k)| for p = ∞.
double discretized_norm(const SphereFunction& f, const MZFamily& family, double p);
double discretized_norm(std::span<const double> values, const MZFamily& family, double p);

struct LpFitOptions {
  int max_iterations = 200;
  double rel_change = 1e-10;  // stop when the objective changes by less than this (relative)
  double eta = 1e-10;         // residual floor of the p = 1 reweighting
  /// Above this many design-matrix entries the p = 2 solve streams the
  /// normal equations instead of factoring the design matrix.
  std::size_t dense_limit = 20'000'000;
};

struct LpFitResult {
  SphericalPolynomial poly{2, 0};
  double objective = 0.0;   // ‖f − P‖_(p)
  int iterations = 0;
  bool converged = true;    // false: budget exhausted, best iterate returned
};

/// L_{n,p} f: minimizer over Π_n of ‖f − P‖_(p) on the family (n = family degree).
/// p = 2 by a column-equilibrated weighted QR; 1 < p < ∞ by iteratively
/// reweighted least squares (damped by 1/(p−1) for p > 2); p = 1 by IRLS
/// with residual floor η; p = ∞ by Lawson's iteration.  Non-quadratic cases
/// start from the p = 2 solution.  Throws ConstructionError if the design
/// matrix is rank deficient.
LpFitResult least_lp_fit(std::span<const double> values, const MZFamily& family, double p,
                         const LpFitOptions& opts = {});
LpFitResult least_lp_fit(const SphereFunction& f, const MZFamily& family, double p, const LpFitOptions& opts = {});

struct RecoveryOptions {
  double delta = kDefaultDelta;
  std::uint64_t seed = 0x5eed;
  NormOptions norm;
  LpFitOptions fit;
};

/// ‖f − L_{n,p} f‖_{q,w} with L_{n,p} built on the MZ family of (w, n, δ).
double recovery_error(const SphereFunction& f, int n, double p, double q, const ProductWeight& w,
                      const RecoveryOptions& opts = {});

/// E_n(f)_{p,w} estimated as ‖f − L_{n,p} f‖_{p,w} on a family four times
/// denser than the default one.  The estimate is exact only up to MZ
/// constants.
double best_approx_error(const SphereFunction& f, int n, double p, const ProductWeight& w,
                         const RecoveryOptions& opts = {});

inline constexpr int kDefaultBesovLevels = 4;

/// ‖f‖_{p,w} + (Σ_{j ≤ jmax} (E_{2^j}(f)_{p,w} / Θ(2^{−j}))^γ)^{1/γ}; γ = ∞ takes the sup.
double besov_norm(const SphereFunction& f, const SmoothnessIndex& theta, double gamma, double p,
                  const ProductWeight& w, int jmax = kDefaultBesovLevels, const RecoveryOptions& opts = {});

}  // namespace quadlab
