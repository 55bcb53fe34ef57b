#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quadlab/geometry.hpp"
#include "quadlab/polyspace.hpp"
#include "quadlab/rng.hpp"
#include "quadlab/weights.hpp"

namespace quadlab {

/// Nodes of a maximal δ/n-separated set with τ_k = w(c(x_k, δ/n)).
struct MZFamily {
  int d = 2;
  int degree = 0;
  double delta = 0.5;  // value actually used (after any halving)
  std::vector<SpherePoint> nodes;
  std::vector<double> tau;  // empty when built without discretization weights
  double empirical_A = std::numeric_limits<double>::quiet_NaN();
  double empirical_B = std::numeric_limits<double>::quiet_NaN();

  std::size_t size() const noexcept { return nodes.size(); }
};

struct MZOptions {
  int max_halvings = 3;       // δ is halved when the set is too small for Π_n
  bool compute_tau = true;
  double cap_tol = 1e-8;      // relative tolerance of each τ_k
};

inline constexpr double kDefaultDelta = 0.5;

/// Throws ConstructionError when |nodes| < dim Π_n after all halvings.
MZFamily build_mz_family(const ProductWeight& w, int n, double delta, Rng& rng, const MZOptions& opts = {});

/// Shared family for (w, n, δ, seed); built once, thread-safe.
const MZFamily& cached_mz_family(const ProductWeight& w, int n, double delta, std::uint64_t seed);

/// min / max over random P ∈ Π_n (Gaussian coefficients) of ‖P‖_(p)^p / ‖P‖_{p,w}^p
/// (for p = ∞: max_k |P(x_k)| / sup |P|).  Continuous norms use a tensor
/// Gauss rule fine enough for degree-2n integrands.
std::pair<double, double> verify_mz(const MZFamily& family, const ProductWeight& w, double p, int trials, Rng& rng);

struct CubatureRule {
  int d = 2;
  int degree = 0;
  std::vector<SpherePoint> nodes;
  std::vector<double> lambda;
  double residual = 0.0;  // max_k |Σ λ_i Y_k(ξ_i) − ∫ Y_k w dσ|
  double delta = kDefaultDelta;
  ProductWeight weight{2};

  std::size_t size() const noexcept { return nodes.size(); }
};

struct CubatureOptions {
  double delta = kDefaultDelta;
  double tol = 1e-10;
  int densify_steps = 3;  // candidate set doubled up to this many times
  std::uint64_t seed = 0x5eed;
  int monomial_cap = kDefaultMonomialCap;
};

/// Nonnegative weights on MZ candidate nodes of degree max(2N, N+2), exact
/// on Π_N within tol; zero-weight nodes are dropped.  Throws
/// ConstructionError (detail = residual) if tol is never reached.
CubatureRule build_positive_cubature(const ProductWeight& w, int N, const CubatureOptions& opts = {});

/// Shared rule for (w, N, options); built once, thread-safe.
const CubatureRule& cached_positive_cubature(const ProductWeight& w, int N, const CubatureOptions& opts = {});

double apply_cubature(const CubatureRule& rule, const SphereFunction& f);

/// Largest degree error of the rule against the exact moments of Π_N.
double cubature_moment_error(const CubatureRule& rule, int monomial_cap = kDefaultMonomialCap);

std::string cubature_to_json(const CubatureRule& rule);
CubatureRule cubature_from_json(std::string_view text);
std::string mz_family_to_json(const MZFamily& family, const ProductWeight& w);

}  // namespace quadlab
