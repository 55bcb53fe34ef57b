#pragma once

#include <cstdint>
#include <string_view>

#include "quadlab/approx.hpp"
#include "quadlab/geometry.hpp"
#include "quadlab/rng.hpp"
#include "quadlab/weights.hpp"

namespace quadlab {

enum class QuadratureMode { Deterministic, Randomized };

/// "det" / "ran".
const char* mode_name(QuadratureMode mode) noexcept;
QuadratureMode parse_mode(std::string_view text);

struct RandomizedEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t samples_used = 0;
  std::uint64_t function_evals = 0;  // every call to f
  std::uint64_t seed = 0;
};

/// Rejection sampler for the probability density w/Z: uniform proposals
/// accepted with probability w(x) (sup w = 1 for product weights).  For the
/// unit weight no acceptance draw is made, so the stream coincides with
/// random_uniform_point.
class WeightedSampler {
 public:
  explicit WeightedSampler(ProductWeight w);

  SpherePoint operator()(Rng& rng);

  const ProductWeight& weight() const noexcept { return w_; }
  std::uint64_t proposals() const noexcept { return proposals_; }
  std::uint64_t accepted() const noexcept { return accepted_; }

 private:
  ProductWeight w_;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepted_ = 0;
};

SpherePoint sample_weighted(const ProductWeight& w, Rng& rng);

/// Z = total_mass(w), memoized per weight.
double normalization(const ProductWeight& w);

/// (Z/M) Σ f(ξ_i), ξ_i ~ w/Z; std_error = Z·s/√M.
RandomizedEstimate standard_mc(const SphereFunction& f, const ProductWeight& w, std::uint64_t M, Rng& rng);
RandomizedEstimate standard_mc(const SphereFunction& f, const ProductWeight& w, std::uint64_t M, std::uint64_t seed);

struct CompositeOptions {
  double delta = kDefaultDelta;
  std::uint64_t family_seed = 0x5eed;  // families are shared across replications
  LpFitOptions fit;
  int monomial_cap = kDefaultMonomialCap;
};

/// Degree m used by the composite rule at budget n: the largest m whose
/// family (for n − ⌊n/2⌋ evaluations) fits; −1 if none does.
int composite_degree(int n, const ProductWeight& w, const CompositeOptions& opts = {});

/// Q_M(f − L_{m,p} f) + ∫ L_{m,p} f w dσ with M = ⌊n/2⌋ and the largest m whose
/// MZ family has at most n − M nodes.  function_evals = N + M ≤ n.
RandomizedEstimate composite_randomized_quadrature(const SphereFunction& f, int n, double p, const ProductWeight& w,
                                                   std::uint64_t seed, const CompositeOptions& opts = {});

struct DeterministicOptions {
  double delta = kDefaultDelta;
  double tol = 1e-10;
  std::uint64_t seed = 0x5eed;
  int max_degree = kDefaultMonomialCap;
};

/// Degree used by the deterministic rule at budget n: the largest N with
/// dim Π_N ≤ n (capped), −1 if none.
int deterministic_degree(int n, const ProductWeight& w, const DeterministicOptions& opts = {});

/// Positive cubature of degree deterministic_degree(n); its support never
/// exceeds dim Π_N ≤ n nodes.
RandomizedEstimate deterministic_quadrature(const SphereFunction& f, int n, const ProductWeight& w,
                                            const DeterministicOptions& opts = {});

}  // namespace quadlab
