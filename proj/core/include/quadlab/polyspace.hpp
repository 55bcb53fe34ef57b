#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quadlab/geometry.hpp"
#include "quadlab/weights.hpp"

namespace quadlab {

/// dim Π_n(S^d): (n+1)² for d = 2, 2n+1 for d = 1.
std::size_t poly_dim(int d, int n);

/// Orthonormal real basis of Π_n(S^d) with respect to σ, degree-major.
///
/// d = 2: Y_{l,m}, m = −l..l at index l² + l + m; m ≥ 0 uses cos mφ, m < 0
/// uses sin |m|φ (fully normalized so that ∫ Y² dσ = 1).
/// d = 1: [1, √2 cos θ, √2 sin θ, √2 cos 2θ, …].
std::vector<double> basis_eval(int n, const SpherePoint& x);
void basis_eval_into(int n, const SpherePoint& x, std::span<double> out);

/// Degree of basis element k.
int basis_degree(int d, std::size_t k);

/// Sparse polynomial in the ambient coordinates with extended-precision
/// coefficients; used only by the exact moment path.
struct MonomialTerm {
  std::array<int, SpherePoint::kMaxDim + 1> exps{};
  long double coeff = 0;
};
using MonomialExpansion = std::vector<MonomialTerm>;

class SphericalPolynomial {
 public:
  SphericalPolynomial(int d, int n);
  SphericalPolynomial(int d, int n, std::vector<double> coeffs);

  int dim() const noexcept { return d_; }
  int degree() const noexcept { return n_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  /// Mutable coefficients; drops the exact monomial form, if any.
  std::vector<double>& coeffs_mut() noexcept {
    monomial_form_.reset();
    return coeffs_;
  }
  /// The exact monomial form for polynomials built by monomial(), else null.
  const MonomialExpansion* monomial_form() const noexcept { return monomial_form_.get(); }

  double operator()(const SpherePoint& x) const;

  /// Basis element k of Π_n.
  static SphericalPolynomial basis_element(int d, int n, std::size_t k);
  /// The monomial x^α expressed in the basis (α has d + 1 entries); it also
  /// keeps x^α itself so that its moments stay exact.
  static SphericalPolynomial monomial(int d, std::span<const int> alpha);

 private:
  int d_;
  int n_;
  std::vector<double> coeffs_;
  std::shared_ptr<const MonomialExpansion> monomial_form_;
};

double eval(const SphericalPolynomial& p, const SpherePoint& x);

/// Monomial expansions of every basis element of Π_n (cached, thread-safe).
const std::vector<MonomialExpansion>& basis_monomials(int d, int n);

inline constexpr int kDefaultMonomialCap = 24;

/// ∫ x^α w dσ for an axis-aligned weight: zero when some α_i is odd,
/// otherwise the product-Gamma moment with exponents α_i + 2κ_i.
double monomial_moment(std::span<const int> alpha, const ProductWeight& w);

/// b_k = ∫ Y_k w dσ for every basis element of Π_n.  Exact monomial path
/// when w is axis-aligned (n ≤ monomial_cap, else UnsupportedError), the
/// reference oracle at 1e-12 otherwise.  Cached per (w, n).
const std::vector<double>& basis_moments(const ProductWeight& w, int n, int monomial_cap = kDefaultMonomialCap);

/// ∫ P w dσ = Σ_k c_k b_k, or the product-Gamma moments of P's exact
/// monomial form when it has one and w is axis-aligned.
double exact_weighted_integral(const SphericalPolynomial& p, const ProductWeight& w,
                               int monomial_cap = kDefaultMonomialCap);

struct NormOptions {
  double tol = 1e-8;        // relative tolerance of the oracle for p < ∞
  double sup_mesh = 0.01;   // mesh of the evaluation grid for p = ∞
  double abs_floor = 1e-15; // norms below this are resolved only in absolute terms
  double loosest_tol = 1e-4; // tol is relaxed tenfold up to this when rounding noise prevents convergence
};

/// ‖f‖_{p,w} = (∫ |f|^p w dσ)^{1/p}; for p = ∞ the (unweighted) sup over a
/// fine quasi-uniform grid.
double norm_pw(const SphereFunction& f, double p, const ProductWeight& w, const NormOptions& opts = {});

/// Θ(t) = t^r (1 + (ln 1/t)_+)^{−β}.
struct SmoothnessIndex {
  double r = 1.0;
  double beta = 0.0;
  double s = 2.0;
  /// Exponents for the almost-monotonicity spot checks (defaults r/2, (r+s)/2).
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  SmoothnessIndex() = default;
  SmoothnessIndex(double r, double beta, double s);

  double operator()(double t) const;

  struct Check {
    bool almost_increasing = false;
    bool doubling = false;        // Θ(kt) ≤ C k^s Θ(t)
    bool alpha1_increasing = false;
    bool alpha2_decreasing = false;
    double increasing_constant = 0.0;
    double doubling_constant = 0.0;
    bool ok() const { return almost_increasing && doubling && alpha1_increasing && alpha2_decreasing; }
  };
  /// Spot checks on a log-spaced sample of t; almost-monotone constants must be ≤ 2.
  Check check(int samples = 200) const;
};

std::string polynomial_to_json(const SphericalPolynomial& p);
SphericalPolynomial polynomial_from_json(std::string_view text);

}  // namespace quadlab
