#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "quadlab/geometry.hpp"
#include "quadlab/montecarlo.hpp"
#include "quadlab/oracle.hpp"
#include "quadlab/weights.hpp"

namespace quadlab {

enum class Domain { Ball, Simplex };

const char* domain_name(Domain domain) noexcept;
Domain parse_domain(std::string_view text);

/// Point of B^d (‖x‖ ≤ 1) or T^d (x_i ≥ 0, Σ x_i ≤ 1); d ∈ {1, 2}.
class DomainPoint {
 public:
  DomainPoint(Domain domain, std::span<const double> coords);
  DomainPoint(Domain domain, std::initializer_list<double> coords);

  Domain domain() const noexcept { return domain_; }
  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

 private:
  Domain domain_;
  std::vector<double> coords_;
};

using DomainFunction = std::function<double(const DomainPoint&)>;

/// Ball:    (1 − ‖x‖²)^{μ−1/2} ∏ |x_j|^{2κ_j}
/// Simplex: (1 − |x|)^{μ−1/2} ∏ x_j^{κ_j−1/2}
struct DomainWeight {
  Domain domain = Domain::Ball;
  int dim = 2;
  std::vector<double> kappa;  // d entries, κ_j ≥ 0
  double mu = 0.5;            // μ ≥ 0

  DomainWeight() = default;
  DomainWeight(Domain domain, int d, std::vector<double> kappa, double mu);

  /// The weight equal to 1: μ = 1/2 and κ = 0 (ball), κ_j = 1/2 (simplex).
  static DomainWeight lebesgue(Domain domain, int d);

  double operator()(const DomainPoint& x) const;
};

/// d_B(x, y) = arccos(⟨x, y⟩ + √(1−‖x‖²)√(1−‖y‖²)),
/// d_T(x, y) = arccos(Σ √(x_j y_j) + √(1−|x|)√(1−|y|)).
double domain_distance(const DomainPoint& x, const DomainPoint& y);

/// Inverse branches of ψ.  Bit i of `signs` makes coordinate i of the lift
/// negative; the ball lift only uses bit d (the hemisphere of x_{d+1}).
SpherePoint lift_to_sphere(const DomainPoint& x, unsigned signs = 0);

/// ψ(x̄) = (x_1, …, x_d) on the ball, (x_1², …, x_d²) on the simplex.
DomainPoint psi(Domain domain, const SpherePoint& xbar);

/// T_Ω w up to its constant factor: |x_{d+1}|^{2μ} ∏_j |x_j|^{2κ_j} on S^d.
ProductWeight transfer_weight(const DomainWeight& w);

/// (1/|Ω|) ∫_Ω f w dx by nested adaptive Gauss–Legendre in coordinates that
/// absorb the boundary singularities.  Throws ConvergenceError when the
/// estimate exceeds tol·∫|f| w.
IntegralEstimate domain_integral(const DomainFunction& f, const DomainWeight& w, double tol = 1e-12);

/// C with (1/|Ω|)∫_Ω f w dx = C ∫_{S^d} (f∘ψ)·transfer_weight(w) dσ, fixed once
/// per (domain, d) from f = w = 1 with both sides evaluated by the oracles.
double calibration(Domain domain, int d);

struct TransferIntegral {
  double domain_side = 0.0;
  double sphere_side = 0.0;
};

TransferIntegral transfer_integral(const DomainFunction& f, const DomainWeight& w, double tol = 1e-12);

/// f∘ψ.
SphereFunction pull_back(const DomainFunction& f, Domain domain);

struct DomainQuadratureOptions {
  CompositeOptions composite;
  DeterministicOptions deterministic;
};

/// Sphere-side quadrature of f∘ψ against transfer_weight(w), rescaled by the
/// calibration constant.  Budget accounting is the sphere-side one.
RandomizedEstimate domain_quadrature(const DomainFunction& f, const DomainWeight& w, int n, QuadratureMode mode,
                                     double p, std::uint64_t seed, const DomainQuadratureOptions& opts = {});

struct DomainRule {
  std::vector<DomainPoint> nodes;  // ψ(x_i)
  std::vector<double> weights;     // C·λ_i
};

/// The deterministic rule of domain_quadrature at budget n, mapped through ψ.
/// Sphere nodes with equal image are kept separately.
DomainRule domain_cubature(const DomainWeight& w, int n, const DeterministicOptions& opts = {});

}  // namespace quadlab
