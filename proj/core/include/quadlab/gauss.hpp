#pragma once

#include <span>
#include <vector>

namespace quadlab {

/// Gauss–Legendre rule on [−1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule (Newton iteration on P_n), cached per n.
const GaussRule& gauss_legendre(int n);

/// Gauss–Jacobi rule for the weight (1 − x)^alpha (1 + x)^beta on [−1, 1]
/// via the Golub–Welsch eigenproblem.
GaussRule gauss_jacobi(int n, double alpha, double beta);

}  // namespace quadlab
