#pragma once

#include <Eigen/Dense>

namespace quadlab {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;  // ‖Ax − b‖₂
  int iterations = 0;
  bool converged = false;
};

struct NnlsOptions {
  int max_iterations = 0;       // outer iterations; 0 → 3·cols
  double stop_residual = 0.0;   // stop as soon as ‖Ax − b‖₂ ≤ this
  double gradient_tol = 0.0;    // 0 → 10·ε·‖A‖₁·max(rows, cols)
};

/// Lawson–Hanson active-set solver for min ‖Ax − b‖₂ subject to x ≥ 0.
/// Entries outside the final passive set are exactly zero.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const NnlsOptions& opts = {});

}  // namespace quadlab
