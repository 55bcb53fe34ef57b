#include "quadlab/nnls.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "quadlab/errors.hpp"

namespace quadlab {

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const NnlsOptions& opts) {
  const Eigen::Index m = A.rows(), n = A.cols();
  if (b.size() != m) throw DimensionError("nnls: right-hand side size mismatch");
  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(3 * n);
  const double gtol = opts.gradient_tol > 0.0
                          ? opts.gradient_tol
                          : 10.0 * std::numeric_limits<double>::epsilon() * A.colwise().lpNorm<1>().maxCoeff() *
                                static_cast<double>(std::max(m, n));

  std::vector<char> passive(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> P;
  Eigen::VectorXd r = b;

  auto solve_passive = [&]() {
    Eigen::MatrixXd AP(m, static_cast<Eigen::Index>(P.size()));
    for (std::size_t j = 0; j < P.size(); ++j) AP.col(static_cast<Eigen::Index>(j)) = A.col(P[j]);
    return Eigen::VectorXd(AP.colPivHouseholderQr().solve(b));
  };

  while (res.iterations < max_iter) {
    if (opts.stop_residual > 0.0 && r.norm() <= opts.stop_residual) {
      res.converged = true;
      break;
    }
    const Eigen::VectorXd g = A.transpose() * r;
    Eigen::Index t = -1;
    double best = gtol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && g[j] > best) {
        best = g[j];
        t = j;
      }
    }
    if (t < 0) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    passive[static_cast<std::size_t>(t)] = 1;
    P.push_back(t);

    for (;;) {
      Eigen::VectorXd z = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < z.size(); ++j) feasible = feasible && z[j] > 0.0;
      if (feasible) {
        for (std::size_t j = 0; j < P.size(); ++j) res.x[P[j]] = z[static_cast<Eigen::Index>(j)];
        break;
      }
      // Step back towards the feasible region and drop the variables that hit zero.
      double alpha = 1.0;
      for (std::size_t j = 0; j < P.size(); ++j) {
        const double zj = z[static_cast<Eigen::Index>(j)];
        if (zj <= 0.0) {
          const double xj = res.x[P[j]];
          alpha = std::min(alpha, xj / (xj - zj));
        }
      }
      std::vector<Eigen::Index> keep;
      for (std::size_t j = 0; j < P.size(); ++j) {
        const double zj = z[static_cast<Eigen::Index>(j)];
        double& xj = res.x[P[j]];
        const bool blocking = zj <= 0.0 && xj / (xj - zj) <= alpha * (1.0 + 1e-12);
        xj += alpha * (zj - xj);
        if (blocking || xj <= 0.0) {
          xj = 0.0;
          passive[static_cast<std::size_t>(P[j])] = 0;
        } else {
          keep.push_back(P[j]);
        }
      }
      P.swap(keep);
      if (P.empty()) break;
    }
    r = b - A * res.x;
  }
  for (Eigen::Index j = 0; j < n; ++j)
    if (!passive[static_cast<std::size_t>(j)]) res.x[j] = 0.0;
  res.residual = (b - A * res.x).norm();
  return res;
}

}  // namespace quadlab
