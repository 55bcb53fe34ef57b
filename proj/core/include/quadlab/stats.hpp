#pragma once

#include <span>

namespace quadlab {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;  // from the residuals; 0 for two points
  double max_residual = 0.0;
};

/// Ordinary least squares fit y ≈ intercept + slope·x (x = log n, y = log err).
/// Requires at least two points with distinct x.
RateFit fit_rate(std::span<const double> x, std::span<const double> y);

}  // namespace quadlab
