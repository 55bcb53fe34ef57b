#include "quadlab/stats.hpp"

#include <algorithm>
#include <cmath>

#include "quadlab/errors.hpp"

namespace quadlab {

RateFit fit_rate(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("fit_rate: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw PreconditionError("fit_rate: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw PreconditionError("fit_rate: x values must not all coincide");
  RateFit r;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - r.intercept - r.slope * x[i];
    ss += e * e;
    r.max_residual = std::max(r.max_residual, std::abs(e));
  }
  if (n > 2) r.stderr_slope = std::sqrt(ss / static_cast<double>(n - 2) / sxx);
  return r;
}

}  // namespace quadlab
