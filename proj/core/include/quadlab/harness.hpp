#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quadlab/config.hpp"
#include "quadlab/domains.hpp"
#include "quadlab/montecarlo.hpp"
#include "quadlab/stats.hpp"
#include "quadlab/weights.hpp"

namespace quadlab {

/// Test functions on S^d, by name (an optional "builtin:" prefix is ignored):
///   exp_x3         exp(x_{d+1})
///   cusp           |x_{d+1}|^{3/2}
///   one            1
///   monomial:a,b,c x_1^a x_2^b x_3^c
///   randpoly:n[:s] polynomial of degree n with N(0,1) coefficients in the
///                  orthonormal basis, drawn from seed s (default 1)
///   poly:<file>    serialized SphericalPolynomial (JSON)
SphereFunction sphere_function(std::string_view spec, int d);

/// Test functions on Ω^d: one, exp_x1, monomial:a,b, and randpoly:n[:s]
/// (N(0,1) coefficients on every monomial of degree ≤ n).
DomainFunction domain_function(std::string_view spec, int d);

enum class Estimator { Composite, Standard };

struct ConvergenceConfig {
  std::string id = "experiment";
  std::string function = "exp_x3";
  ProductWeight weight{2};
  std::optional<DomainWeight> domain;  // run on Ω^d through the transfer
  QuadratureMode mode = QuadratureMode::Randomized;
  Estimator estimator = Estimator::Composite;  // randomized mode only
  double p = 2.0;
  std::vector<int> budgets;  // strictly increasing
  int reps = 1;
  std::uint64_t seed = 0;
  double delta = kDefaultDelta;
  std::uint64_t family_seed = 0x5eed;
  double reference_tol = 1e-12;
};

/// Keys: id, function, weight (inline table or file name), domain (inline
/// table), mode ("det"|"ran"), estimator ("composite"|"standard"), p,
/// budgets = [...] or grid = {start, stop, ratio = 2}, reps, seed, delta,
/// family_seed, reference_tol.  Relative file names resolve against base_dir.
ConvergenceConfig parse_convergence_config(std::string_view text, ConfigFormat format,
                                           const std::filesystem::path& base_dir = {});
ConvergenceConfig load_convergence_config(const std::filesystem::path& path);

/// start, start·ratio, … ≤ stop.
std::vector<int> geometric_budgets(int start, int stop, int ratio = 2);

struct RepResult {
  int n = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double abs_error = 0.0;
  double std_error = 0.0;
  std::uint64_t function_evals = 0;
};

struct BudgetSummary {
  int n = 0;
  int reps = 0;
  double mean_estimate = 0.0;
  double mean_abs_error = 0.0;
  double rms_error = 0.0;
  double mean_std_error = 0.0;
  std::uint64_t max_function_evals = 0;
};

struct ConvergenceReport {
  std::string id;
  double reference = 0.0;
  std::vector<RepResult> rows;  // ordered by (n, rep)
  std::vector<BudgetSummary> summary;
  /// Fits against log n; only with ≥ 4 budgets and nonzero errors.
  std::optional<RateFit> mean_abs_fit;
  std::optional<RateFit> rms_fit;
  std::vector<std::uint64_t> seeds;  // per rep
  double wall_seconds = 0.0;         // not part of the written outputs
};

/// Runs every (n, rep) pair on `threads` workers.  Rep r uses the stream
/// derive_seed(seed, r) at every budget; results do not depend on `threads`.
/// Construction failures are rethrown as ConstructionError naming (n, seed).
ConvergenceReport run_convergence(const ConvergenceConfig& config, int threads = 1);

/// One row per (n, rep), then one summary row per n, then the fit rows.
std::string report_csv(const ConvergenceReport& report);
std::string report_json(const ConvergenceReport& report);

/// %.17g formatting shared by every CSV writer.
std::string format_double(double v);

}  // namespace quadlab
