#include "quadlab/montecarlo.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "quadlab/errors.hpp"
#include "quadlab/mz_cubature.hpp"

namespace quadlab {

const char* mode_name(QuadratureMode mode) noexcept {
  return mode == QuadratureMode::Deterministic ? "det" : "ran";
}

QuadratureMode parse_mode(std::string_view text) {
  if (text == "det") return QuadratureMode::Deterministic;
  if (text == "ran") return QuadratureMode::Randomized;
  throw PreconditionError("unknown quadrature mode '" + std::string(text) + "' (expected det or ran)");
}

WeightedSampler::WeightedSampler(ProductWeight w) : w_(std::move(w)) {}

SpherePoint WeightedSampler::operator()(Rng& rng) {
  if (w_.is_unit()) {
    ++proposals_;
    ++accepted_;
    return random_uniform_point(w_.dim(), rng);
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    ++proposals_;
    const SpherePoint x = random_uniform_point(w_.dim(), rng);
    if (u(rng) < w_(x)) {
      ++accepted_;
      return x;
    }
  }
}

SpherePoint sample_weighted(const ProductWeight& w, Rng& rng) {
  WeightedSampler s(w);
  return s(rng);
}

double normalization(const ProductWeight& w) {
  static std::mutex mutex;
  static std::map<std::string, double> cache;
  const std::string key = w.key();
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double z = total_mass(w);
  std::lock_guard lock(mutex);
  cache.emplace(key, z);
  return z;
}

RandomizedEstimate standard_mc(const SphereFunction& f, const ProductWeight& w, std::uint64_t M, Rng& rng) {
  if (M < 1) throw PreconditionError("standard_mc: M must be >= 1");
  const double Z = normalization(w);
  WeightedSampler sampler(w);
  // Welford running mean / variance.
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t i = 0; i < M; ++i) {
    const double v = f(sampler(rng));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  RandomizedEstimate e;
  e.value = Z * mean;
  const double var = M > 1 ? m2 / static_cast<double>(M - 1) : 0.0;
  e.std_error = Z * std::sqrt(var / static_cast<double>(M));
  e.samples_used = M;
  e.function_evals = M;
  return e;
}

RandomizedEstimate standard_mc(const SphereFunction& f, const ProductWeight& w, std::uint64_t M, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  RandomizedEstimate e = standard_mc(f, w, M, rng);
  e.seed = seed;
  return e;
}

namespace {

// Family used for degree m: degree-1 nodes serve the constant fit.
const MZFamily& family_for(int m, const ProductWeight& w, const CompositeOptions& opts) {
  return cached_mz_family(w, std::max(m, 1), opts.delta, opts.family_seed);
}

}  // namespace

int composite_degree(int n, const ProductWeight& w, const CompositeOptions& opts) {
  if (n < 2) return -1;
  const std::size_t budget = static_cast<std::size_t>(n - n / 2);
  if (family_for(0, w, opts).size() > budget) return -1;
  int m = 1;
  // Family sizes grow like m^d; stop at the first one that no longer fits.
  while (m < opts.monomial_cap && family_for(m + 1, w, opts).size() <= budget) ++m;
  return m;
}

RandomizedEstimate composite_randomized_quadrature(const SphereFunction& f, int n, double p, const ProductWeight& w,
                                                   std::uint64_t seed, const CompositeOptions& opts) {
  const int m = composite_degree(n, w, opts);
  if (m < 0)
    throw PreconditionError("composite_randomized_quadrature: budget " + std::to_string(n) +
                            " too small for any MZ family");
  const std::uint64_t M = static_cast<std::uint64_t>(n / 2);
  MZFamily fam = family_for(m, w, opts);
  fam.degree = m;
  const LpFitResult fit = least_lp_fit(f, fam, p, opts.fit);
  const SphericalPolynomial& P = fit.poly;
  const double exact = exact_weighted_integral(P, w, opts.monomial_cap);

  RandomizedEstimate e;
  if (M > 0) {
    e = standard_mc([&](const SpherePoint& x) { return f(x) - P(x); }, w, M, seed);
  }
  e.value += exact;
  e.seed = seed;
  e.samples_used = M;
  e.function_evals = fam.nodes.size() + M;
  return e;
}

int deterministic_degree(int n, const ProductWeight& w, const DeterministicOptions& opts) {
  int N = -1;
  while (N + 1 <= opts.max_degree && poly_dim(w.dim(), N + 1) <= static_cast<std::size_t>(std::max(n, 0))) ++N;
  return N;
}

RandomizedEstimate deterministic_quadrature(const SphereFunction& f, int n, const ProductWeight& w,
                                            const DeterministicOptions& opts) {
  const int N = deterministic_degree(n, w, opts);
  if (N < 0) throw PreconditionError("deterministic_quadrature: budget must be >= 1");
  CubatureOptions co;
  co.delta = opts.delta;
  co.tol = opts.tol;
  co.seed = opts.seed;
  co.monomial_cap = opts.max_degree;
  const CubatureRule& rule = cached_positive_cubature(w, N, co);
  RandomizedEstimate e;
  e.value = apply_cubature(rule, f);
  e.samples_used = rule.size();
  e.function_evals = rule.size();
  e.seed = opts.seed;
  return e;
}

}  // namespace quadlab
