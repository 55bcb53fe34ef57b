#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "quadlab/approx.hpp"
#include "quadlab/domains.hpp"
#include "quadlab/montecarlo.hpp"
#include "quadlab/mz_cubature.hpp"
#include "quadlab/nnls.hpp"
#include "quadlab/oracle.hpp"
#include "quadlab/polyspace.hpp"

namespace {

using namespace quadlab;

const ProductWeight& x3sq() {
  static const ProductWeight w = ProductWeight::axis(2, std::vector<double>{0.0, 0.0, 1.0});
  return w;
}

void BM_BasisEval(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> out(poly_dim(2, n));
  Rng rng = make_rng(1);
  const SpherePoint x = random_uniform_point(2, rng);
  for (auto _ : state) {
    basis_eval_into(n, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
}
BENCHMARK(BM_BasisEval)->Arg(4)->Arg(8)->Arg(16)->Arg(24);

void BM_OracleCap(benchmark::State& state) {
  Rng rng = make_rng(2);
  const Cap cap(random_uniform_point(2, rng), 0.3);
  OracleOptions o;
  o.tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_cap([](const SpherePoint& x) { return std::exp(x[2]); }, x3sq(), cap, o).value);
}
BENCHMARK(BM_OracleCap)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_Nnls(benchmark::State& state) {
  const Eigen::Index m = state.range(0), n = 4 * m;
  Rng rng = make_rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = g(rng);
  const Eigen::VectorXd b = A * Eigen::VectorXd::Constant(n, 1.0 / n).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(nnls(A, b).x.data());
}
BENCHMARK(BM_Nnls)->Arg(25)->Arg(81)->Arg(169)->Unit(benchmark::kMillisecond);

void BM_MZFamily(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Rng rng = make_rng(4);
    benchmark::DoNotOptimize(build_mz_family(x3sq(), n, kDefaultDelta, rng).nodes.size());
  }
}
BENCHMARK(BM_MZFamily)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PositiveCubature(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_positive_cubature(x3sq(), N).size());
}
BENCHMARK(BM_PositiveCubature)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_LeastLpFit(benchmark::State& state) {
  const MZFamily& fam = cached_mz_family(x3sq(), 6, kDefaultDelta, 0x5eed);
  const double p = state.range(0) == 0 ? INFINITY : static_cast<double>(state.range(0));
  const auto f = [](const SpherePoint& x) { return std::pow(std::abs(x[2]), 1.5); };
  for (auto _ : state) benchmark::DoNotOptimize(least_lp_fit(f, fam, p).objective);
}
BENCHMARK(BM_LeastLpFit)->Arg(1)->Arg(2)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_StandardMC(benchmark::State& state) {
  const auto M = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(standard_mc([](const SpherePoint& x) { return std::exp(x[2]); }, x3sq(), M, ++seed).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_StandardMC)->Arg(1000)->Arg(100000);

void BM_CompositeQuadrature(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto f = [](const SpherePoint& x) { return std::exp(x[2]); };
  composite_randomized_quadrature(f, n, 2.0, x3sq(), 0);  // warm the family caches
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(composite_randomized_quadrature(f, n, 2.0, x3sq(), ++seed).value);
}
BENCHMARK(BM_CompositeQuadrature)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_DomainTransfer(benchmark::State& state) {
  const DomainWeight w(Domain::Ball, 2, {0.0, 0.0}, 0.5);
  const auto f = [](const DomainPoint& x) { return std::exp(x[0]) * (1.0 + x[1] * x[1]); };
  for (auto _ : state) benchmark::DoNotOptimize(transfer_integral(f, w, 1e-10).sphere_side);
}
BENCHMARK(BM_DomainTransfer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
