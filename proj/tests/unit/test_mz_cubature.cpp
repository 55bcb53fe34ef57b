#include <doctest.h>

#include <cmath>
#include <numbers>

#include "quadlab/errors.hpp"
#include "quadlab/mz_cubature.hpp"
#include "quadlab/oracle.hpp"
#include "quadlab/polyspace.hpp"

using namespace quadlab;

namespace {
ProductWeight x3sq() {
  const double k[] = {0, 0, 1};
  return ProductWeight::axis(2, k);
}
}  // namespace

TEST_SUITE("mz_cubature") {
  TEST_CASE("circle family") {
    Rng rng = make_rng(1);
    const MZFamily f = build_mz_family(ProductWeight(1), 4, 0.9, rng);
    CHECK(f.size() >= 9);
    REQUIRE(f.tau.size() == f.size());
    for (double t : f.tau) CHECK(t > 0.0);
    // Each τ_k is the normalized arc length of c(x_k, δ/n).
    CHECK(f.tau[0] == doctest::Approx(2 * f.delta / 4 / (2 * std::numbers::pi)).epsilon(1e-8));
  }

  TEST_CASE("family invariants and determinism") {
    Rng r1 = make_rng(2), r2 = make_rng(2);
    const MZFamily a = build_mz_family(x3sq(), 6, 0.5, r1);
    const MZFamily b = build_mz_family(x3sq(), 6, 0.5, r2);
    CHECK(a.size() >= poly_dim(2, 6));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.nodes[i] == b.nodes[i]);
      CHECK(a.tau[i] == b.tau[i]);
      CHECK(a.tau[i] > 0.0);
    }
  }

  TEST_CASE("tau sum for the unit weight") {
    Rng rng = make_rng(3);
    const MZFamily f = build_mz_family(ProductWeight(2), 8, 0.5, rng);
    double s = 0.0;
    for (double t : f.tau) s += t;
    // Caps of radius δ/n around a δ/n-separated set overlap: Σ τ lies near 1.8.
    CHECK(s > 1.0);
    CHECK(s < 2.5);
    Rng vr = make_rng(4);
    // Constants: both sides are closed form and the ratio is Σ τ.
    const auto [A, B] = verify_mz(f, ProductWeight(2), 2.0, 1, vr);
    CHECK(A > 0.0);
    CHECK(B / A < 1.5);
  }

  TEST_CASE("MZ constants scale with tau") {
    Rng rng = make_rng(5);
    MZFamily f = build_mz_family(x3sq(), 8, 0.5, rng);
    Rng v1 = make_rng(6);
    const auto [A, B] = verify_mz(f, x3sq(), 2.0, 200, v1);
    CHECK(A > 0.0);
    CHECK(B / A <= 10.0);
    for (double& t : f.tau) t *= 3.0;
    Rng v2 = make_rng(6);
    const auto [A3, B3] = verify_mz(f, x3sq(), 2.0, 200, v2);
    CHECK(A3 == doctest::Approx(3 * A).epsilon(1e-12));
    CHECK(B3 == doctest::Approx(3 * B).epsilon(1e-12));
  }

  TEST_CASE("positive cubature") {
    const CubatureRule r0 = build_positive_cubature(x3sq(), 0);
    double s = 0.0;
    for (double l : r0.lambda) s += l;
    CHECK(s == doctest::Approx(1.0 / 3).epsilon(1e-10));

    const CubatureRule r8 = build_positive_cubature(x3sq(), 8);
    for (double l : r8.lambda) CHECK(l >= 0.0);
    CHECK(r8.residual <= 1e-10);
    CHECK(cubature_moment_error(r8) <= 1e-8);
    CHECK(r8.size() <= poly_dim(2, 8));
    CHECK(apply_cubature(r8, [](const SpherePoint&) { return 0.0; }) == 0.0);
    CHECK(apply_cubature(r8, [](const SpherePoint& x) { return x[0] * x[0] * x[2] * x[2]; }) ==
          doctest::Approx(monomial_moment(std::array<int, 3>{2, 0, 2}, x3sq())).epsilon(1e-9));
  }

  TEST_CASE("circle cubature integrates trigonometric polynomials") {
    const CubatureRule r = build_positive_cubature(ProductWeight(1), 8);
    for (int k = 1; k <= 8; ++k) {
      CHECK(std::abs(apply_cubature(r, [k](const SpherePoint& x) { return std::cos(k * std::atan2(x[1], x[0])); })) <=
            1e-10);
      CHECK(std::abs(apply_cubature(r, [k](const SpherePoint& x) { return std::sin(k * std::atan2(x[1], x[0])); })) <=
            1e-10);
    }
  }

  TEST_CASE("Lemma 3.2 type bound for the cubature measure") {
    const ProductWeight w = x3sq();
    const int N = 4;
    const CubatureRule r = build_positive_cubature(w, N);
    Rng rng = make_rng(12);
    std::normal_distribution<double> g;
    std::vector<double> C;
    for (int M : {2 * N, 4 * N}) {
      const ProductGrid grid = sphere_product_grid(w, std::max(2, (M + 7) / 4), 16);
      double worst = 0.0;
      for (int t = 0; t < 20; ++t) {
        std::vector<double> c(poly_dim(2, M));
        for (double& v : c) v = g(rng);
        const SphericalPolynomial P(2, M, c);
        double disc = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) disc += r.lambda[i] * P(r.nodes[i]) * P(r.nodes[i]);
        double cont = 0.0;
        for (std::size_t i = 0; i < grid.nodes.size(); ++i) cont += grid.weights[i] * std::pow(P(grid.nodes[i]), 2);
        worst = std::max(worst, disc / (std::pow(double(M) / N, critical_index(w)) * cont));
      }
      C.push_back(worst);
    }
    CHECK(C[1] <= 2.0 * C[0] + 1e-12);
  }

  TEST_CASE("serialization") {
    const CubatureRule r = build_positive_cubature(x3sq(), 3);
    const CubatureRule back = cubature_from_json(cubature_to_json(r));
    REQUIRE(back.size() == r.size());
    CHECK(back.degree == 3);
    CHECK(back.lambda[0] == r.lambda[0]);
    CHECK(back.nodes[1] == r.nodes[1]);
    CHECK(back.weight.key() == r.weight.key());
  }
}
