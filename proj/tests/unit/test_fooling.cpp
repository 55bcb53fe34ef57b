#include <doctest.h>

#include <cmath>

#include "quadlab/errors.hpp"
#include "quadlab/fooling.hpp"
#include "quadlab/mz_cubature.hpp"
#include "quadlab/oracle.hpp"

using namespace quadlab;

namespace {
ProductWeight x3sq() {
  const double k[] = {0, 0, 1};
  return ProductWeight::axis(2, k);
}
}  // namespace

TEST_SUITE("fooling") {
  TEST_CASE("bump profile") {
    CHECK(smooth_bump(0.0) == 1.0);
    CHECK(smooth_bump(0.5) == 1.0);
    CHECK(smooth_bump(1.0) == 0.0);
    const double a = std::exp(-1.0 / 0.25);
    CHECK(smooth_bump(0.75) == doctest::Approx(a / (a + a)).epsilon(1e-14));
    double prev = 1.0;
    for (double t = 0.5; t <= 1.0; t += 0.01) {
      CHECK(smooth_bump(t) <= prev);
      prev = smooth_bump(t);
    }
  }

  TEST_CASE("strip-avoiding centers") {
    const ProductWeight w = x3sq();
    const double eps = default_strip_halfwidth(w);
    CHECK(eps == doctest::Approx(0.05));
    Rng rng = make_rng(1);
    const auto c = strip_complement_centers(w, 20, 16, rng);
    REQUIRE(c.size() == 16);
    CHECK(min_separation(c) > 2.0 / 20);
    for (const auto& x : c) CHECK(std::abs(x[2]) > std::sin(2 * eps));

    Rng r2 = make_rng(1);
    CHECK(strip_complement_centers(ProductWeight(2), 20, 16, r2).size() == 16);

    Rng r3 = make_rng(1);
    CHECK_THROWS_AS(strip_complement_centers(w, 20, 100000, r3), ConstructionError);
    Rng r4 = make_rng(1);
    CHECK_THROWS_AS(strip_complement_centers(w, 10, 4, r4), PreconditionError);
  }

  TEST_CASE("disjoint supports and values") {
    const ProductWeight w = x3sq();
    Rng rng = make_rng(2);
    const auto centers = strip_complement_centers(w, 24, 32, rng);
    std::vector<double> alpha;
    for (std::size_t j = 0; j < centers.size(); ++j) alpha.push_back(j % 2 ? 1.0 : -1.0);
    const FoolingFunction f(centers, 24, alpha);
    for (std::size_t j = 0; j < centers.size(); ++j) CHECK(f(centers[j]) == alpha[j]);
    Rng pts = make_rng(3);
    const double floor = std::pow(std::sin(default_strip_halfwidth(w)), 2 * w.kappa_sum());
    for (int t = 0; t < 5000; ++t) {
      const SpherePoint x = random_uniform_point(2, pts);
      int inside = 0;
      for (std::size_t j = 0; j < centers.size(); ++j) {
        if (geodesic_distance(x, centers[j]) < 1.0 / 24) {
          ++inside;
          CHECK(w(x) >= floor);
          for (std::size_t k = 0; k < centers.size(); ++k)
            if (k != j) CHECK(f.bump(k, x) == 0.0);
        }
      }
      CHECK(inside <= 1);
      if (inside == 0) CHECK(f(x) == 0.0);
    }
  }

  TEST_CASE("integral is additive over bumps") {
    const ProductWeight w = x3sq();
    Rng rng = make_rng(4);
    const auto centers = strip_complement_centers(w, 32, 8, rng);
    const FoolingFunction f(centers, 32);
    OracleOptions o;
    o.tol = 1e-12;
    o.coordinate_breaks = false;
    double parts = 0.0, total = 0.0;
    for (const auto& c : centers) {
      parts += bump_norm(w, c, 32, 1.0, 1e-12);
      total += integrate_cap(f, w, Cap(c, f.support_radius()), o).value;
    }
    CHECK(std::abs(total - parts) <= 1e-10 * parts);
  }

  TEST_CASE("norm scaling slopes") {
    const ProductWeight w = x3sq();
    const int Ns[] = {8, 16, 32};
    Rng r1 = make_rng(6), r2 = make_rng(6), r3 = make_rng(6);
    CHECK(verify_norm_scaling(w, 1.0, Ns, r1, 32).slope == doctest::Approx(-1.0).epsilon(0.1));
    CHECK(verify_norm_scaling(w, 2.0, Ns, r2, 32).slope == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(std::abs(verify_norm_scaling(w, INFINITY, Ns, r3, 32).slope) <= 0.05);
  }

  TEST_CASE("a cubature rule missing every support integrates f to zero") {
    const ProductWeight w = x3sq();
    const CubatureRule rule = build_positive_cubature(w, 6);
    Rng rng = make_rng(8);
    const auto centers = strip_complement_centers(w, 32, 8, rng, 0.0, rule.nodes);
    const FoolingFunction f(centers, 32);
    CHECK(apply_cubature(rule, f) == 0.0);
    double integral = 0.0;
    for (const auto& c : centers) integral += bump_norm(w, c, 32, 1.0);
    CHECK(integral > 0.0);
  }
}
