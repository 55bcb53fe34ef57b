#include <doctest.h>

#include <cmath>
#include <numbers>

#include "quadlab/errors.hpp"
#include "quadlab/weights.hpp"

using namespace quadlab;
using std::numbers::pi;

TEST_SUITE("weights") {
  TEST_CASE("evaluation") {
    const ProductWeight unit(2);
    CHECK(unit(SpherePoint{0.3, 0.4, 0.5}) == 1.0);
    const ProductWeight x3sq(2, {SpherePoint{0, 0, 1}}, {1.0});
    CHECK(x3sq(SpherePoint{0, 0, 1}) == 1.0);
    CHECK(x3sq(SpherePoint{1, 0, 0}) == 0.0);
    const ProductWeight abs3(2, {SpherePoint{0, 0, 1}}, {0.5});
    CHECK(abs3(SpherePoint{0, 0.6, 0.8}) == doctest::Approx(0.8).epsilon(1e-15));
    const SpherePoint x{0.2, -0.7, 0.3};
    CHECK(x3sq(x) == x3sq(-x));
    CHECK(x3sq.axis_aligned());
    CHECK_FALSE(ProductWeight(2, {SpherePoint{1, 1, 0}}, {1.0}).axis_aligned());
  }

  TEST_CASE("total mass") {
    CHECK(total_mass(ProductWeight(2)) == doctest::Approx(1.0).epsilon(1e-15));
    const double k1[] = {0, 0, 1};
    CHECK(total_mass(ProductWeight::axis(2, k1)) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    const double kh[] = {0, 0, 0.5};
    CHECK(total_mass(ProductWeight::axis(2, kh)) == doctest::Approx(0.5).epsilon(1e-14));
    // Rotated x₃² goes through the oracle and must agree.
    const ProductWeight tilted(2, {SpherePoint{1, 1, 1}}, {1.0});
    CHECK(total_mass(tilted) == doctest::Approx(1.0 / 3).epsilon(1e-9));
  }

  TEST_CASE("cap mass") {
    const double k1[] = {0, 0, 1};
    const ProductWeight w = ProductWeight::axis(2, k1);
    const Cap north(SpherePoint{0, 0, 1}, pi / 2);
    CHECK(cap_mass(w, north) == doctest::Approx(1.0 / 6).epsilon(1e-10));
    CHECK(cap_mass(w, Cap(SpherePoint{0.3, 0.1, 0.2}, pi)) == doctest::Approx(1.0 / 3).epsilon(1e-10));
    const Cap c(SpherePoint{0.5, 0.2, 0.1}, 0.7);
    CHECK(cap_mass(ProductWeight(2), c) == doctest::Approx(cap_surface_measure(c)).epsilon(1e-14));
    Rng rng = make_rng(1);
    for (int i = 0; i < 20; ++i) {
      const Cap b(random_uniform_point(2, rng), 0.1 + i * 0.1);
      CHECK(cap_mass(w, b) <= 1.0 / 3 + 1e-12);
    }
  }

  TEST_CASE("critical index") {
    CHECK(critical_index(ProductWeight(2)) == 2.0);
    const double a[] = {0, 0, 1};
    CHECK(critical_index(ProductWeight::axis(2, a)) == 4.0);
    const double b[] = {1, 1, 1};
    CHECK(critical_index(ProductWeight::axis(2, b)) == 6.0);
    CHECK_THROWS_AS(critical_index(ProductWeight(2, {SpherePoint{1, 1, 0}}, {1.0})), UnsupportedError);
  }

  TEST_CASE("doubling probe") {
    Rng rng = make_rng(7);
    CHECK(doubling_ratio_probe(ProductWeight(2), 0, 10, rng) == 1.0);
    const double unit_ratio = doubling_ratio_probe(ProductWeight(2), 2, 100, rng);
    CHECK(std::log2(unit_ratio) / 2 <= 2.5);
    const double a[] = {0, 0, 1};
    CHECK(doubling_ratio_probe(ProductWeight::axis(2, a), 3, 200, rng) <= std::pow(2.0, 3 * 4.5));
  }

  TEST_CASE("keys identify weights") {
    const double a[] = {0, 0, 1};
    CHECK(ProductWeight::axis(2, a).key() == ProductWeight(2, {SpherePoint{0, 0, 1}}, {1.0}).key());
    CHECK(ProductWeight(2).key() != ProductWeight(1).key());
  }
}
