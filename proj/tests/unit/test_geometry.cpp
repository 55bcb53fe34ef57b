#include <doctest.h>

#include <cmath>
#include <numbers>

#include "quadlab/errors.hpp"
#include "quadlab/geometry.hpp"

using namespace quadlab;
using std::numbers::pi;

TEST_SUITE("geometry") {
  TEST_CASE("points are renormalized") {
    const SpherePoint x{3.0, 0.0, 4.0};
    CHECK(x.dim() == 2);
    CHECK(x[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(x[2] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(SpherePoint({0.0, 0.0}), Error);
  }

  TEST_CASE("geodesic distance of basis vectors") {
    const SpherePoint e1{1, 0, 0}, e2{0, 1, 0};
    CHECK(geodesic_distance(e1, e1) == 0.0);
    CHECK(geodesic_distance(e1, e2) == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK(geodesic_distance(e1, -e1) == doctest::Approx(pi).epsilon(1e-15));
    CHECK_THROWS_AS(geodesic_distance(e1, SpherePoint{1, 0}), DimensionError);
  }

  TEST_CASE("triangle inequality on random triples") {
    Rng rng = make_rng(11);
    for (int i = 0; i < 2000; ++i) {
      const SpherePoint a = random_uniform_point(2, rng), b = random_uniform_point(2, rng),
                        c = random_uniform_point(2, rng);
      CHECK(geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12);
    }
  }

  TEST_CASE("cap surface measure") {
    const SpherePoint n{0, 0, 1};
    CHECK(cap_surface_measure(Cap(n, pi)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cap_surface_measure(Cap(n, pi / 2)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cap_surface_measure(Cap(n, pi / 3)) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(cap_surface_measure(Cap(SpherePoint{1, 0}, pi / 4)) == doctest::Approx(0.25).epsilon(1e-14));
    double prev = 0.0;
    for (double r = 0.01; r < pi; r += 0.05) {
      const double m = cap_surface_measure(Cap(n, r));
      CHECK(m >= prev);
      prev = m;
    }
  }

  TEST_CASE("uniform sampling moments") {
    Rng rng = make_rng(5);
    const int M = 200000;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < M; ++i) {
      const SpherePoint x = random_uniform_point(2, rng);
      m1 += x[1];
      m2 += x[2] * x[2];
    }
    CHECK(std::abs(m1 / M) <= 4.0 / std::sqrt(M));
    CHECK(std::abs(m2 / M - 1.0 / 3.0) <= 4.0 / std::sqrt(M));
  }

  TEST_CASE("rotations are orthogonal") {
    Rng rng = make_rng(2);
    const Rotation R = random_rotation(2, rng);
    const SpherePoint x{0.3, -0.2, 0.9}, y{-0.5, 0.1, 0.4};
    CHECK(dot(R.apply(x), R.apply(y)) == doctest::Approx(dot(x, y)).epsilon(1e-14));
    const SpherePoint back = R.apply_transpose(R.apply(x));
    CHECK(geodesic_distance(back, x) < 1e-7);
    const SpherePoint pole{1, 2, 2};
    const SpherePoint image = frame_with_pole(pole).apply(SpherePoint{0, 0, 1});
    CHECK(geodesic_distance(image, pole) < 1e-7);
  }

  TEST_CASE("separated sets") {
    Rng r0 = make_rng(1);
    CHECK_THROWS_AS(build_separated_set(2, pi, r0), PreconditionError);
    Rng r1 = make_rng(3);
    CHECK(build_separated_set(1, 2 * pi / 5, r1).size() == 5);

    Rng r2 = make_rng(9);
    const double eps = 0.2;
    const SeparatedSet s = build_separated_set_with_grid(2, eps, r2);
    CHECK(min_separation(s.points) >= eps);
    CHECK(covering_radius(s.points, s.grid) <= eps);
    const double n = static_cast<double>(s.points.size());
    CHECK(n >= 0.5 / (eps * eps));
    CHECK(n <= 30.0 / (eps * eps));

    Rng r3 = make_rng(9);
    const auto again = build_separated_set(2, eps, r3);
    REQUIRE(again.size() == s.points.size());
    for (std::size_t i = 0; i < again.size(); ++i) CHECK(again[i] == s.points[i]);
  }

  TEST_CASE("band index finds exactly the neighbours") {
    Rng rng = make_rng(4);
    std::vector<SpherePoint> pts;
    for (int i = 0; i < 500; ++i) pts.push_back(random_uniform_point(2, rng));
    const ZBandIndex index(pts);
    for (int t = 0; t < 50; ++t) {
      const SpherePoint x = random_uniform_point(2, rng);
      std::size_t found = 0;
      index.for_each_within(x, 0.3, [&](std::size_t, double) { ++found; });
      std::size_t brute = 0;
      for (const auto& p : pts) brute += geodesic_distance(x, p) <= 0.3;
      CHECK(found == brute);
    }
  }
}
