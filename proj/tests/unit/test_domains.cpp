#include <doctest.h>

#include <cmath>
#include <numbers>

#include "quadlab/domains.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/harness.hpp"

using namespace quadlab;
using std::numbers::pi;

TEST_SUITE("domains") {
  TEST_CASE("points and distances") {
    const DomainPoint o(Domain::Ball, {0.0, 0.0});
    CHECK(domain_distance(o, o) == 0.0);
    const DomainPoint e1(Domain::Ball, {1.0, 0.0}), m1(Domain::Ball, {-1.0, 0.0});
    CHECK(domain_distance(e1, m1) == doctest::Approx(pi));
    const DomainPoint a(Domain::Simplex, {1.0, 0.0}), b(Domain::Simplex, {0.0, 1.0});
    CHECK(domain_distance(a, b) == doctest::Approx(pi / 2));
    const DomainPoint p(Domain::Ball, {0.3, -0.2}), q(Domain::Ball, {-0.1, 0.6});
    CHECK(domain_distance(p, q) == doctest::Approx(domain_distance(q, p)));
    CHECK_THROWS_AS(DomainPoint(Domain::Ball, {0.9, 0.9}), PreconditionError);
    CHECK_THROWS_AS(DomainPoint(Domain::Simplex, {-0.1, 0.2}), PreconditionError);
  }

  TEST_CASE("lifts") {
    const SpherePoint n = lift_to_sphere(DomainPoint(Domain::Ball, {0.0, 0.0}));
    CHECK(n[2] == 1.0);
    CHECK(lift_to_sphere(DomainPoint(Domain::Ball, {0.0, 0.0}), 4u)[2] == -1.0);
    const SpherePoint c = lift_to_sphere(DomainPoint(Domain::Simplex, {1.0 / 3, 1.0 / 3}));
    for (int i = 0; i < 3; ++i) CHECK(c[i] == doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-15));

    Rng rng = make_rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
      const double r = std::sqrt(u(rng)), phi = 2 * pi * u(rng);
      const DomainPoint x(Domain::Ball, {r * std::cos(phi), r * std::sin(phi)});
      const DomainPoint y = psi(Domain::Ball, lift_to_sphere(x, static_cast<unsigned>(t) & 4u));
      double a = u(rng), b = u(rng);
      if (a + b > 1) {
        a = 1 - a;
        b = 1 - b;
      }
      const DomainPoint s(Domain::Simplex, {a, b});
      const DomainPoint z = psi(Domain::Simplex, lift_to_sphere(s, static_cast<unsigned>(t) & 7u));
      for (int i = 0; i < 2; ++i) worst = std::max({worst, std::abs(y[i] - x[i]), std::abs(z[i] - s[i])});
    }
    CHECK(worst <= 1e-14);
  }

  TEST_CASE("transferred weights") {
    const ProductWeight lebesgue = transfer_weight(DomainWeight::lebesgue(Domain::Ball, 2));
    const double half[] = {0, 0, 0.5};
    CHECK(lebesgue.key() == ProductWeight::axis(2, half).key());
    CHECK(transfer_weight(DomainWeight(Domain::Ball, 2, {0, 0}, 0.0)).is_unit());
    CHECK(transfer_weight(DomainWeight(Domain::Simplex, 2, {0, 0}, 0.0)).is_unit());
    CHECK_THROWS_AS(DomainWeight(Domain::Ball, 2, {0, 0}, -1.0), PreconditionError);
  }

  TEST_CASE("calibrated transfer identity") {
    const auto one = [](const DomainPoint&) { return 1.0; };
    for (Domain dom : {Domain::Ball, Domain::Simplex})
      for (int d : {1, 2}) {
        const TransferIntegral t = transfer_integral(one, DomainWeight::lebesgue(dom, d));
        CHECK(t.domain_side == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(t.sphere_side == doctest::Approx(1.0).epsilon(1e-12));
      }
    const TransferIntegral x1 =
        transfer_integral([](const DomainPoint& x) { return x[0] * x[0]; }, DomainWeight::lebesgue(Domain::Ball, 2));
    CHECK(x1.domain_side == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(x1.sphere_side == doctest::Approx(0.25).epsilon(1e-12));

    const DomainWeight w(Domain::Simplex, 2, {1.0, 0.5}, 0.0);
    const TransferIntegral r = transfer_integral(domain_function("randpoly:5:3", 2), w, 1e-11);
    CHECK(std::abs(r.domain_side - r.sphere_side) <= 1e-9 * std::max(1.0, std::abs(r.domain_side)));
  }

  TEST_CASE("lifted integrands are even") {
    const DomainWeight bw(Domain::Ball, 2, {0.5, 0}, 1.0);
    const DomainWeight sw(Domain::Simplex, 2, {1.0, 0.5}, 0.0);
    const auto f = domain_function("randpoly:4:2", 2);
    const SphereFunction gb = pull_back(f, Domain::Ball), gs = pull_back(f, Domain::Simplex);
    const ProductWeight Wb = transfer_weight(bw), Ws = transfer_weight(sw);
    Rng rng = make_rng(3);
    for (int t = 0; t < 200; ++t) {
      const SpherePoint x = random_uniform_point(2, rng);
      const SpherePoint xf{x[0], x[1], -x[2]};
      CHECK(gb(x) * Wb(x) == doctest::Approx(gb(xf) * Wb(xf)).epsilon(1e-13));
      for (unsigned s = 1; s < 8; ++s) {
        const SpherePoint y{(s & 1u) ? -x[0] : x[0], (s & 2u) ? -x[1] : x[1], (s & 4u) ? -x[2] : x[2]};
        CHECK(gs(x) * Ws(x) == doctest::Approx(gs(y) * Ws(y)).epsilon(1e-13));
      }
    }
  }

  TEST_CASE("domain quadrature is exact on polynomials") {
    const DomainWeight w(Domain::Ball, 2, {0, 0}, 1.0);
    const auto f = domain_function("randpoly:4:9", 2);
    const double exact = domain_integral(f, w).value;
    const RandomizedEstimate det = domain_quadrature(f, w, 36, QuadratureMode::Deterministic, 2.0, 0);
    CHECK(std::abs(det.value - exact) <= 1e-9);
    CHECK(det.function_evals <= 36);
    const RandomizedEstimate ran = domain_quadrature(f, w, 1024, QuadratureMode::Randomized, 2.0, 5);
    CHECK(std::abs(ran.value - exact) <= 1e-8);
    CHECK(ran.function_evals <= 1024);
    const RandomizedEstimate mass =
        domain_quadrature([](const DomainPoint&) { return 1.0; }, w, 16, QuadratureMode::Deterministic, 2.0, 0);
    CHECK(mass.value == doctest::Approx(domain_integral([](const DomainPoint&) { return 1.0; }, w).value));
    const DomainRule rule = domain_cubature(w, 36);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    CHECK(s == doctest::Approx(det.value).epsilon(1e-12));
  }
}
