#include <doctest.h>

#include "quadlab/nnls.hpp"
#include "quadlab/rng.hpp"

using namespace quadlab;

TEST_SUITE("nnls") {
  TEST_CASE("unconstrained solution already nonnegative") {
    Eigen::MatrixXd A(3, 2);
    A << 1, 0, 0, 1, 1, 1;
    const Eigen::VectorXd x0 = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
    const NnlsResult r = nnls(A, A * x0);
    CHECK(r.converged);
    CHECK((r.x - x0).norm() <= 1e-12);
    CHECK(r.residual <= 1e-12);
  }

  TEST_CASE("active constraint") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    const Eigen::VectorXd b = (Eigen::VectorXd(2) << -1.0, 3.0).finished();
    const NnlsResult r = nnls(A, b);
    CHECK(r.x(0) == 0.0);
    CHECK(r.x(1) == doctest::Approx(3.0));
  }

  TEST_CASE("KKT conditions on random problems") {
    Rng rng = make_rng(17);
    std::normal_distribution<double> g;
    for (int t = 0; t < 20; ++t) {
      Eigen::MatrixXd A(30, 12);
      Eigen::VectorXd b(30);
      for (int i = 0; i < A.size(); ++i) A.data()[i] = g(rng);
      for (int i = 0; i < b.size(); ++i) b(i) = g(rng);
      const NnlsResult r = nnls(A, b);
      REQUIRE(r.converged);
      const Eigen::VectorXd grad = A.transpose() * (b - A * r.x);
      for (int j = 0; j < 12; ++j) {
        CHECK(r.x(j) >= 0.0);
        if (r.x(j) > 0)
          CHECK(std::abs(grad(j)) <= 1e-9);
        else
          CHECK(grad(j) <= 1e-9);
      }
    }
  }
}
