#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cjsr/matrix.hpp"
#include "test_support.hpp"

using namespace cjsr;

TEST_CASE("spectral radius on closed-form cases", "[matrix]") {
  CHECK(spectral_radius(Matrix::identity(3)) == Catch::Approx(1.0));

  // companion of lambda^2 - lambda - 1: golden ratio
  auto fib = Matrix::from_rows({{0, 1}, {1, 1}});
  CHECK(spectral_radius(fib) == Catch::Approx(1.6180339887).epsilon(1e-9));

  // adjacency of the four-node test automaton; largest root of
  // lambda^3 - 2 lambda^2 - 2 lambda + 1
  auto adj = adjacency_matrix(testsup::dropout_automaton());
  const double rho = spectral_radius(adj);
  CHECK(rho == Catch::Approx(2.6180339887).epsilon(1e-9));
  CHECK(std::abs(rho * rho * rho - 2 * rho * rho - 2 * rho + 1) < 1e-9);
}

TEST_CASE("spectral radius input validation", "[matrix]") {
  CHECK_THROWS_AS(spectral_radius(Matrix::zero(2, 3)), dimension_error);
  const double nan = std::nan("");
  CHECK_THROWS_AS(Matrix::from_rows({{nan, 0}, {0, 1}}), numerical_error);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Matrix::from_rows({{inf}}), numerical_error);
}

TEST_CASE("spectral norm", "[matrix]") {
  CHECK(spectral_norm(Matrix::identity(4)) == Catch::Approx(1.0));
  CHECK(spectral_norm(Matrix::from_rows({{3, 0}, {0, 1}})) == Catch::Approx(3.0));
  auto e1e2t = Matrix::from_rows({{0, 1, 0}, {0, 0, 0}, {0, 0, 0}});
  CHECK(spectral_norm(e1e2t) == Catch::Approx(1.0));
}

TEST_CASE("low rank factorization", "[matrix]") {
  SECTION("zero matrix") {
    auto f = low_rank_factor(Matrix::zero(3, 3), 1e-12);
    CHECK(f.rank == 0);
    CHECK(f.x.cols() == 0);
    CHECK(f.y.cols() == 0);
  }
  SECTION("exact rank one") {
    auto m = Matrix::from_rows({{0, 1, 0}, {0, 0, 0}, {0, 0, 0}});
    auto f = low_rank_factor(m, 1e-12);
    REQUIRE(f.rank == 1);
    CHECK(spectral_norm(m - Matrix(f.x.raw() * f.y.raw().transpose())) < 1e-14);
  }
  SECTION("constructed rank two") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd a(5), b(5), c(5), d(5);
    for (int i = 0; i < 5; ++i) {
      a(i) = u(rng);
      b(i) = u(rng);
      c(i) = u(rng);
      d(i) = u(rng);
    }
    Matrix m(a * b.transpose() + c * d.transpose());
    auto f = low_rank_factor(m, 1e-9);
    REQUIRE(f.rank == 2);
    CHECK(spectral_norm(m - Matrix(f.x.raw() * f.y.raw().transpose())) < 1e-9);
  }
}

TEST_CASE("similarity invariance of the spectral radius", "[matrix]") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m = testsup::random_matrix(rng, 4);
    // well-conditioned change of basis: identity plus a small perturbation
    Matrix p(Eigen::MatrixXd(Eigen::MatrixXd::Identity(4, 4) +
                             0.3 * testsup::random_matrix(rng, 4).raw()));
    Eigen::MatrixXd sim = p.raw().inverse() * m.raw() * p.raw();
    CHECK(spectral_radius(Matrix(sim)) ==
          Catch::Approx(spectral_radius(m)).margin(1e-7));
  }
}

TEST_CASE("submultiplicativity and radius-norm ordering", "[matrix]") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix a = testsup::random_matrix(rng, 3);
    Matrix b = testsup::random_matrix(rng, 3);
    CHECK(spectral_norm(a * b) <= spectral_norm(a) * spectral_norm(b) + 1e-12);
    CHECK(spectral_radius(a) <= spectral_norm(a) + 1e-9);
  }
}

TEST_CASE("low rank reconstruction bound on random input", "[matrix]") {
  std::mt19937 rng(17);
  for (double tol : {1e-12, 1e-3, 0.1}) {
    for (int trial = 0; trial < 10; ++trial) {
      Matrix m = testsup::random_matrix(rng, 6);
      auto f = low_rank_factor(m, tol);
      const double smax = spectral_norm(m);
      if (f.rank == 0) {
        CHECK(smax <= tol * smax + 1e-12);
      } else {
        CHECK(spectral_norm(m - Matrix(f.x.raw() * f.y.raw().transpose())) <=
              tol * smax + 1e-12);
      }
    }
  }
}
