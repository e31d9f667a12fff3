#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cjsr/iteration.hpp"
#include "cjsr/lifting.hpp"
#include "cjsr/sdp.hpp"
#include "test_support.hpp"

using namespace cjsr;

namespace {

double tuple_delta(const PolynomialTuple& a, const PolynomialTuple& b) {
  double d = 0.0;
  for (std::size_t v = 0; v < a.coeffs.size(); ++v)
    d = std::max(d, (a.coeffs[v] - b.coeffs[v]).norm());
  return d;
}

}  // namespace

TEST_CASE("first step lands on the seeds", "[iteration]") {
  const auto sys = testsup::running_example();
  IterationConfig cfg;
  cfg.tau = 2.0;
  const PolynomialTuple zero = zero_polynomial_tuple(sys, 1);
  const PolynomialTuple one = iteration_step(zero, sys, cfg);
  const auto seeds = default_seeds(sys, 1);
  for (std::size_t v = 0; v < seeds.size(); ++v)
    CHECK((one.coeffs[v] - seeds[v]).norm() == 0.0);
}

TEST_CASE("scalar self-loop has the geometric fixed point", "[iteration]") {
  const double a = 0.8;
  const ConstrainedSwitchedSystem sys({Matrix::from_rows({{a}})}, testsup::full_shift(1));
  for (int d : {1, 2}) {
    const double a2d = std::pow(a, 2.0 * d);
    const double tau = 1.5 * a2d;
    IterationConfig cfg;
    cfg.tau = tau;
    PolynomialTuple state = zero_polynomial_tuple(sys, d);
    for (int k = 0; k < 400; ++k) state = iteration_step(state, sys, cfg);
    // p = x^{2d} sum_j (a^{2d}/tau)^j -> 1/(1 - a^{2d}/tau)
    CHECK(state.coeffs[0](0) == Catch::Approx(1.0 / (1.0 - a2d / tau)).epsilon(1e-9));
  }
}

TEST_CASE("large tau fixed point approaches the seeds", "[iteration]") {
  const auto sys = testsup::golden_mean();
  IterationConfig cfg;
  cfg.tau = 1e12;
  PolynomialTuple state = zero_polynomial_tuple(sys, 1);
  for (int k = 0; k < 50; ++k) state = iteration_step(state, sys, cfg);
  const auto seeds = default_seeds(sys, 1);
  for (std::size_t v = 0; v < seeds.size(); ++v)
    CHECK((state.coeffs[v] - seeds[v]).norm() < 1e-9);
}

TEST_CASE("iteration bound closed forms", "[iteration]") {
  const double c = 0.37;
  const ConstrainedSwitchedSystem diag(
      {Matrix::from_rows({{c, 0}, {0, c}})}, testsup::full_shift(1));
  CHECK(iteration_bound(diag, 1) == Catch::Approx(c).epsilon(1e-10));

  // cycles: the value is the cycle root of the product's spectral radius
  std::mt19937 rng(61);
  for (int trial = 0; trial < 3; ++trial) {
    const auto sys = testsup::random_system(rng, testsup::cycle_automaton(3), 2);
    Path cyc;
    cyc.edges = {0, 1, 2};
    const double want = std::pow(spectral_radius(product_along_path(sys, cyc)), 1.0 / 3.0);
    CHECK(iteration_bound(sys, 1) == Catch::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("iteration bound equals the entropy-scaled p-radius", "[iteration]") {
  for (const ConstrainedSwitchedSystem& sys :
       {testsup::running_example(), testsup::golden_mean(), testsup::example2(),
        testsup::cycle3()}) {
    const double h = entropy_edge_shift(sys.automaton()).bits;
    for (int d : {1, 2}) {
      const double ib = iteration_bound(sys, d);
      const double want = std::exp2(h / (2.0 * d)) * p_radius(sys, 2 * d);
      CHECK(std::abs(ib - want) <= 1e-6 * ib);
    }
  }
}

TEST_CASE("convergence threshold at the linear part's spectral radius", "[iteration]") {
  const auto sys = testsup::golden_mean();
  const double rho = spectral_radius(iteration_linear_operator(sys, 1));

  IterationConfig conv;
  conv.tau = 1.5 * rho;
  PolynomialTuple state = zero_polynomial_tuple(sys, 1);
  PolynomialTuple prev = state;
  double delta = 0.0;
  for (int k = 0; k < 200; ++k) {
    PolynomialTuple next = iteration_step(state, sys, conv);
    delta = tuple_delta(next, state);
    state = std::move(next);
  }
  CHECK(delta < 1e-12);

  IterationConfig div;
  div.tau = 0.9 * rho;
  state = zero_polynomial_tuple(sys, 1);
  double first_delta = -1.0, last_delta = 0.0;
  for (int k = 0; k < 80; ++k) {
    PolynomialTuple next = iteration_step(state, sys, div);
    last_delta = tuple_delta(next, state);
    if (k == 10) first_delta = last_delta;
    state = std::move(next);
  }
  CHECK(last_delta > 10.0 * first_delta);
}

TEST_CASE("iterates stay inside the SOS cone", "[iteration]") {
  const auto sys = testsup::running_example();
  const double rho = spectral_radius(iteration_linear_operator(sys, 1));
  IterationConfig cfg;
  cfg.tau = 1.5 * rho;
  MonomialBasis half(2, 1), full(2, 2);

  // SOS membership of each iterate's node polynomial, checked by a small
  // Gram-matrix feasibility problem.
  auto is_sos = [&](const Eigen::VectorXd& coeffs) {
    sdp::SdpProblem prob;
    prob.block_sizes = {static_cast<int>(half.size())};
    for (Eigen::Index alpha = 0; alpha < full.size(); ++alpha) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(full.size());
      e(alpha) = 1.0;
      const Eigen::MatrixXd mstar = poly_to_gram_adjoint(e, half, full);
      sdp::LinearConstraint cn;
      for (Eigen::Index i = 0; i < mstar.rows(); ++i)
        for (Eigen::Index j = i; j < mstar.cols(); ++j)
          if (mstar(i, j) != 0.0)
            cn.entries.push_back({0, static_cast<int>(i), static_cast<int>(j),
                                  mstar(i, j) * (i == j ? 1.0 : 2.0)});
      cn.rhs = coeffs(alpha);
      prob.constraints.push_back(std::move(cn));
    }
    return sdp::solve(prob).status == sdp::SdpStatus::Feasible;
  };

  PolynomialTuple state = zero_polynomial_tuple(sys, 1);
  for (int k = 0; k < 6; ++k) {
    state = iteration_step(state, sys, cfg);
    if (k % 2 == 1)
      for (const Eigen::VectorXd& c : state.coeffs) CHECK(is_sos(c));
  }
}
