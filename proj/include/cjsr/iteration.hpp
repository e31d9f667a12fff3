#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "cjsr/errors.hpp"
#include "cjsr/matrix.hpp"
#include "cjsr/monomials.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

// Per-node coefficient vectors of homogeneous degree-2d polynomials in the
// scaled monomial basis.
struct PolynomialTuple {
  int degree = 0;  // 2d
  std::vector<Eigen::VectorXd> coeffs;
};

struct IterationConfig {
  // Seed polynomials q_v; when empty, (x_1^2+...+x_n^2)^d is used for every
  // node, which sits in the interior of the SOS cone.
  std::vector<Eigen::VectorXd> seeds;
  double tau = 1.0;
  int max_iterations = 500;
  double tolerance = 1e-12;
};

inline PolynomialTuple zero_polynomial_tuple(const ConstrainedSwitchedSystem& sys, int d) {
  MonomialBasis full(static_cast<int>(sys.dimension()), 2 * d);
  PolynomialTuple t;
  t.degree = 2 * d;
  t.coeffs.assign(static_cast<std::size_t>(sys.automaton().node_count()),
                  Eigen::VectorXd::Zero(full.size()));
  return t;
}

inline std::vector<Eigen::VectorXd> default_seeds(const ConstrainedSwitchedSystem& sys, int d) {
  MonomialBasis half(static_cast<int>(sys.dimension()), d);
  MonomialBasis full(static_cast<int>(sys.dimension()), 2 * d);
  Eigen::VectorXd q = unit_form_coefficients(half, full);
  return std::vector<Eigen::VectorXd>(static_cast<std::size_t>(sys.automaton().node_count()), q);
}

// One step of  p_u <- q_u + (1/tau) sum over edges (u,v,sigma) of p_v o A_sigma,
// carried out exactly in coefficient space: composition by A_sigma acts as the
// transpose of its degree-2d lift. Summing over outgoing edges makes the
// fixed point satisfy  p_v(A_sigma x) <= tau p_u(x)  edge by edge, i.e. a
// certificate for the system itself; the incoming-edge variant certifies the
// time-reversed system instead.
inline PolynomialTuple iteration_step(const PolynomialTuple& state,
                                      const ConstrainedSwitchedSystem& sys,
                                      const IterationConfig& config) {
  const Automaton& g = sys.automaton();
  const int nv = g.node_count();
  if (static_cast<int>(state.coeffs.size()) != nv)
    throw dimension_error("iteration_step: node count mismatch");
  if (config.tau <= 0) throw std::invalid_argument("iteration_step: tau must be positive");
  const std::vector<Eigen::VectorXd>& seeds =
      config.seeds.empty() ? default_seeds(sys, state.degree / 2) : config.seeds;
  if (static_cast<int>(seeds.size()) != nv)
    throw dimension_error("iteration_step: seed count mismatch");

  MonomialBasis full(static_cast<int>(sys.dimension()), state.degree);
  if (state.coeffs.front().size() != full.size())
    throw dimension_error("iteration_step: coefficient length mismatch");
  std::vector<Eigen::MatrixXd> lifts;
  for (int l = 1; l <= sys.alphabet_size(); ++l)
    lifts.push_back(veronese_lift_matrix(sys.matrix(l).raw(), full));

  PolynomialTuple next;
  next.degree = state.degree;
  next.coeffs = seeds;
  for (const Edge& e : g.edges()) {
    next.coeffs[static_cast<std::size_t>(e.from)] +=
        lifts[static_cast<std::size_t>(e.label - 1)].transpose() *
        state.coeffs[static_cast<std::size_t>(e.to)] / config.tau;
  }
  return next;
}

// The linear part of the iteration on stacked coefficient space: block (u,v)
// accumulates the transposed degree-2d lift of A_sigma for each edge (u,v,sigma).
// Unrolled k times it composes with the time-ordered path products, so its
// spectral radius matches the growth rate of the path sums of ||A_s||^(2d).
inline Eigen::MatrixXd iteration_linear_operator(const ConstrainedSwitchedSystem& sys, int d) {
  if (d < 1) throw std::invalid_argument("iteration_linear_operator: d must be >= 1");
  const Automaton& g = sys.automaton();
  MonomialBasis full(static_cast<int>(sys.dimension()), 2 * d);
  const Eigen::Index nd = full.size();
  const Eigen::Index total = static_cast<Eigen::Index>(g.node_count()) * nd;
  if (total > 10'000)
    throw numerical_error("iteration_linear_operator: operator would exceed 1e4 rows");
  std::vector<Eigen::MatrixXd> lifts;
  for (int l = 1; l <= sys.alphabet_size(); ++l)
    lifts.push_back(veronese_lift_matrix(sys.matrix(l).raw(), full));
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(total, total);
  for (const Edge& e : g.edges())
    op.block(static_cast<Eigen::Index>(e.from) * nd, static_cast<Eigen::Index>(e.to) * nd, nd,
             nd) += lifts[static_cast<std::size_t>(e.label - 1)].transpose();
  return op;
}

// rho(L)^(1/2d): the iteration with seeds in the interior of the SOS cone
// converges exactly when tau exceeds rho(L), and any convergent tau certifies
// the upper bound tau^(1/2d). A short dynamic run at tau = (1+tol) rho(L)
// guards the eigenvalue computation against gross error.
inline double iteration_bound(const ConstrainedSwitchedSystem& sys, int d, double tol = 1e-9) {
  const Eigen::MatrixXd op = iteration_linear_operator(sys, d);
  const double rho = spectral_radius(op);
  if (rho == 0.0) return 0.0;

  IterationConfig config;
  config.tau = (1.0 + std::max(tol, 1e-12)) * rho;
  PolynomialTuple state = zero_polynomial_tuple(sys, d);
  const int warmup = 20, run = 60;
  double first = -1.0, last = -1.0;
  for (int k = 0; k < warmup + run; ++k) {
    PolynomialTuple next = iteration_step(state, sys, config);
    double delta = 0.0;
    for (std::size_t v = 0; v < next.coeffs.size(); ++v)
      delta = std::max(delta, (next.coeffs[v] - state.coeffs[v]).norm());
    if (k == warmup) first = delta;
    if (k == warmup + run - 1) last = delta;
    state = std::move(next);
  }
  if (first > 0.0 && last > first * 10.0)
    throw numerical_error("iteration_bound: dynamic run diverges at tau just above rho(L)");
  return std::pow(rho, 1.0 / (2.0 * d));
}

}  // namespace cjsr
