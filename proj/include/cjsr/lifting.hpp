#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "cjsr/errors.hpp"
#include "cjsr/matrix.hpp"
#include "cjsr/monomials.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

struct VeroneseLift {
  Index base_dimension = 0;
  int degree = 0;
  Index lifted_dimension = 0;
  Matrix lifted;
};

// Action of A on degree-d monomials in the scaled basis: lift * v_d(x) = v_d(Ax).
// Multiplicative in A; spectral norm of the lift is ||A||^d.
inline VeroneseLift veronese_lift(const Matrix& a, int d) {
  if (!a.is_square()) throw dimension_error("veronese_lift: matrix must be square");
  if (d < 1) throw std::invalid_argument("veronese_lift: degree must be >= 1");
  MonomialBasis basis(static_cast<int>(a.rows()), d);
  Eigen::MatrixXd lift = veronese_lift_matrix(a.raw(), basis);
  return {a.rows(), d, basis.size(), Matrix(std::move(lift))};
}

struct CpOperator {
  int node_count = 0;
  Eigen::Index block_dim = 0;  // N_d
  Matrix op;                   // (|V| N_d^2) x (|V| N_d^2)
};

// The map on |V|-tuples of N_d x N_d matrices
//   (T X)_v = sum over edges (u,v,sigma) of  V_sigma X_u V_sigma^T
// with V_sigma the degree-d lift of A_sigma, materialized over stacked
// column-major vec(X_u). It preserves PSD tuples, and the trace of T^k
// applied to the identity tuple equals the sum over admissible length-k
// paths of the squared Frobenius norm of the lifted path product.
inline CpOperator cp_operator(const ConstrainedSwitchedSystem& sys, int d) {
  if (d < 1) throw std::invalid_argument("cp_operator: d must be >= 1");
  const Automaton& g = sys.automaton();
  const int nv = g.node_count();
  MonomialBasis basis(static_cast<int>(sys.dimension()), d);
  const Eigen::Index nd = basis.size();
  const Eigen::Index rows = static_cast<Eigen::Index>(nv) * nd * nd;
  if (rows > 100'000) throw numerical_error("cp_operator: operator would exceed 1e5 rows");

  std::vector<Eigen::MatrixXd> lifts;
  lifts.reserve(static_cast<std::size_t>(sys.alphabet_size()));
  for (int l = 1; l <= sys.alphabet_size(); ++l)
    lifts.push_back(veronese_lift_matrix(sys.matrix(l).raw(), basis));

  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(rows, rows);
  for (const Edge& e : g.edges()) {
    const Eigen::MatrixXd& v = lifts[static_cast<std::size_t>(e.label - 1)];
    // vec(V X V^T) = (V (x) V) vec(X)
    for (Eigen::Index ci = 0; ci < nd; ++ci)
      for (Eigen::Index cj = 0; cj < nd; ++cj)
        op.block(static_cast<Eigen::Index>(e.to) * nd * nd + ci * nd,
                 static_cast<Eigen::Index>(e.from) * nd * nd + cj * nd, nd, nd) +=
            v(ci, cj) * v;
  }
  return {nv, nd, Matrix(std::move(op))};
}

// Entropy-normalized L^p average growth rate of admissible products for even
// p = 2d, computed as 2^(-h/p) rho(T)^(1/p) with T the degree-d operator
// above. rho(T) equals the growth rate of the path sums of ||A_s||^p, so
// this realizes the limit definition exactly.
inline double p_radius(const ConstrainedSwitchedSystem& sys, int p) {
  if (p < 2 || p % 2 != 0) throw std::invalid_argument("p_radius: p must be even and >= 2");
  const CpOperator t = cp_operator(sys, p / 2);
  const double rho = spectral_radius(t.op);
  const double h = entropy_edge_shift(sys.automaton()).bits;
  return std::exp2(-h / p) * std::pow(rho, 1.0 / p);
}

// lower = rho_p <= growth rate <= 2^(h/p) rho_p = upper.
inline BoundsPair entropy_scaled_bounds(const ConstrainedSwitchedSystem& sys, int p) {
  const double rp = p_radius(sys, p);
  const double h = entropy_edge_shift(sys.automaton()).bits;
  return BoundsPair(rp, std::exp2(h / p) * rp);
}

// Finite-k estimate [ |E_k|^{-1} sum_{s in E_k} ||A_s||^p ]^(1/(pk)); an
// independent enumeration-based route to the same limit, used as an oracle.
inline double p_radius_finite_k(const ConstrainedSwitchedSystem& sys, int p, int k) {
  if (p < 1) throw std::invalid_argument("p_radius_finite_k: p must be >= 1");
  long double sum = 0.0L;
  std::uint64_t count = 0;
  const Eigen::MatrixXd idmat = Eigen::MatrixXd::Identity(sys.dimension(), sys.dimension());
  std::vector<Eigen::MatrixXd> stack{idmat};
  const Automaton& g = sys.automaton();
  std::function<void(int, int)> rec = [&](int node, int depth) {
    if (depth == k) {
      ++count;
      sum += std::pow(static_cast<long double>(spectral_norm(stack.back())), p);
      return;
    }
    for (int e : g.out_edges(node)) {
      stack.push_back(sys.matrix(g.edge(e).label).raw() * stack.back());
      rec(g.edge(e).to, depth + 1);
      stack.pop_back();
    }
  };
  for (int node = 0; node < g.node_count(); ++node) rec(node, 0);
  if (count == 0) throw numerical_error("p_radius_finite_k: no admissible paths");
  return static_cast<double>(std::pow(sum / count, 1.0L / (static_cast<long double>(p) * k)));
}

}  // namespace cjsr
