#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <vector>

#include "cjsr/errors.hpp"

namespace cjsr {

inline Eigen::Index veronese_dimension(int n, int d) {
  // C(n+d-1, d), exact in double well beyond desk scale
  double r = 1.0;
  for (int i = 1; i <= d; ++i) r = r * (n - 1 + i) / i;
  return static_cast<Eigen::Index>(std::llround(r));
}

// Degree-d monomials in n variables, graded-lex with x1 highest, each scaled
// by sqrt of its multinomial coefficient. With this scaling
// sum_beta v_beta(x)^2 = ||x||^(2d) and the lift of A has spectral norm
// ||A||^d, identities the rest of the toolkit relies on.
class MonomialBasis {
 public:
  MonomialBasis(int n, int d) : n_(n), d_(d) {
    if (n < 1) throw dimension_error("MonomialBasis: need at least one variable");
    if (d < 0) throw std::invalid_argument("MonomialBasis: negative degree");
    std::vector<int> exp(static_cast<std::size_t>(n), 0);
    enumerate(exp, 0, d);
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      index_[exponents_[i]] = static_cast<Eigen::Index>(i);
      scale_.push_back(std::sqrt(multinomial(exponents_[i])));
    }
  }

  int vars() const { return n_; }
  int degree() const { return d_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(exponents_.size()); }
  const std::vector<int>& exponent(Eigen::Index i) const {
    return exponents_[static_cast<std::size_t>(i)];
  }
  double scale(Eigen::Index i) const { return scale_[static_cast<std::size_t>(i)]; }
  Eigen::Index index_of(const std::vector<int>& exp) const {
    auto it = index_.find(exp);
    if (it == index_.end()) throw dimension_error("MonomialBasis: unknown exponent");
    return it->second;
  }

  // v_d(x) with the square-root multinomial scaling.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const {
    Eigen::VectorXd v(size());
    for (Eigen::Index i = 0; i < size(); ++i) {
      double t = scale(i);
      for (int j = 0; j < n_; ++j) t *= std::pow(x(j), exponents_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      v(i) = t;
    }
    return v;
  }

  static double multinomial(const std::vector<int>& exp) {
    double r = 1.0;
    int used = 0;
    for (int e : exp) {
      for (int i = 1; i <= e; ++i) {
        ++used;
        r = r * used / i;
      }
    }
    return r;
  }

 private:
  void enumerate(std::vector<int>& exp, int pos, int remaining) {
    if (pos == n_ - 1) {
      exp[static_cast<std::size_t>(pos)] = remaining;
      exponents_.push_back(exp);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      exp[static_cast<std::size_t>(pos)] = e;
      enumerate(exp, pos + 1, remaining - e);
    }
  }

  int n_, d_;
  std::vector<std::vector<int>> exponents_;
  std::vector<double> scale_;
  std::map<std::vector<int>, Eigen::Index> index_;
};

// Matrix V with V v_d(x) = v_d(Ax) in the scaled basis.
inline Eigen::MatrixXd veronese_lift_matrix(const Eigen::MatrixXd& a, const MonomialBasis& basis) {
  const int n = basis.vars();
  if (a.rows() != n || a.cols() != n)
    throw dimension_error("veronese_lift_matrix: matrix does not match basis");
  const Eigen::Index nd = basis.size();
  Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(nd, nd);

  // Row beta of the lift: expand prod_i (sum_j a_ij x_j)^(beta_i) and read off
  // plain monomial coefficients, then rescale both sides.
  for (Eigen::Index row = 0; row < nd; ++row) {
    const std::vector<int>& beta = basis.exponent(row);
    std::map<std::vector<int>, double> poly;
    poly[std::vector<int>(static_cast<std::size_t>(n), 0)] = 1.0;
    for (int i = 0; i < n; ++i) {
      for (int rep = 0; rep < beta[static_cast<std::size_t>(i)]; ++rep) {
        std::map<std::vector<int>, double> next;
        for (const auto& [mon, coef] : poly) {
          for (int j = 0; j < n; ++j) {
            if (a(i, j) == 0.0) continue;
            std::vector<int> m2 = mon;
            ++m2[static_cast<std::size_t>(j)];
            next[m2] += coef * a(i, j);
          }
        }
        poly.swap(next);
      }
    }
    for (const auto& [mon, coef] : poly) {
      const Eigen::Index col = basis.index_of(mon);
      lift(row, col) = basis.scale(row) * coef / basis.scale(col);
    }
  }
  return lift;
}

// Linear map taking a symmetric N_d x N_d Gram matrix to the coefficient
// vector (scaled degree-2d basis) of v_d(x)^T Q v_d(x).
inline Eigen::VectorXd gram_to_poly(const Eigen::MatrixXd& q, const MonomialBasis& half,
                                    const MonomialBasis& full) {
  const Eigen::Index nd = half.size();
  if (q.rows() != nd || q.cols() != nd) throw dimension_error("gram_to_poly: shape mismatch");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(full.size());
  const int n = half.vars();
  for (Eigen::Index i = 0; i < nd; ++i) {
    for (Eigen::Index j = 0; j < nd; ++j) {
      std::vector<int> sum(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k)
        sum[static_cast<std::size_t>(k)] =
            half.exponent(i)[static_cast<std::size_t>(k)] + half.exponent(j)[static_cast<std::size_t>(k)];
      const Eigen::Index a = full.index_of(sum);
      c(a) += q(i, j) * half.scale(i) * half.scale(j) / full.scale(a);
    }
  }
  return c;
}

// Adjoint of gram_to_poly: coefficient functional y pulled back to the
// symmetric matrix space, (P^* y)_{ij} = w(i,j) y_{i+j}.
inline Eigen::MatrixXd poly_to_gram_adjoint(const Eigen::VectorXd& y, const MonomialBasis& half,
                                            const MonomialBasis& full) {
  if (y.size() != full.size()) throw dimension_error("poly_to_gram_adjoint: length mismatch");
  const Eigen::Index nd = half.size();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(nd, nd);
  const int n = half.vars();
  for (Eigen::Index i = 0; i < nd; ++i) {
    for (Eigen::Index j = 0; j < nd; ++j) {
      std::vector<int> sum(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k)
        sum[static_cast<std::size_t>(k)] =
            half.exponent(i)[static_cast<std::size_t>(k)] + half.exponent(j)[static_cast<std::size_t>(k)];
      const Eigen::Index a = full.index_of(sum);
      z(i, j) = y(a) * half.scale(i) * half.scale(j) / full.scale(a);
    }
  }
  return z;
}

// Coefficients of (x_1^2 + ... + x_n^2)^d in the scaled degree-2d basis;
// equals gram_to_poly of the identity.
inline Eigen::VectorXd unit_form_coefficients(const MonomialBasis& half,
                                              const MonomialBasis& full) {
  return gram_to_poly(Eigen::MatrixXd::Identity(half.size(), half.size()), half, full);
}

}  // namespace cjsr
