#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <initializer_list>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "cjsr/errors.hpp"

namespace cjsr {

using Index = Eigen::Index;

namespace detail {
inline void require_finite(const Eigen::MatrixXd& m, const char* who) {
  if (!m.allFinite()) {
    throw numerical_error(std::string(who) + ": non-finite entry");
  }
}
}  // namespace detail

// Dense real matrix with finiteness enforced at construction.
// Entries are exposed in row-major logical order regardless of storage.
class Matrix {
 public:
  Matrix() : m_(0, 0) {}

  explicit Matrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    detail::require_finite(m_, "Matrix");
  }

  static Matrix from_rows(Index rows, Index cols, std::span<const double> row_major) {
    if (rows < 0 || cols < 0 ||
        static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != row_major.size()) {
      throw dimension_error("Matrix::from_rows: rows*cols does not match entry count");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = row_major[static_cast<std::size_t>(i * cols + j)];
    return Matrix(std::move(m));
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const Index r = static_cast<Index>(rows.size());
    const Index c = r > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
    Eigen::MatrixXd m(r, c);
    Index i = 0;
    for (const auto& row : rows) {
      if (static_cast<Index>(row.size()) != c)
        throw dimension_error("Matrix::from_rows: ragged rows");
      Index j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return Matrix(std::move(m));
  }

  static Matrix zero(Index rows, Index cols) { return Matrix(Eigen::MatrixXd::Zero(rows, cols)); }
  static Matrix identity(Index n) { return Matrix(Eigen::MatrixXd::Identity(n, n)); }

  Index rows() const { return m_.rows(); }
  Index cols() const { return m_.cols(); }
  bool is_square() const { return m_.rows() == m_.cols(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  const Eigen::MatrixXd& raw() const { return m_; }

  Matrix transpose() const { return Matrix(m_.transpose()); }

  Matrix operator*(const Matrix& rhs) const {
    if (cols() != rhs.rows()) throw dimension_error("Matrix::operator*: inner dimensions differ");
    return Matrix(m_ * rhs.m_);
  }
  Matrix operator+(const Matrix& rhs) const {
    if (rows() != rhs.rows() || cols() != rhs.cols())
      throw dimension_error("Matrix::operator+: shape mismatch");
    return Matrix(m_ + rhs.m_);
  }
  Matrix operator-(const Matrix& rhs) const {
    if (rows() != rhs.rows() || cols() != rhs.cols())
      throw dimension_error("Matrix::operator-: shape mismatch");
    return Matrix(m_ - rhs.m_);
  }
  friend Matrix operator*(double c, const Matrix& m) { return Matrix(c * m.m_); }
  Matrix operator*(double c) const { return Matrix(m_ * c); }

  bool operator==(const Matrix& rhs) const { return m_ == rhs.m_; }

  std::vector<double> row_major() const {
    std::vector<double> out(static_cast<std::size_t>(m_.size()));
    for (Index i = 0; i < rows(); ++i)
      for (Index j = 0; j < cols(); ++j) out[static_cast<std::size_t>(i * cols() + j)] = m_(i, j);
    return out;
  }

 private:
  Eigen::MatrixXd m_;
};

// Largest eigenvalue modulus of a real square matrix.
// Schur form (Hessenberg reduction + Francis QR) so complex conjugate
// pairs of real matrices are handled; non-convergence is surfaced.
inline double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw dimension_error("spectral_radius: matrix must be square");
  const Index n = m.rows();
  if (n == 0) return 0.0;
  if (n == 1) return std::abs(m(0, 0));
  Eigen::RealSchur<Eigen::MatrixXd> schur;
  schur.setMaxIterations(100 * n);
  schur.compute(m, /*computeU=*/false);
  if (schur.info() != Eigen::Success) {
    std::ostringstream oss;
    oss << "spectral_radius: QR iteration did not converge within " << 100 * n
        << " sweeps (n=" << n << ")";
    throw numerical_error(oss.str());
  }
  const Eigen::MatrixXd& t = schur.matrixT();
  double rho = 0.0;
  Index i = 0;
  while (i < n) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      // 2x2 block: complex pair, modulus^2 = det
      const double det = t(i, i) * t(i + 1, i + 1) - t(i, i + 1) * t(i + 1, i);
      rho = std::max(rho, std::sqrt(std::abs(det)));
      i += 2;
    } else {
      rho = std::max(rho, std::abs(t(i, i)));
      i += 1;
    }
  }
  return rho;
}

inline double spectral_radius(const Matrix& m) { return spectral_radius(m.raw()); }

// Largest singular value.
inline double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

inline double spectral_norm(const Matrix& m) { return spectral_norm(m.raw()); }

struct LowRankFactor {
  Matrix x;    // n x r, singular values absorbed
  Matrix y;    // n x r
  Index rank;  // r
};

// Truncated SVD factorization M ~ X Y^T keeping singular values above
// tol * sigma_max (absolute when sigma_max is 0).
inline LowRankFactor low_rank_factor(const Matrix& m, double tol) {
  if (!m.is_square()) throw dimension_error("low_rank_factor: matrix must be square");
  if (tol < 0) throw std::invalid_argument("low_rank_factor: tol must be nonnegative");
  const Index n = m.rows();
  if (n == 0) return {Matrix::zero(0, 0), Matrix::zero(0, 0), 0};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.raw(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cut = smax > 0 ? tol * smax : tol;
  Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  Eigen::MatrixXd x = svd.matrixU().leftCols(r) * sv.head(r).asDiagonal();
  Eigen::MatrixXd y = svd.matrixV().leftCols(r);
  return {Matrix(std::move(x)), Matrix(std::move(y)), r};
}

}  // namespace cjsr
