#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cjsr/errors.hpp"

namespace cjsr::sdp {

// Coefficient of entry (row,col) of a PSD block inside a linear functional.
// Off-diagonal references are read symmetrically: a coefficient c at (r,c)
// contributes c * (X_rc + X_cr) / 2, i.e. c * X_rc for symmetric X.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double coeff = 0.0;
};

struct LinearConstraint {
  std::vector<Entry> entries;
  double rhs = 0.0;
};

// Feasibility / optimization over a product of dense PSD blocks:
//   find (or min <objective, X>)  s.t.  <M_i, X> = rhs_i,  X PSD blockwise.
struct SdpProblem {
  std::vector<int> block_sizes;
  std::vector<LinearConstraint> constraints;
  std::vector<Entry> objective;  // empty: pure feasibility
};

enum class SdpStatus { Feasible, Infeasible, Indeterminate };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Feasible: return "Feasible";
    case SdpStatus::Infeasible: return "Infeasible";
    default: return "Indeterminate";
  }
}

struct FeasiblePoint {
  std::vector<Eigen::MatrixXd> blocks;
  double min_eigenvalue = 0.0;      // over all blocks
  double equality_residual = 0.0;   // ||A(X) - b||_2
  double objective_value = 0.0;
};

// Farkas-type witness: y with  -A^*(y) PSD blockwise and b^T y = 1 after
// normalization; its existence rules out any PSD solution of A(X) = b.
struct InfeasibilityCertificate {
  Eigen::VectorXd multipliers;               // y, scaled so b^T y = 1
  std::vector<Eigen::MatrixXd> dual_blocks;  // Z_b = (-A^*(y))_b
  double farkas_residual = 0.0;              // max over blocks of max(0, -lambda_min(Z_b))
  double b_dot_y = 0.0;                      // after normalization: 1
};

struct SdpOutcome {
  SdpStatus status = SdpStatus::Indeterminate;
  std::optional<FeasiblePoint> feasible;
  std::optional<InfeasibilityCertificate> certificate;
  int iterations = 0;
  double final_primal_residual = 0.0;
  double final_dual_residual = 0.0;
  double final_gap = 0.0;
};

struct SolveOptions {
  double tol_feasibility = 1e-8;
  double tol_gap = 1e-8;
  double tol_certificate = 1e-8;
  int max_iterations = 200;
};

namespace detail {

inline const double kSqrt2 = std::sqrt(2.0);

struct BlockLayout {
  std::vector<int> sizes;
  std::vector<Eigen::Index> offsets;  // svec offsets
  Eigen::Index total = 0;

  explicit BlockLayout(const std::vector<int>& block_sizes) : sizes(block_sizes) {
    for (int s : sizes) {
      if (s <= 0) throw dimension_error("SdpProblem: block sizes must be positive");
      offsets.push_back(total);
      total += static_cast<Eigen::Index>(s) * (s + 1) / 2;
    }
  }

  // Scaled packing of the lower triangle, column by column; preserves the
  // Frobenius inner product.
  void svec(const Eigen::MatrixXd& m, Eigen::Ref<Eigen::VectorXd> out, int b) const {
    const int n = sizes[static_cast<std::size_t>(b)];
    Eigen::Index k = offsets[static_cast<std::size_t>(b)];
    for (int j = 0; j < n; ++j) {
      out(k++) = m(j, j);
      for (int i = j + 1; i < n; ++i) out(k++) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
    }
  }

  Eigen::MatrixXd smat(const Eigen::VectorXd& v, int b) const {
    const int n = sizes[static_cast<std::size_t>(b)];
    Eigen::MatrixXd m(n, n);
    Eigen::Index k = offsets[static_cast<std::size_t>(b)];
    for (int j = 0; j < n; ++j) {
      m(j, j) = v(k++);
      for (int i = j + 1; i < n; ++i) {
        m(i, j) = v(k) / kSqrt2;
        m(j, i) = v(k) / kSqrt2;
        ++k;
      }
    }
    return m;
  }

  Eigen::VectorXd svec_identity() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(total);
    for (std::size_t b = 0; b < sizes.size(); ++b)
      svec(Eigen::MatrixXd::Identity(sizes[b], sizes[b]), v, static_cast<int>(b));
    return v;
  }
};

// Per-block Nesterov-Todd scaling. R and Rit = R^{-T} satisfy
// R^{-1} X R^{-T} = R^T S R = diag(lambda).
struct NtScaling {
  std::vector<Eigen::MatrixXd> r, rit, w;  // w = R R^T
  std::vector<Eigen::VectorXd> lambda;
  bool ok = true;

  NtScaling(const BlockLayout& layout, const Eigen::VectorXd& x, const Eigen::VectorXd& s) {
    const std::size_t nb = layout.sizes.size();
    r.resize(nb);
    rit.resize(nb);
    w.resize(nb);
    lambda.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::MatrixXd xm = layout.smat(x, static_cast<int>(b));
      Eigen::MatrixXd sm = layout.smat(s, static_cast<int>(b));
      Eigen::LLT<Eigen::MatrixXd> lx(xm), ls(sm);
      if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) {
        ok = false;
        return;
      }
      Eigen::MatrixXd lxm = lx.matrixL();
      Eigen::MatrixXd lsm = ls.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(lsm.transpose() * lxm,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::VectorXd sig = svd.singularValues();
      if (sig.minCoeff() <= 0) {
        ok = false;
        return;
      }
      Eigen::VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
      r[b] = lxm * svd.matrixV() * isqrt.asDiagonal();
      rit[b] = lsm * svd.matrixU() * isqrt.asDiagonal();
      w[b] = r[b] * r[b].transpose();
      lambda[b] = sig;
    }
  }
};

}  // namespace detail

inline Eigen::MatrixXd constraint_matrix(const SdpProblem& p, const LinearConstraint& c, int block) {
  const int n = p.block_sizes[static_cast<std::size_t>(block)];
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const Entry& e : c.entries) {
    if (e.block != block) continue;
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
      throw dimension_error("SdpProblem: entry index out of range");
    m(e.row, e.col) += 0.5 * e.coeff;
    m(e.col, e.row) += 0.5 * e.coeff;
  }
  return m;
}

// Line-oriented debug dump: block sizes, then one constraint per line as
// rhs followed by (block,row,col,coeff) quadruples.
inline std::string dump(const SdpProblem& p) {
  std::ostringstream oss;
  oss << "blocks";
  for (int s : p.block_sizes) oss << ' ' << s;
  oss << '\n';
  for (const LinearConstraint& c : p.constraints) {
    oss << "eq " << c.rhs;
    for (const Entry& e : c.entries)
      oss << "  " << e.block << ' ' << e.row << ' ' << e.col << ' ' << e.coeff;
    oss << '\n';
  }
  if (!p.objective.empty()) {
    oss << "obj";
    for (const Entry& e : p.objective)
      oss << "  " << e.block << ' ' << e.row << ' ' << e.col << ' ' << e.coeff;
    oss << '\n';
  }
  return oss.str();
}

struct ResidualReport {
  std::vector<double> block_min_eigenvalues;
  std::vector<double> constraint_residuals;  // <M_i, X> - rhs_i
  double equality_residual_norm = 0.0;
  double min_eigenvalue = 0.0;
};

inline ResidualReport check_feasible_point(const SdpProblem& p,
                                           const std::vector<Eigen::MatrixXd>& blocks) {
  if (blocks.size() != p.block_sizes.size())
    throw dimension_error("check_feasible_point: block count mismatch");
  ResidualReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int n = p.block_sizes[b];
    if (blocks[b].rows() != n || blocks[b].cols() != n)
      throw dimension_error("check_feasible_point: block shape mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (blocks[b] + blocks[b].transpose()), Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    rep.block_min_eigenvalues.push_back(mn);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, mn);
  }
  double sq = 0.0;
  for (const LinearConstraint& c : p.constraints) {
    double v = -c.rhs;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Eigen::MatrixXd m = constraint_matrix(p, c, static_cast<int>(b));
      v += (m.array() * blocks[b].array()).sum();
    }
    rep.constraint_residuals.push_back(v);
    sq += v * v;
  }
  rep.equality_residual_norm = std::sqrt(sq);
  return rep;
}

struct CertificateCheck {
  double b_dot_y = 0.0;
  double farkas_residual = 0.0;  // max over blocks of max(0, -lambda_min(-A^*(y))), y scaled to b^T y = 1
  std::vector<double> dual_block_min_eigenvalues;
  bool valid = false;
};

// Re-verifies a Farkas witness against a (possibly reduced) problem.
inline CertificateCheck check_infeasibility_certificate(const SdpProblem& p,
                                                        const Eigen::VectorXd& y,
                                                        double tol = 1e-8) {
  if (y.size() != static_cast<Eigen::Index>(p.constraints.size()))
    throw dimension_error("check_infeasibility_certificate: multiplier count mismatch");
  CertificateCheck chk;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    chk.b_dot_y += y(i) * p.constraints[static_cast<std::size_t>(i)].rhs;
  if (chk.b_dot_y <= 0) {
    chk.farkas_residual = std::numeric_limits<double>::infinity();
    return chk;
  }
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) {
    const int n = p.block_sizes[b];
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < p.constraints.size(); ++i)
      z -= y(static_cast<Eigen::Index>(i)) *
           constraint_matrix(p, p.constraints[i], static_cast<int>(b));
    z /= chk.b_dot_y;  // normalize to b^T y = 1
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(z, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    chk.dual_block_min_eigenvalues.push_back(mn);
    chk.farkas_residual = std::max(chk.farkas_residual, std::max(0.0, -mn));
  }
  chk.valid = chk.farkas_residual <= tol;
  return chk;
}

// Primal-dual interior-point method on the homogeneous self-dual embedding
// with Nesterov-Todd scaling and a Mehrotra predictor-corrector step, so a
// feasible point and an infeasibility certificate fall out of the same solve.
// Deterministic: fixed starting point, no randomized pivoting.
inline SdpOutcome solve(const SdpProblem& p, const SolveOptions& opts = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const detail::BlockLayout layout(p.block_sizes);
  const std::size_t nb = p.block_sizes.size();
  const Eigen::Index nsv = layout.total;
  const Eigen::Index m = static_cast<Eigen::Index>(p.constraints.size());
  if (m == 0) throw dimension_error("sdp::solve: no constraints");
  Eigen::Index cone_order = 0;
  for (int s : p.block_sizes) cone_order += s;
  if (cone_order > 500) throw numerical_error("sdp::solve: total PSD dimension exceeds 500");

  // Assemble A (m x nsv), b, c in svec coordinates.
  MatrixXd a = MatrixXd::Zero(m, nsv);
  VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const LinearConstraint& cn = p.constraints[static_cast<std::size_t>(i)];
    b(i) = cn.rhs;
    VectorXd row = VectorXd::Zero(nsv);
    for (std::size_t bl = 0; bl < nb; ++bl)
      layout.svec(constraint_matrix(p, cn, static_cast<int>(bl)), row, static_cast<int>(bl));
    a.row(i) = row;
  }
  VectorXd c = VectorXd::Zero(nsv);
  if (!p.objective.empty()) {
    LinearConstraint oc{p.objective, 0.0};
    for (std::size_t bl = 0; bl < nb; ++bl)
      layout.svec(constraint_matrix(p, oc, static_cast<int>(bl)), c, static_cast<int>(bl));
  }
  const bool pure_feasibility = p.objective.empty();
  const double bnorm = b.norm(), cnorm = c.norm();

  // Start at the identity point of the embedding.
  VectorXd x = layout.svec_identity();
  VectorXd s = x;
  VectorXd y = VectorXd::Zero(m);
  double tau = 1.0, kappa = 1.0;
  const double nu = static_cast<double>(cone_order) + 1.0;

  SdpOutcome out;

  auto make_feasible = [&](const VectorXd& xs, double t) {
    FeasiblePoint fp;
    double mineig = std::numeric_limits<double>::infinity();
    for (std::size_t bl = 0; bl < nb; ++bl) {
      MatrixXd xb = layout.smat(xs, static_cast<int>(bl)) / t;
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(xb, Eigen::EigenvaluesOnly);
      mineig = std::min(mineig, es.eigenvalues().minCoeff());
      fp.blocks.push_back(std::move(xb));
    }
    fp.min_eigenvalue = mineig;
    fp.equality_residual = (a * (xs / t) - b).norm();
    fp.objective_value = c.dot(xs) / t;
    out.status = SdpStatus::Feasible;
    out.feasible = std::move(fp);
  };

  auto try_certificate = [&]() -> bool {
    const double by = b.dot(y);
    if (by <= 0) return false;
    InfeasibilityCertificate cert;
    cert.multipliers = y / by;
    cert.b_dot_y = 1.0;
    double res = 0.0;
    VectorXd z = -(a.transpose() * cert.multipliers);
    for (std::size_t bl = 0; bl < nb; ++bl) {
      MatrixXd zb = layout.smat(z, static_cast<int>(bl));
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(zb, Eigen::EigenvaluesOnly);
      res = std::max(res, std::max(0.0, -es.eigenvalues().minCoeff()));
      cert.dual_blocks.push_back(std::move(zb));
    }
    if (res > opts.tol_certificate) return false;
    cert.farkas_residual = res;
    out.status = SdpStatus::Infeasible;
    out.certificate = std::move(cert);
    return true;
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    out.iterations = iter;
    const VectorXd rp = a * x - b * tau;
    const VectorXd rd = -(a.transpose() * y) + c * tau - s;
    const double rg = b.dot(y) - c.dot(x) - kappa;
    const double mu = (x.dot(s) + tau * kappa) / nu;

    // Termination on the de-homogenized iterate.
    const double prim = (a * (x / tau) - b).norm() / (1.0 + bnorm);
    const double dual = (a.transpose() * (y / tau) + s / tau - c).norm() / (1.0 + cnorm);
    const double pobj = c.dot(x) / tau, dobj = b.dot(y) / tau;
    const double gap = x.dot(s) / (tau * tau);
    const double relgap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
    out.final_primal_residual = prim;
    out.final_dual_residual = dual;
    out.final_gap = relgap;

    if (prim <= opts.tol_feasibility &&
        (pure_feasibility || (dual <= opts.tol_feasibility && relgap <= opts.tol_gap))) {
      make_feasible(x, tau);
      return out;
    }
    if (try_certificate()) return out;

    // NT scaling at the current interior point.
    detail::NtScaling nt(layout, x, s);
    if (!nt.ok) {
      out.status = SdpStatus::Indeterminate;
      return out;
    }

    auto apply_winv = [&](const VectorXd& u) {  // G^{-1} u = svec(W mat(u) W)
      VectorXd outv = VectorXd::Zero(nsv);
      for (std::size_t bl = 0; bl < nb; ++bl) {
        MatrixXd um = layout.smat(u, static_cast<int>(bl));
        layout.svec(nt.w[bl] * um * nt.w[bl], outv, static_cast<int>(bl));
      }
      return outv;
    };

    // Normal matrix M = A G^{-1} A^T and its factorization.
    MatrixXd gat(nsv, m);
    for (Eigen::Index i = 0; i < m; ++i) gat.col(i) = apply_winv(a.row(i).transpose());
    MatrixXd nm = a * gat;
    Eigen::LDLT<MatrixXd> msolve(nm);
    if (msolve.info() != Eigen::Success) {
      nm.diagonal().array() += 1e-13 * (1.0 + nm.diagonal().maxCoeff());
      msolve.compute(nm);
      if (msolve.info() != Eigen::Success) {
        out.status = SdpStatus::Indeterminate;
        return out;
      }
    }

    const VectorXd gic = apply_winv(c);

    struct Direction {
      VectorXd dx, dy, ds;
      double dtau = 0.0, dkappa = 0.0;
    };

    auto solve_direction = [&](double eta, const std::vector<MatrixXd>& wc,
                               double wc_scalar) -> std::optional<Direction> {
      // d_c = svec(R^{-T} Linv(Wc) R^{-1}) with Linv(W)_ij = 2 W_ij/(lam_i+lam_j)
      VectorXd dc = VectorXd::Zero(nsv);
      for (std::size_t bl = 0; bl < nb; ++bl) {
        const Eigen::VectorXd& lam = nt.lambda[bl];
        MatrixXd linv = wc[bl];
        for (Eigen::Index i = 0; i < linv.rows(); ++i)
          for (Eigen::Index j = 0; j < linv.cols(); ++j) linv(i, j) *= 2.0 / (lam(i) + lam(j));
        layout.svec(nt.rit[bl] * linv * nt.rit[bl].transpose(), dc, static_cast<int>(bl));
      }
      const VectorXd v = dc - eta * rd;
      const VectorXd r1 = -eta * rp - a * apply_winv(v);
      const VectorXd r2 = a * gic + b;
      const VectorXd dy1 = msolve.solve(r1);
      const VectorXd dy2 = msolve.solve(r2);
      const VectorXd dx1 = apply_winv(a.transpose() * dy1 + v);
      const VectorXd dx2 = apply_winv(a.transpose() * dy2 - c);
      const double den = b.dot(dy2) - c.dot(dx2) + kappa / tau;
      if (std::abs(den) < 1e-300) return std::nullopt;
      const double num = -eta * rg - b.dot(dy1) + c.dot(dx1) + wc_scalar / tau;
      Direction d;
      d.dtau = num / den;
      d.dy = dy1 + d.dtau * dy2;
      d.dx = dx1 + d.dtau * dx2;
      d.ds = -(a.transpose() * d.dy) + c * d.dtau + eta * rd;
      d.dkappa = (wc_scalar - kappa * d.dtau) / tau;
      return d;
    };

    // Largest step keeping (x,s,tau,kappa) in the cone, via scaled blocks.
    auto step_to_boundary = [&](const Direction& d) {
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t bl = 0; bl < nb; ++bl) {
        const Eigen::VectorXd lam_isqrt = nt.lambda[bl].cwiseSqrt().cwiseInverse();
        MatrixXd dxb = nt.rit[bl].transpose() * layout.smat(d.dx, static_cast<int>(bl)) * nt.rit[bl];
        MatrixXd dsb = nt.r[bl].transpose() * layout.smat(d.ds, static_cast<int>(bl)) * nt.r[bl];
        for (const MatrixXd& g : {dxb, dsb}) {
          MatrixXd scaled = lam_isqrt.asDiagonal() * g * lam_isqrt.asDiagonal();
          Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (scaled + scaled.transpose()),
                                                     Eigen::EigenvaluesOnly);
          const double mn = es.eigenvalues().minCoeff();
          if (mn < 0) alpha = std::min(alpha, -1.0 / mn);
        }
      }
      if (d.dtau < 0) alpha = std::min(alpha, -tau / d.dtau);
      if (d.dkappa < 0) alpha = std::min(alpha, -kappa / d.dkappa);
      return alpha;
    };

    // Predictor (affine) direction.
    std::vector<MatrixXd> wc_aff;
    for (std::size_t bl = 0; bl < nb; ++bl) {
      MatrixXd lm = nt.lambda[bl].asDiagonal();
      wc_aff.push_back(-(lm * lm));
    }
    auto aff = solve_direction(1.0, wc_aff, -tau * kappa);
    if (!aff) {
      out.status = SdpStatus::Indeterminate;
      return out;
    }
    const double alpha_aff = std::min(1.0, step_to_boundary(*aff));
    const double mu_aff = ((x + alpha_aff * aff->dx).dot(s + alpha_aff * aff->ds) +
                           (tau + alpha_aff * aff->dtau) * (kappa + alpha_aff * aff->dkappa)) /
                          nu;
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(0.99, std::max(1e-8, sigma));

    // Corrector with the Mehrotra second-order term in scaled space.
    std::vector<MatrixXd> wc;
    for (std::size_t bl = 0; bl < nb; ++bl) {
      MatrixXd dxb =
          nt.rit[bl].transpose() * layout.smat(aff->dx, static_cast<int>(bl)) * nt.rit[bl];
      MatrixXd dsb = nt.r[bl].transpose() * layout.smat(aff->ds, static_cast<int>(bl)) * nt.r[bl];
      MatrixXd lm = nt.lambda[bl].asDiagonal();
      MatrixXd corr = 0.5 * (dxb * dsb + dsb * dxb);
      wc.push_back(sigma * mu * MatrixXd::Identity(lm.rows(), lm.cols()) - lm * lm - corr);
    }
    const double wc_scalar = sigma * mu - tau * kappa - aff->dtau * aff->dkappa;
    auto dir = solve_direction(1.0 - sigma, wc, wc_scalar);
    if (!dir) {
      out.status = SdpStatus::Indeterminate;
      return out;
    }
    double alpha = std::min(1.0, 0.99 * step_to_boundary(*dir));
    if (!(alpha > 1e-10)) {
      out.status = SdpStatus::Indeterminate;
      return out;
    }

    x += alpha * dir->dx;
    y += alpha * dir->dy;
    s += alpha * dir->ds;
    tau += alpha * dir->dtau;
    kappa += alpha * dir->dkappa;
    if (!(tau > 1e-300) || !x.allFinite() || !s.allFinite() || !y.allFinite()) {
      out.status = SdpStatus::Indeterminate;
      return out;
    }
  }

  out.status = SdpStatus::Indeterminate;
  return out;
}

}  // namespace cjsr::sdp
