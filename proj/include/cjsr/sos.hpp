#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "cjsr/automaton.hpp"
#include "cjsr/errors.hpp"
#include "cjsr/iteration.hpp"
#include "cjsr/lifting.hpp"
#include "cjsr/monomials.hpp"
#include "cjsr/sdp.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

// Per-node degree-2d Lyapunov polynomials as Gram matrices (interior margin
// eps folded in), plus one PSD witness per edge constraint.
struct SosCertificate {
  int degree = 0;  // 2d
  double gamma = 0.0;
  double eps = 0.0;
  std::vector<Eigen::MatrixXd> node_grams;  // Q_v, PSD with margin >= eps
  std::vector<Eigen::MatrixXd> edge_grams;  // S_e, PSD
};

// Farkas witness that the probe at gamma admits no certificate, carried as
// per-edge multiplier slices and the dual blocks they induce.
struct SosInfeasibilityCertificate {
  double gamma = 0.0;
  double eps = 0.0;
  Eigen::VectorXd multipliers;  // one slice of length N_2d per edge, b^T y = 1
  std::vector<Eigen::MatrixXd> node_dual_blocks;
  std::vector<Eigen::MatrixXd> edge_dual_blocks;
  double farkas_residual = 0.0;
};

inline double default_interior_eps(const ConstrainedSwitchedSystem& sys, int d) {
  double top = 1.0;
  for (const Matrix& m : sys.matrices()) top = std::max(top, spectral_norm(m));
  return 1e-6 * std::pow(top, 2.0 * d);
}

// Feasibility program for the probe value gamma: one PSD Gram block per node
// (shifted by eps I to stay in the cone interior) and one PSD witness block
// per edge, coupled by coefficient matching of
//   gamma^(2d) p_u(x) - p_v(A_sigma x) = witness_e(x)
// over the scaled degree-2d monomial basis.
inline sdp::SdpProblem build_program(const ConstrainedSwitchedSystem& sys, int d, double gamma,
                                     double eps) {
  if (d < 1) throw std::invalid_argument("build_program: d must be >= 1");
  if (gamma <= 0) throw std::invalid_argument("build_program: gamma must be positive");
  if (eps <= 0) throw std::invalid_argument("build_program: eps must be positive");
  const Automaton& g = sys.automaton();
  const int n = static_cast<int>(sys.dimension());
  MonomialBasis half(n, d);
  MonomialBasis full(n, 2 * d);
  const Eigen::Index nd = half.size();
  const Eigen::Index n2d = full.size();
  const int nv = g.node_count();
  const int ne = g.edge_count();
  const double gpow = std::pow(gamma, 2.0 * d);

  std::vector<Eigen::MatrixXd> lifts;
  for (int l = 1; l <= sys.alphabet_size(); ++l)
    lifts.push_back(veronese_lift_matrix(sys.matrix(l).raw(), full));
  const Eigen::VectorXd unit = unit_form_coefficients(half, full);

  // Gram functional of each coefficient: <P*(e_alpha), Q>.
  std::vector<Eigen::MatrixXd> mstar;
  mstar.reserve(static_cast<std::size_t>(n2d));
  for (Eigen::Index alpha = 0; alpha < n2d; ++alpha) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n2d);
    e(alpha) = 1.0;
    mstar.push_back(poly_to_gram_adjoint(e, half, full));
  }

  sdp::SdpProblem prob;
  prob.block_sizes.assign(static_cast<std::size_t>(nv + ne), static_cast<int>(nd));

  auto emit = [&](std::vector<sdp::Entry>& entries, int block, const Eigen::MatrixXd& mat,
                  double scale) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = i; j < mat.cols(); ++j) {
        const double coef = scale * mat(i, j) * (i == j ? 1.0 : 2.0);
        if (coef != 0.0)
          entries.push_back({block, static_cast<int>(i), static_cast<int>(j), coef});
      }
    }
  };

  for (int ei = 0; ei < ne; ++ei) {
    const Edge& e = g.edge(ei);
    const Eigen::MatrixXd& lift = lifts[static_cast<std::size_t>(e.label - 1)];
    const Eigen::VectorXd lifted_unit = lift.transpose() * unit;
    for (Eigen::Index alpha = 0; alpha < n2d; ++alpha) {
      sdp::LinearConstraint cn;
      const Eigen::MatrixXd m2 = poly_to_gram_adjoint(lift.col(alpha), half, full);
      emit(cn.entries, e.from, mstar[static_cast<std::size_t>(alpha)], gpow);
      emit(cn.entries, e.to, m2, -1.0);
      emit(cn.entries, nv + ei, mstar[static_cast<std::size_t>(alpha)], -1.0);
      cn.rhs = eps * (lifted_unit(alpha) - gpow * unit(alpha));
      prob.constraints.push_back(std::move(cn));
    }
  }
  return prob;
}

struct SosProbeResult {
  sdp::SdpStatus status = sdp::SdpStatus::Indeterminate;
  std::optional<SosCertificate> certificate;
  std::optional<SosInfeasibilityCertificate> infeasibility;
};

inline SosProbeResult sos_probe(const ConstrainedSwitchedSystem& sys, int d, double gamma,
                                double eps, const sdp::SolveOptions& sopts = {}) {
  const Automaton& g = sys.automaton();
  const int nv = g.node_count();
  const int ne = g.edge_count();
  const sdp::SdpProblem prob = build_program(sys, d, gamma, eps);
  const sdp::SdpOutcome out = sdp::solve(prob, sopts);
  SosProbeResult res;
  res.status = out.status;
  if (out.status == sdp::SdpStatus::Feasible) {
    SosCertificate cert;
    cert.degree = 2 * d;
    cert.gamma = gamma;
    cert.eps = eps;
    const Eigen::Index nd = out.feasible->blocks.front().rows();
    for (int v = 0; v < nv; ++v)
      cert.node_grams.push_back(out.feasible->blocks[static_cast<std::size_t>(v)] +
                                eps * Eigen::MatrixXd::Identity(nd, nd));
    for (int e = 0; e < ne; ++e)
      cert.edge_grams.push_back(out.feasible->blocks[static_cast<std::size_t>(nv + e)]);
    res.certificate = std::move(cert);
  } else if (out.status == sdp::SdpStatus::Infeasible) {
    SosInfeasibilityCertificate cert;
    cert.gamma = gamma;
    cert.eps = eps;
    cert.multipliers = out.certificate->multipliers;
    for (int v = 0; v < nv; ++v)
      cert.node_dual_blocks.push_back(out.certificate->dual_blocks[static_cast<std::size_t>(v)]);
    for (int e = 0; e < ne; ++e)
      cert.edge_dual_blocks.push_back(
          out.certificate->dual_blocks[static_cast<std::size_t>(nv + e)]);
    cert.farkas_residual = out.certificate->farkas_residual;
    res.infeasibility = std::move(cert);
  }
  return res;
}

struct SosOptions {
  double eps_interior = 0.0;  // <= 0: scale-derived default
  sdp::SolveOptions sdp;
  // Called after every bisection probe, e.g. to audit certificates.
  std::function<void(double, const SosProbeResult&)> probe_observer;
};

struct SosBound {
  double gamma = 0.0;  // tightest probe certified feasible
  SosCertificate certificate;
  std::optional<SosInfeasibilityCertificate> infeasibility;  // highest infeasible probe
  int probe_count = 0;
};

// Bisection over probe values. The bracket starts at the cycle lower bound
// and at the smaller of the length-4 brute-force bound and the iteration
// bound; the iteration bound guarantees feasible probes exist just above it,
// which anchors certification even when the bracket degenerates (zero-entropy
// automata, where the optimum sits exactly at the bracket edge).
// Indeterminate probes are treated as not-proven-feasible: the returned value
// stays a certified upper bound, and only clean infeasible probes contribute
// certificates.
inline SosBound sos_upper_bound(const ConstrainedSwitchedSystem& sys, int d,
                                double bisect_tol = 1e-4, const SosOptions& opts = {}) {
  const double eps =
      opts.eps_interior > 0 ? opts.eps_interior : default_interior_eps(sys, d);
  const double iter_bound = iteration_bound(sys, d);
  double lo = lower_bound_cycles(sys, sys.automaton().node_count() + 1);
  double hi = std::min(upper_bound_bruteforce(sys, 4), iter_bound);
  if (hi < lo) {
    if (hi < lo - 1e-9 * std::max(1.0, lo))
      throw numerical_error("sos_upper_bound: bracket inversion (lower oracle above upper)");
    hi = lo;
  }

  SosBound result;
  std::optional<SosCertificate> best_feasible;
  std::optional<SosInfeasibilityCertificate> best_infeasible;
  int probes = 0;

  auto probe = [&](double gamma) {
    ++probes;
    SosProbeResult r = sos_probe(sys, d, gamma, eps, opts.sdp);
    if (opts.probe_observer) opts.probe_observer(gamma, r);
    if (r.status == sdp::SdpStatus::Feasible) best_feasible = std::move(r.certificate);
    if (r.status == sdp::SdpStatus::Infeasible) best_infeasible = std::move(r.infeasibility);
    return r.status;
  };

  // Anchor: a certified-feasible probe at or just above the top of the bracket.
  const double base = std::max({hi, iter_bound, 1e-9});
  if (hi > 0 && probe(hi) == sdp::SdpStatus::Feasible) {
    // top of bracket already certified
  } else {
    bool anchored = false;
    for (double bump : {1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 5e-5, 1e-4, 1e-3, 1e-2}) {
      const double gamma = base * (1.0 + bump);
      if (probe(gamma) == sdp::SdpStatus::Feasible) {
        hi = gamma;
        anchored = true;
        break;
      }
    }
    if (!anchored)
      throw numerical_error("sos_upper_bound: could not certify feasibility above the bracket");
  }

  while (hi - lo > bisect_tol * 0.5 * (hi + lo)) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid) == sdp::SdpStatus::Feasible)
      hi = mid;
    else
      lo = mid;  // infeasible or indeterminate: shrink conservatively
  }

  result.gamma = best_feasible->gamma;
  result.certificate = std::move(*best_feasible);
  result.infeasibility = std::move(best_infeasible);
  result.probe_count = probes;
  return result;
}

struct CertificateReport {
  std::vector<double> node_margins;               // lambda_min(Q_v) - eps
  std::vector<double> edge_min_eigenvalues;       // lambda_min(S_e)
  std::vector<double> edge_coefficient_residuals; // inf-norm of the coefficient match
  double min_node_margin = 0.0;
  double min_edge_eigenvalue = 0.0;
  double max_coefficient_residual = 0.0;
};

// Independent re-verification that a certificate proves its gamma: eigenvalue
// margins plus exact coefficient matching in the scaled monomial basis.
inline CertificateReport check_certificate(const ConstrainedSwitchedSystem& sys,
                                           const SosCertificate& cert) {
  const Automaton& g = sys.automaton();
  const int n = static_cast<int>(sys.dimension());
  const int d = cert.degree / 2;
  if (cert.degree != 2 * d) throw dimension_error("check_certificate: degree must be even");
  MonomialBasis half(n, d);
  MonomialBasis full(n, 2 * d);
  if (static_cast<int>(cert.node_grams.size()) != g.node_count() ||
      static_cast<int>(cert.edge_grams.size()) != g.edge_count())
    throw dimension_error("check_certificate: block count mismatch");
  for (const auto& q : cert.node_grams)
    if (q.rows() != half.size() || q.cols() != half.size())
      throw dimension_error("check_certificate: Gram shape mismatch");

  CertificateReport rep;
  rep.min_node_margin = std::numeric_limits<double>::infinity();
  rep.min_edge_eigenvalue = std::numeric_limits<double>::infinity();

  std::vector<Eigen::VectorXd> node_polys;
  for (const auto& q : cert.node_grams) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    const double margin = es.eigenvalues().minCoeff() - cert.eps;
    rep.node_margins.push_back(margin);
    rep.min_node_margin = std::min(rep.min_node_margin, margin);
    node_polys.push_back(gram_to_poly(q, half, full));
  }

  const double gpow = std::pow(cert.gamma, cert.degree);
  for (int ei = 0; ei < g.edge_count(); ++ei) {
    const Edge& e = g.edge(ei);
    const Eigen::MatrixXd lift = veronese_lift_matrix(sys.matrix(e.label).raw(), full);
    const Eigen::VectorXd want = gpow * node_polys[static_cast<std::size_t>(e.from)] -
                                 lift.transpose() * node_polys[static_cast<std::size_t>(e.to)];
    const Eigen::VectorXd have =
        gram_to_poly(cert.edge_grams[static_cast<std::size_t>(ei)], half, full);
    const double resid = (want - have).lpNorm<Eigen::Infinity>();
    rep.edge_coefficient_residuals.push_back(resid);
    rep.max_coefficient_residual = std::max(rep.max_coefficient_residual, resid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        cert.edge_grams[static_cast<std::size_t>(ei)], Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    rep.edge_min_eigenvalues.push_back(mn);
    rep.min_edge_eigenvalue = std::min(rep.min_edge_eigenvalue, mn);
  }
  return rep;
}

// Edges whose dual block carries weight above the (relative) threshold.
inline std::vector<int> certificate_support(const SosInfeasibilityCertificate& cert,
                                            double eps_sparsity = 1e-6) {
  double top = 0.0;
  for (const auto& z : cert.edge_dual_blocks) top = std::max(top, z.norm());
  std::vector<int> support;
  for (std::size_t e = 0; e < cert.edge_dual_blocks.size(); ++e)
    if (cert.edge_dual_blocks[e].norm() > eps_sparsity * top)
      support.push_back(static_cast<int>(e));
  return support;
}

inline Automaton support_subgraph(const Automaton& g, const std::vector<int>& support) {
  AutomatonData data;
  data.node_count = g.node_count();
  data.alphabet_size = g.alphabet_size();
  for (int e : support) data.edges.push_back(g.edge(e));
  return Automaton::validate(data);
}

// Drops the below-threshold edges and re-verifies the Farkas conditions on
// the reduced program; dual weight on a dropped edge is (near) zero, so the
// certificate must survive within roundoff.
inline sdp::CertificateCheck revalidate_support(const ConstrainedSwitchedSystem& sys, int d,
                                                const SosInfeasibilityCertificate& cert,
                                                const std::vector<int>& support,
                                                double tol = 1e-6) {
  ConstrainedSwitchedSystem sub(sys.matrices(), support_subgraph(sys.automaton(), support));
  const sdp::SdpProblem prob = build_program(sub, d, cert.gamma, cert.eps);
  const Eigen::Index n2d = cert.multipliers.size() / sys.automaton().edge_count();
  Eigen::VectorXd y(static_cast<Eigen::Index>(support.size()) * n2d);
  for (std::size_t i = 0; i < support.size(); ++i)
    y.segment(static_cast<Eigen::Index>(i) * n2d, n2d) =
        cert.multipliers.segment(static_cast<Eigen::Index>(support[i]) * n2d, n2d);
  return sdp::check_infeasibility_certificate(prob, y, tol);
}

struct GuaranteeSet {
  double gamma = 0.0;
  double lb_entropy = 0.0;    // 2^(-h/2d) gamma
  double lb_dimension = 0.0;  // C(n+d-1,d)^(-1/2d) gamma
  double lb_combined = 0.0;   // max of the two
  double lb_kronecker = 0.0;  // |E|^(-1/2d) gamma
  std::optional<double> lb_sparsity;  // 2^(-h(support)/2d) gamma
  std::optional<EntropyResult> support_entropy;
  std::vector<int> support_edges;
};

// All lower bounds derivable from a probe value gamma; the certificate, when
// present, restricts the entropy to the support subgraph.
inline GuaranteeSet guarantees(const ConstrainedSwitchedSystem& sys, int d, double gamma,
                               const SosInfeasibilityCertificate* cert = nullptr,
                               double eps_sparsity = 1e-6) {
  if (gamma <= 0) throw std::invalid_argument("guarantees: gamma must be positive");
  GuaranteeSet gs;
  gs.gamma = gamma;
  const double h = entropy_edge_shift(sys.automaton()).bits;
  const double twod = 2.0 * d;
  gs.lb_entropy = std::exp2(-h / twod) * gamma;
  const double dim = static_cast<double>(
      veronese_dimension(static_cast<int>(sys.dimension()), d));
  gs.lb_dimension = std::pow(dim, -1.0 / twod) * gamma;
  gs.lb_combined = std::max(gs.lb_entropy, gs.lb_dimension);
  gs.lb_kronecker =
      std::pow(static_cast<double>(sys.automaton().edge_count()), -1.0 / twod) * gamma;
  if (cert != nullptr) {
    gs.support_edges = certificate_support(*cert, eps_sparsity);
    const EntropyResult se = entropy_edge_shift(support_subgraph(sys.automaton(), gs.support_edges));
    gs.support_entropy = se;
    gs.lb_sparsity = std::exp2(-se.bits / twod) * gamma;
  }
  return gs;
}

}  // namespace cjsr
