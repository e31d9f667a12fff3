#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cjsr/sos.hpp"
#include "test_support.hpp"

using namespace cjsr;

namespace {

SosCertificate canonical_example2_certificate(int d, double gamma) {
  // sum of pure powers x_i^{2d}: diagonal Gram with ones at the pure monomials
  MonomialBasis half(3, d), full(3, 2 * d);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(half.size(), half.size());
  for (Eigen::Index i = 0; i < half.size(); ++i) {
    const auto& e = half.exponent(i);
    if (*std::max_element(e.begin(), e.end()) == d) q(i, i) = 1.0;
  }
  SosCertificate cert;
  cert.degree = 2 * d;
  cert.gamma = gamma;
  cert.eps = 0.0;
  cert.node_grams = {q};
  // witness for label sigma: p - p o A_sigma drops one pure power
  const auto sys = testsup::example2();
  MonomialBasis fullb(3, 2 * d);
  for (int l = 1; l <= 3; ++l) {
    const Eigen::MatrixXd lift = veronese_lift_matrix(sys.matrix(l).raw(), fullb);
    const Eigen::VectorXd want = std::pow(gamma, 2.0 * d) * gram_to_poly(q, half, fullb) -
                                 lift.transpose() * gram_to_poly(q, half, fullb);
    cert.edge_grams.push_back(poly_to_gram_adjoint(want, half, fullb));
  }
  return cert;
}

}  // namespace

TEST_CASE("probe feasibility matches hand analysis", "[sos]") {
  const ConstrainedSwitchedSystem half(
      {Matrix::from_rows({{0.5, 0}, {0, 0.5}})}, testsup::full_shift(1));
  CHECK(sos_probe(half, 1, 0.6, 1e-6).status == sdp::SdpStatus::Feasible);
  CHECK(sos_probe(half, 1, 0.4, 1e-6).status == sdp::SdpStatus::Infeasible);
}

TEST_CASE("rank-one example is feasible at one with the canonical witness", "[sos]") {
  const auto sys = testsup::example2();
  for (int d : {1, 2}) {
    const SosProbeResult r = sos_probe(sys, d, 1.0, 1e-6);
    CHECK(r.status == sdp::SdpStatus::Feasible);
    REQUIRE(r.certificate.has_value());
    const CertificateReport rep = check_certificate(sys, *r.certificate);
    CHECK(rep.max_coefficient_residual <= 1e-7);
    CHECK(rep.min_edge_eigenvalue >= -1e-8);
    CHECK(rep.min_node_margin >= -1e-9);

    const CertificateReport canon =
        check_certificate(sys, canonical_example2_certificate(d, 1.0));
    CHECK(canon.max_coefficient_residual <= 1e-14);
    CHECK(canon.min_edge_eigenvalue >= -1e-14);
    CHECK(canon.min_node_margin >= 0.0);
  }
}

TEST_CASE("certificate checker flags tampering", "[sos]") {
  const auto sys = testsup::example2();
  SosCertificate cert = canonical_example2_certificate(1, 1.0);

  SosCertificate bad_eig = cert;
  bad_eig.edge_grams[0](0, 0) -= 1e-3;
  const CertificateReport rep = check_certificate(sys, bad_eig);
  CHECK((rep.min_edge_eigenvalue < -1e-4 || rep.max_coefficient_residual > 1e-4));

  SosCertificate shrunk = cert;
  shrunk.gamma *= 0.9;  // tight at gamma = 1: scaling down must show up
  CHECK(check_certificate(sys, shrunk).max_coefficient_residual > 1e-3);
}

TEST_CASE("bisection on the rank-one example", "[sos]") {
  const auto sys = testsup::example2();
  const SosBound bound = sos_upper_bound(sys, 1, 1e-4);
  CHECK(bound.gamma >= 1.0 - 1e-9);
  CHECK(bound.gamma <= 1.0 + 1e-3);
  const CertificateReport rep = check_certificate(sys, bound.certificate);
  CHECK(rep.max_coefficient_residual <= 1e-7);
  CHECK(rep.min_node_margin >= -1e-9);
}

TEST_CASE("zero-entropy systems certify their exact value", "[sos]") {
  std::mt19937 rng(67);
  const auto sys = testsup::random_system(rng, testsup::cycle_automaton(3), 2);
  Path cyc;
  cyc.edges = {0, 1, 2};
  const double exact = std::pow(spectral_radius(product_along_path(sys, cyc)), 1.0 / 3.0);
  const SosBound bound = sos_upper_bound(sys, 1, 1e-5);
  CHECK(std::abs(bound.gamma - exact) <= 1e-4);
}

TEST_CASE("running example certified values", "[sos]") {
  const auto sys = testsup::running_example();
  const double h = entropy_edge_shift(sys.automaton()).bits;

  // cross-checked against an independent solver stack
  const SosBound d1 = sos_upper_bound(sys, 1, 1e-4);
  CHECK(d1.gamma == Catch::Approx(1.00352).margin(2e-3));
  const SosBound d2 = sos_upper_bound(sys, 2, 1e-4);
  CHECK(d2.gamma == Catch::Approx(0.98630).margin(2e-3));
  CHECK(d2.gamma <= d1.gamma + 1e-4);

  for (int d : {1, 2}) {
    const SosBound& b = d == 1 ? d1 : d2;
    CHECK(b.gamma <= std::exp2(h / (2.0 * d)) * p_radius(sys, 2 * d) + 1e-4);
    CHECK(check_certificate(sys, b.certificate).max_coefficient_residual <= 1e-6);
  }
}

TEST_CASE("guarantee factors", "[sos]") {
  const auto sys = testsup::running_example();
  const double gamma = 1.0;  // factors are what matters here

  const GuaranteeSet g1 = guarantees(sys, 1, gamma);
  CHECK(g1.lb_entropy == Catch::Approx(std::pow(2.6180339887, -0.5)).margin(1e-5));
  CHECK(g1.lb_dimension == Catch::Approx(std::pow(2.0, -0.5)).margin(1e-9));
  CHECK(g1.lb_dimension > g1.lb_entropy);
  CHECK(g1.lb_combined == Catch::Approx(g1.lb_dimension));
  CHECK(g1.lb_kronecker == Catch::Approx(std::pow(9.0, -0.5)).margin(1e-9));

  const GuaranteeSet g2 = guarantees(sys, 2, gamma);
  CHECK(g2.lb_entropy == Catch::Approx(std::pow(2.6180339887, -0.25)).margin(1e-5));
  CHECK(g2.lb_dimension == Catch::Approx(std::pow(3.0, -0.25)).margin(1e-9));
  CHECK(g2.lb_entropy > g2.lb_dimension);

  // zero entropy: the whole value is certified
  const GuaranteeSet gc = guarantees(testsup::cycle3(), 1, 0.77);
  CHECK(gc.lb_entropy == Catch::Approx(0.77));
  CHECK(gc.lb_combined == Catch::Approx(0.77));
}

TEST_CASE("every feasible probe re-verifies", "[sos]") {
  const auto sys = testsup::running_example();
  SosOptions opts;
  int feasible_probes = 0;
  opts.probe_observer = [&](double, const SosProbeResult& r) {
    if (r.status != sdp::SdpStatus::Feasible) return;
    ++feasible_probes;
    const CertificateReport rep = check_certificate(sys, *r.certificate);
    CHECK(rep.max_coefficient_residual <= 1e-6);
    CHECK(rep.min_edge_eigenvalue >= -1e-8);
    CHECK(rep.min_node_margin >= -1e-9);
  };
  sos_upper_bound(sys, 1, 1e-3, opts);
  CHECK(feasible_probes > 0);
}

TEST_CASE("infeasibility certificates refine the entropy bound", "[sos]") {
  const auto sys = testsup::running_example();
  const SosBound bound = sos_upper_bound(sys, 1, 1e-3);
  REQUIRE(bound.infeasibility.has_value());
  const SosInfeasibilityCertificate& cert = *bound.infeasibility;
  CHECK(cert.gamma < bound.gamma);

  const std::vector<int> support = certificate_support(cert);
  REQUIRE_FALSE(support.empty());
  const sdp::CertificateCheck chk = revalidate_support(sys, 1, cert, support, 1e-6);
  CHECK(chk.valid);
  CHECK(chk.farkas_residual <= 1e-6);

  const GuaranteeSet gs = guarantees(sys, 1, cert.gamma, &cert);
  REQUIRE(gs.lb_sparsity.has_value());
  CHECK(*gs.lb_sparsity >= gs.lb_entropy - 1e-12);
  CHECK(*gs.lb_sparsity <= cert.gamma);
}

TEST_CASE("soundness sandwich on the fixtures", "[sos]") {
  for (const ConstrainedSwitchedSystem& sys :
       {testsup::running_example(), testsup::golden_mean(), testsup::cycle3()}) {
    const SosBound bound = sos_upper_bound(sys, 1, 1e-3);
    const double lo = lower_bound_cycles(sys, 6);
    const double hi = upper_bound_bruteforce(sys, 8);
    const GuaranteeSet gs = guarantees(
        sys, 1, bound.infeasibility ? bound.infeasibility->gamma : bound.gamma,
        bound.infeasibility ? &*bound.infeasibility : nullptr);
    CHECK(gs.lb_combined <= hi + 1e-7);
    CHECK(lo <= bound.gamma + 1e-3 * bound.gamma);
    if (gs.lb_sparsity) CHECK(*gs.lb_sparsity >= gs.lb_entropy - 1e-12);
    // certified value never exceeds the entropy-scaled p-radius cap
    const double h = entropy_edge_shift(sys.automaton()).bits;
    CHECK(bound.gamma <= std::exp2(h / 2.0) * p_radius(sys, 2) + 1e-3);
  }
}

TEST_CASE("program construction validates input", "[sos]") {
  const auto sys = testsup::example2();
  CHECK_THROWS_AS(build_program(sys, 0, 1.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(build_program(sys, 1, -1.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(build_program(sys, 1, 1.0, 0.0), std::invalid_argument);

  const sdp::SdpProblem prob = build_program(sys, 1, 1.0, 1e-6);
  CHECK(prob.block_sizes.size() == 4);  // 1 node + 3 edges
  CHECK(prob.constraints.size() == 3 * 6);  // |E| x N_2d with N_2d = C(4,2)
}
