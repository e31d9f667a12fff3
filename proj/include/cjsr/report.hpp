#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cjsr/iteration.hpp"
#include "cjsr/lifting.hpp"
#include "cjsr/sos.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

struct BoundsReportRow {
  int d = 0;
  std::optional<double> sos_upper;
  std::optional<double> pradius_lower;   // rho_2d
  std::optional<double> pradius_upper;   // 2^(h/2d) rho_2d
  std::optional<double> lb_entropy;
  std::optional<double> lb_dimension;
  std::optional<double> lb_sparsity;
  std::optional<double> lb_kronecker;
  std::optional<double> iteration_upper;
};

struct BoundsReportOptions {
  int dmax = 3;
  double bisect_tol = 1e-3;
  double eps_interior = 0.0;  // <= 0: scale-derived default
  double eps_sparsity = 1e-6;
};

struct BoundsReport {
  std::vector<BoundsReportRow> rows;
  std::vector<SosCertificate> certificates;
  std::vector<std::string> warnings;
};

// One row per degree. A failing degree leaves its cells empty and adds a
// warning; the remaining degrees are still computed.
inline BoundsReport compute_bounds_report(const ConstrainedSwitchedSystem& sys,
                                          const BoundsReportOptions& opts = {}) {
  if (opts.dmax < 1) throw std::invalid_argument("compute_bounds_report: dmax must be >= 1");
  BoundsReport report;
  for (int d = 1; d <= opts.dmax; ++d) {
    BoundsReportRow row;
    row.d = d;
    try {
      const BoundsPair pr = entropy_scaled_bounds(sys, 2 * d);
      row.pradius_lower = pr.lower;
      row.pradius_upper = pr.upper;
    } catch (const std::exception& ex) {
      report.warnings.push_back("d=" + std::to_string(d) + ": p-radius failed: " + ex.what());
    }
    try {
      row.iteration_upper = iteration_bound(sys, d);
    } catch (const std::exception& ex) {
      report.warnings.push_back("d=" + std::to_string(d) +
                                ": iteration bound failed: " + ex.what());
    }
    try {
      SosOptions sopts;
      sopts.eps_interior = opts.eps_interior;
      const SosBound bound = sos_upper_bound(sys, d, opts.bisect_tol, sopts);
      row.sos_upper = bound.gamma;
      const double gamma_lb =
          bound.infeasibility ? bound.infeasibility->gamma : bound.gamma;
      const GuaranteeSet gs =
          guarantees(sys, d, gamma_lb, bound.infeasibility ? &*bound.infeasibility : nullptr,
                     opts.eps_sparsity);
      row.lb_entropy = gs.lb_entropy;
      row.lb_dimension = gs.lb_dimension;
      row.lb_kronecker = gs.lb_kronecker;
      if (gs.lb_sparsity) row.lb_sparsity = *gs.lb_sparsity;
      report.certificates.push_back(bound.certificate);
    } catch (const std::exception& ex) {
      report.warnings.push_back("d=" + std::to_string(d) +
                                ": certification failed: " + ex.what());
    }
    report.rows.push_back(row);
  }
  return report;
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string bounds_report_csv(const std::vector<BoundsReportRow>& rows) {
  std::ostringstream oss;
  oss << "d,sos_upper,pradius_lower,pradius_upper,lb_entropy,lb_dimension,lb_sparsity,"
         "lb_kronecker,iteration_upper\n";
  auto cell = [&](const std::optional<double>& v) {
    oss << ',';
    if (v) oss << format_real(*v);
  };
  for (const BoundsReportRow& r : rows) {
    oss << r.d;
    cell(r.sos_upper);
    cell(r.pradius_lower);
    cell(r.pradius_upper);
    cell(r.lb_entropy);
    cell(r.lb_dimension);
    cell(r.lb_sparsity);
    cell(r.lb_kronecker);
    cell(r.iteration_upper);
    oss << '\n';
  }
  return oss.str();
}

}  // namespace cjsr
