// Command-line front end: system ingestion, entropy and bound queries,
// per-degree bound reports, low-rank reduction and the one-matrix-per-edge
// lift, all over the JSON system schema.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "cjsr/cjsr.hpp"

namespace {

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string fmt(double v) { return cjsr::format_real(v); }

int cmd_entropy(const std::string& file) {
  const cjsr::SystemFile sf = cjsr::read_system_file(file);
  const cjsr::ConstrainedSwitchedSystem sys = cjsr::to_system(sf);
  const cjsr::Automaton& g = sys.automaton();
  const cjsr::EntropyResult h = cjsr::entropy_edge_shift(g);
  std::cout << "name: " << sf.name << "\n";
  std::cout << "nodes: " << g.node_count() << "  edges: " << g.edge_count()
            << "  alphabet: " << g.alphabet_size() << "\n";
  std::cout << "2^h = " << fmt(h.adjacency_spectral_radius) << ", h = " << fmt(h.bits)
            << " bits\n";
  if (h.acyclic) std::cout << "acyclic: yes (entropy clamped to 0)\n";
  std::cout << "right-resolving: " << (cjsr::is_right_resolving(g) ? "yes" : "no") << "\n";
  std::cout << "strongly-connected: " << (g.strongly_connected() ? "yes" : "no") << "\n";
  return 0;
}

int cmd_bounds(const std::string& file, int k, int cycles, std::uint64_t budget) {
  const cjsr::ConstrainedSwitchedSystem sys = cjsr::to_system(cjsr::read_system_file(file));
  const cjsr::BruteForceResult up = cjsr::upper_bound_bruteforce_detail(sys, k, budget);
  const double lo = cjsr::lower_bound_cycles(sys, cycles);
  std::cout << "upper bound (k=" << k << ", " << up.path_count
            << " paths): " << fmt(up.bound) << "\n";
  std::cout << "cycle lower bound (max length " << cycles << "): " << fmt(lo) << "\n";
  return 0;
}

int cmd_report(const std::string& file, const cjsr::BoundsReportOptions& opts,
               std::string certs_path) {
  const cjsr::SystemFile sf = cjsr::read_system_file(file);
  const cjsr::ConstrainedSwitchedSystem sys = cjsr::to_system(sf);
  const cjsr::BoundsReport report = cjsr::compute_bounds_report(sys, opts);
  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << cjsr::bounds_report_csv(report.rows);

  if (certs_path.empty()) certs_path = stem_of(file) + ".certificates.json";
  nlohmann::ordered_json certs = nlohmann::ordered_json::array();
  for (const cjsr::SosCertificate& c : report.certificates) {
    const cjsr::CertificateReport chk = cjsr::check_certificate(sys, c);
    certs.push_back(cjsr::certificate_to_json(c, &chk));
  }
  std::ofstream out(certs_path);
  if (!out) throw cjsr::parse_error(certs_path + ": cannot open for writing");
  out << certs.dump(1) << '\n';
  std::cerr << "certificates written to " << certs_path << "\n";
  return 0;
}

int cmd_reduce(const std::string& file, double tol, std::string out_path) {
  const cjsr::SystemFile sf = cjsr::read_system_file(file);
  const cjsr::ConstrainedSwitchedSystem sys = cjsr::to_system(sf);
  const cjsr::LowRankReduction red = cjsr::low_rank_reduce(sys, tol);
  const cjsr::Automaton& gr = red.reduced.automaton();
  std::cout << "rank r = " << red.rank << "\n";
  std::cout << "reduced nodes |V'| = " << gr.node_count() << "\n";
  std::cout << "reduced edges |E'| = " << gr.edge_count() << "\n";
  if (red.rank >= sys.dimension())
    std::cout << "note: rank equals the dimension; reduction is not size-reducing\n";
  for (std::size_t l = 0; l < red.pair_labels.size(); ++l)
    std::cout << "label " << (l + 1) << " = pair " << red.pair_labels[l].first
              << red.pair_labels[l].second << "\n";

  // Reduced node names come from the original edges.
  std::vector<std::string> names;
  for (const cjsr::Edge& e : sys.automaton().edges())
    names.push_back(sf.node_names[static_cast<std::size_t>(e.from)] + "->" +
                    sf.node_names[static_cast<std::size_t>(e.to)] + ":" +
                    std::to_string(e.label));
  if (out_path.empty()) out_path = stem_of(file) + ".reduced.json";
  cjsr::write_system_file(out_path,
                          cjsr::from_system(sf.name + "_reduced", red.reduced, names));
  std::cerr << "reduced system written to " << out_path << "\n";
  return 0;
}

int cmd_lift(const std::string& file, std::string out_path) {
  const cjsr::SystemFile sf = cjsr::read_system_file(file);
  const cjsr::ConstrainedSwitchedSystem sys = cjsr::to_system(sf);
  const cjsr::ConstrainedSwitchedSystem lifted = cjsr::kronecker_lift(sys);
  std::cout << "lifted matrices: " << lifted.alphabet_size() << " of size "
            << lifted.dimension() << "x" << lifted.dimension() << "\n";
  if (out_path.empty()) out_path = stem_of(file) + ".lifted.json";
  cjsr::write_system_file(out_path, cjsr::from_system(sf.name + "_lifted", lifted));
  std::cerr << "lifted system written to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bounds and certificates for constrained switched linear systems"};
  app.require_subcommand(1);

  std::string file;
  int k = 4, cycles = 6;
  std::uint64_t budget = 10'000'000;
  cjsr::BoundsReportOptions ropts;
  double reduce_tol = 1e-9;
  std::string out_path, certs_path;

  CLI::App* entropy = app.add_subcommand("entropy", "automaton entropy and structure");
  entropy->add_option("file", file)->required();

  CLI::App* bounds = app.add_subcommand("bounds", "brute-force and cycle bounds");
  bounds->add_option("file", file)->required();
  bounds->add_option("--k", k, "path length for the brute-force upper bound");
  bounds->add_option("--cycles", cycles, "maximum cycle length for the lower bound");
  bounds->add_option("--budget", budget, "path enumeration budget");

  CLI::App* report = app.add_subcommand("report", "per-degree bounds table (CSV on stdout)");
  report->add_option("file", file)->required();
  report->add_option("--dmax", ropts.dmax, "largest polynomial half-degree");
  report->add_option("--tol", ropts.bisect_tol, "relative bisection tolerance");
  report->add_option("--eps-interior", ropts.eps_interior, "interior margin (0 = auto)");
  report->add_option("--eps-sparsity", ropts.eps_sparsity,
                     "relative dual-support threshold");
  report->add_option("--certs", certs_path, "certificate JSON output path");

  CLI::App* reduce = app.add_subcommand("reduce", "low-rank reduction to the edge graph");
  reduce->add_option("file", file)->required();
  reduce->add_option("--tol", reduce_tol, "relative rank tolerance");
  reduce->add_option("--out", out_path, "output path for the reduced system");

  CLI::App* lift = app.add_subcommand("lift", "one-matrix-per-edge lift");
  lift->add_option("file", file)->required();
  lift->add_option("--out", out_path, "output path for the lifted system");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems count as input errors
  }

  try {
    if (entropy->parsed()) return cmd_entropy(file);
    if (bounds->parsed()) return cmd_bounds(file, k, cycles, budget);
    if (report->parsed()) return cmd_report(file, ropts, certs_path);
    if (reduce->parsed()) return cmd_reduce(file, reduce_tol, out_path);
    if (lift->parsed()) return cmd_lift(file, out_path);
  } catch (const cjsr::parse_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  } catch (const cjsr::numerical_error& ex) {
    std::cerr << "numerical error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
