#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "cjsr/errors.hpp"
#include "cjsr/sos.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

// On-disk description of a constrained switched system:
//   {"format":1, "name":str, "dimension":int,
//    "matrices":{"1":[[...]],...},
//    "automaton":{"nodes":[str...], "edges":[[src,dst,label]...]}}
// Matrix keys are the dense labels 1..m; edge endpoints are node names.
struct SystemFile {
  int format = 1;
  std::string name;
  int dimension = 0;
  std::vector<Matrix> matrices;  // index 0 = label 1
  std::vector<std::string> node_names;
  std::vector<std::tuple<std::string, std::string, int>> edges;
};

inline SystemFile parse_system_json(const nlohmann::json& j, const std::string& origin) {
  auto fail = [&](const std::string& msg) -> void {
    throw parse_error(origin + ": " + msg);
  };
  SystemFile f;
  try {
    if (!j.is_object()) fail("top level must be an object");
    f.format = j.at("format").get<int>();
    if (f.format != 1) fail("unsupported format " + std::to_string(f.format));
    f.name = j.value("name", std::string{});
    f.dimension = j.at("dimension").get<int>();
    if (f.dimension < 0) fail("dimension must be nonnegative");

    const auto& mats = j.at("matrices");
    if (!mats.is_object() || mats.empty()) fail("matrices must be a nonempty object");
    const int m = static_cast<int>(mats.size());
    for (int l = 1; l <= m; ++l) {
      const std::string key = std::to_string(l);
      if (!mats.contains(key)) fail("matrix labels must be dense 1..m; missing \"" + key + "\"");
      const auto& rows = mats.at(key);
      if (!rows.is_array() || static_cast<int>(rows.size()) != f.dimension)
        fail("matrix \"" + key + "\" must have " + std::to_string(f.dimension) + " rows");
      std::vector<double> flat;
      for (const auto& row : rows) {
        if (!row.is_array() || static_cast<int>(row.size()) != f.dimension)
          fail("matrix \"" + key + "\" must be square");
        for (const auto& v : row) flat.push_back(v.get<double>());
      }
      f.matrices.push_back(Matrix::from_rows(f.dimension, f.dimension, flat));
    }

    const auto& aut = j.at("automaton");
    for (const auto& nd : aut.at("nodes")) f.node_names.push_back(nd.get<std::string>());
    if (f.node_names.empty()) fail("automaton needs at least one node");
    for (const auto& ed : aut.at("edges")) {
      if (!ed.is_array() || ed.size() != 3) fail("each edge must be [source, target, label]");
      f.edges.emplace_back(ed[0].get<std::string>(), ed[1].get<std::string>(),
                           ed[2].get<int>());
    }
  } catch (const parse_error&) {
    throw;
  } catch (const nlohmann::json::exception& ex) {
    fail(ex.what());
  } catch (const numerical_error& ex) {
    fail(ex.what());
  }
  return f;
}

inline SystemFile read_system_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path.string() + ": cannot open file");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw parse_error(path.string() + ": " + ex.what());
  }
  return parse_system_json(j, path.string());
}

inline nlohmann::ordered_json to_json(const SystemFile& f) {
  nlohmann::ordered_json j;
  j["format"] = f.format;
  j["name"] = f.name;
  j["dimension"] = f.dimension;
  nlohmann::ordered_json mats = nlohmann::ordered_json::object();
  for (std::size_t l = 0; l < f.matrices.size(); ++l) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    const Matrix& m = f.matrices[l];
    for (Index i = 0; i < m.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (Index jx = 0; jx < m.cols(); ++jx) row.push_back(m(i, jx));
      rows.push_back(std::move(row));
    }
    mats[std::to_string(l + 1)] = std::move(rows);
  }
  j["matrices"] = std::move(mats);
  nlohmann::ordered_json aut;
  aut["nodes"] = f.node_names;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& [s, t, l] : f.edges) edges.push_back(nlohmann::ordered_json::array({s, t, l}));
  aut["edges"] = std::move(edges);
  j["automaton"] = std::move(aut);
  return j;
}

inline void write_system_file(const std::filesystem::path& path, const SystemFile& f) {
  std::ofstream out(path);
  if (!out) throw parse_error(path.string() + ": cannot open for writing");
  out << to_json(f).dump(1) << '\n';
}

inline ConstrainedSwitchedSystem to_system(const SystemFile& f) {
  std::map<std::string, int> node_id;
  for (std::size_t i = 0; i < f.node_names.size(); ++i) {
    if (!node_id.emplace(f.node_names[i], static_cast<int>(i)).second)
      throw parse_error("duplicate node name \"" + f.node_names[i] + "\"");
  }
  AutomatonData data;
  data.node_count = static_cast<int>(f.node_names.size());
  data.alphabet_size = static_cast<int>(f.matrices.size());
  for (const auto& [s, t, l] : f.edges) {
    auto is = node_id.find(s), it = node_id.find(t);
    if (is == node_id.end()) throw parse_error("edge references unknown node \"" + s + "\"");
    if (it == node_id.end()) throw parse_error("edge references unknown node \"" + t + "\"");
    data.edges.push_back({is->second, it->second, l});
  }
  return ConstrainedSwitchedSystem(f.matrices, Automaton::validate(data));
}

inline SystemFile from_system(const std::string& name, const ConstrainedSwitchedSystem& sys,
                              std::vector<std::string> node_names = {}) {
  SystemFile f;
  f.name = name;
  f.dimension = static_cast<int>(sys.dimension());
  f.matrices = sys.matrices();
  const Automaton& g = sys.automaton();
  if (node_names.empty())
    for (int i = 0; i < g.node_count(); ++i) node_names.push_back(std::to_string(i));
  if (static_cast<int>(node_names.size()) != g.node_count())
    throw dimension_error("from_system: node name count mismatch");
  f.node_names = node_names;
  for (const Edge& e : g.edges())
    f.edges.emplace_back(node_names[static_cast<std::size_t>(e.from)],
                         node_names[static_cast<std::size_t>(e.to)], e.label);
  return f;
}

inline nlohmann::ordered_json certificate_to_json(const SosCertificate& cert,
                                                  const CertificateReport* report = nullptr) {
  auto mat_to_json = [](const Eigen::MatrixXd& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::ordered_json j;
  j["degree"] = cert.degree;
  j["gamma"] = cert.gamma;
  j["eps_interior"] = cert.eps;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& q : cert.node_grams) nodes.push_back(mat_to_json(q));
  j["node_grams"] = std::move(nodes);
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& s : cert.edge_grams) edges.push_back(mat_to_json(s));
  j["edge_grams"] = std::move(edges);
  if (report != nullptr) {
    j["residuals"] = {
        {"min_node_margin", report->min_node_margin},
        {"min_edge_eigenvalue", report->min_edge_eigenvalue},
        {"max_coefficient_residual", report->max_coefficient_residual},
    };
  }
  return j;
}

}  // namespace cjsr
