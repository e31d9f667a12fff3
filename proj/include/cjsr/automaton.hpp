#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cjsr/errors.hpp"
#include "cjsr/matrix.hpp"

namespace cjsr {

struct Edge {
  int from = 0;
  int to = 0;
  int label = 0;  // 1..m
};

struct AutomatonData {
  int node_count = 0;
  int alphabet_size = 0;
  std::vector<Edge> edges;
};

// Labeled directed multigraph over nodes 0..|V|-1 with labels 1..m.
// Immutable after validation; strong connectivity is recorded, not required,
// since certificate-support subgraphs are legitimately not strongly connected.
class Automaton {
 public:
  static Automaton validate(const AutomatonData& data) {
    if (data.node_count <= 0) throw dimension_error("Automaton: node_count must be positive");
    if (data.alphabet_size <= 0)
      throw dimension_error("Automaton: alphabet_size must be positive");
    if (data.edges.empty()) throw dimension_error("Automaton: edge set must be nonempty");
    for (const Edge& e : data.edges) {
      if (e.from < 0 || e.from >= data.node_count || e.to < 0 || e.to >= data.node_count)
        throw dimension_error("Automaton: edge endpoint out of range");
      if (e.label < 1 || e.label > data.alphabet_size)
        throw dimension_error("Automaton: edge label out of range");
    }
    return Automaton(data);
  }

  int node_count() const { return node_count_; }
  int alphabet_size() const { return alphabet_size_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int idx) const { return edges_[static_cast<std::size_t>(idx)]; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  // Outgoing edge indices of a node, in global edge order.
  const std::vector<int>& out_edges(int node) const {
    return out_[static_cast<std::size_t>(node)];
  }
  bool strongly_connected() const { return strongly_connected_; }

 private:
  explicit Automaton(const AutomatonData& data)
      : node_count_(data.node_count), alphabet_size_(data.alphabet_size), edges_(data.edges) {
    out_.resize(static_cast<std::size_t>(node_count_));
    for (int i = 0; i < edge_count(); ++i)
      out_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(i)].from)].push_back(i);
    strongly_connected_ = compute_strong_connectivity();
  }

  bool compute_strong_connectivity() const {
    auto reach = [&](bool forward) {
      std::vector<char> seen(static_cast<std::size_t>(node_count_), 0);
      std::vector<int> stack{0};
      seen[0] = 1;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (const Edge& e : edges_) {
          int a = forward ? e.from : e.to;
          int b = forward ? e.to : e.from;
          if (a == u && !seen[static_cast<std::size_t>(b)]) {
            seen[static_cast<std::size_t>(b)] = 1;
            stack.push_back(b);
          }
        }
      }
      return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach(true) && reach(false);
  }

  int node_count_;
  int alphabet_size_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  bool strongly_connected_ = false;
};

// Edge-index sequence; consecutive edges must chain head to tail.
struct Path {
  std::vector<int> edges;

  std::size_t length() const { return edges.size(); }
  bool empty() const { return edges.empty(); }
};

inline bool path_is_admissible(const Automaton& g, const Path& p) {
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    int idx = p.edges[i];
    if (idx < 0 || idx >= g.edge_count()) return false;
    if (i > 0 && g.edge(p.edges[i - 1]).to != g.edge(idx).from) return false;
  }
  return true;
}

inline std::vector<int> path_labels(const Automaton& g, const Path& p) {
  std::vector<int> labels;
  labels.reserve(p.edges.size());
  for (int idx : p.edges) labels.push_back(g.edge(idx).label);
  return labels;
}

// True iff every node's outgoing edges carry pairwise distinct labels.
inline bool is_right_resolving(const Automaton& g) {
  for (int v = 0; v < g.node_count(); ++v) {
    std::vector<int> labels;
    for (int e : g.out_edges(v)) labels.push_back(g.edge(e).label);
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) return false;
  }
  return true;
}

// Entry (u,v) counts edges u->v, parallel edges with multiplicity.
inline Matrix adjacency_matrix(const Automaton& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.node_count(), g.node_count());
  for (const Edge& e : g.edges()) a(e.from, e.to) += 1.0;
  return Matrix(std::move(a));
}

struct EntropyResult {
  double bits = 0.0;                      // log2 of adjacency spectral radius, clamped at 0
  double adjacency_spectral_radius = 0.0;
  bool acyclic = false;                   // true when the graph has no cycle (rho = 0)

  operator double() const { return bits; }
};

// Base-2 growth rate of the number of admissible edge paths.
// An acyclic graph (possible for certificate-support subgraphs) has
// finitely many paths; it is reported as zero entropy with a flag.
inline EntropyResult entropy_edge_shift(const Automaton& g) {
  const double rho = spectral_radius(adjacency_matrix(g));
  EntropyResult r;
  r.adjacency_spectral_radius = rho;
  if (rho < 0.5) {  // integer adjacency: either 0 (acyclic) or >= 1
    r.bits = 0.0;
    r.acyclic = true;
  } else {
    r.bits = std::max(0.0, std::log2(rho));
    r.acyclic = false;
  }
  return r;
}

// Automaton whose nodes are the input's edges and whose transitions are the
// consecutive edge pairs, each labeled by the second edge's label.
inline Automaton edge_shift(const Automaton& g) {
  AutomatonData data;
  data.node_count = g.edge_count();
  data.alphabet_size = g.alphabet_size();
  for (int i = 0; i < g.edge_count(); ++i) {
    for (int j = 0; j < g.edge_count(); ++j) {
      if (g.edge(i).to == g.edge(j).from) data.edges.push_back({i, j, g.edge(j).label});
    }
  }
  return Automaton::validate(data);
}

// Number of admissible edge paths of length k (sum of entries of Adj^k).
inline std::uint64_t count_paths(const Automaton& g, int k) {
  if (k < 1) throw std::invalid_argument("count_paths: k must be >= 1");
  using U = unsigned __int128;
  constexpr U kMax = ~U(0);
  std::vector<U> w(static_cast<std::size_t>(g.node_count()), 1);
  for (int step = 0; step < k; ++step) {
    std::vector<U> next(w.size(), 0);
    for (const Edge& e : g.edges()) {
      U add = w[static_cast<std::size_t>(e.to)];
      U& dst = next[static_cast<std::size_t>(e.from)];
      if (dst > kMax - add) throw numerical_error("count_paths: overflow");
      dst += add;
    }
    w.swap(next);
  }
  U total = 0;
  for (U v : w) {
    if (total > kMax - v) throw numerical_error("count_paths: overflow");
    total += v;
  }
  if (total > static_cast<U>(UINT64_MAX)) throw numerical_error("count_paths: overflow");
  return static_cast<std::uint64_t>(total);
}

// Visits every admissible path of length k in lexicographic order of edge
// indices. The visitor returns false to stop early.
inline void for_each_path(const Automaton& g, int k,
                          const std::function<bool(const Path&)>& visit) {
  if (k < 1) throw std::invalid_argument("for_each_path: k must be >= 1");
  Path p;
  p.edges.reserve(static_cast<std::size_t>(k));
  bool stop = false;
  std::function<void(int, int)> rec = [&](int node, int depth) {
    if (stop) return;
    if (depth == k) {
      if (!visit(p)) stop = true;
      return;
    }
    for (int e : g.out_edges(node)) {
      p.edges.push_back(e);
      rec(g.edge(e).to, depth + 1);
      p.edges.pop_back();
      if (stop) return;
    }
  };
  for (int e = 0; e < g.edge_count() && !stop; ++e) {
    p.edges.push_back(e);
    rec(g.edge(e).to, 1);
    p.edges.pop_back();
  }
}

inline std::vector<Path> enumerate_paths(const Automaton& g, int k) {
  std::vector<Path> out;
  for_each_path(g, k, [&](const Path& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

// All elementary cycles of length <= max_len, rooted at their minimal node id.
// Depth-bounded rooted search; parallel edges yield distinct cycles.
inline std::vector<Path> simple_cycles(const Automaton& g, int max_len) {
  if (max_len < 1) throw std::invalid_argument("simple_cycles: max_len must be >= 1");
  std::vector<Path> cycles;
  std::vector<char> on_path(static_cast<std::size_t>(g.node_count()), 0);
  Path p;
  for (int root = 0; root < g.node_count(); ++root) {
    std::function<void(int)> rec = [&](int node) {
      for (int e : g.out_edges(node)) {
        const Edge& ed = g.edge(e);
        if (ed.to < root) continue;  // cycles are rooted at their minimal node
        if (ed.to == root) {
          p.edges.push_back(e);
          cycles.push_back(p);
          p.edges.pop_back();
          continue;
        }
        if (on_path[static_cast<std::size_t>(ed.to)]) continue;
        if (static_cast<int>(p.edges.size()) + 1 >= max_len) continue;
        on_path[static_cast<std::size_t>(ed.to)] = 1;
        p.edges.push_back(e);
        rec(ed.to);
        p.edges.pop_back();
        on_path[static_cast<std::size_t>(ed.to)] = 0;
      }
    };
    on_path[static_cast<std::size_t>(root)] = 1;
    rec(root);
    on_path[static_cast<std::size_t>(root)] = 0;
  }
  return cycles;
}

}  // namespace cjsr
