#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cjsr/automaton.hpp"
#include "cjsr/errors.hpp"
#include "cjsr/matrix.hpp"

namespace cjsr {

// Matrix set A_1..A_m plus an automaton over the same label alphabet.
class ConstrainedSwitchedSystem {
 public:
  ConstrainedSwitchedSystem(std::vector<Matrix> matrices, Automaton automaton)
      : matrices_(std::move(matrices)), automaton_(std::move(automaton)) {
    if (matrices_.empty()) throw dimension_error("System: needs at least one matrix");
    if (automaton_.alphabet_size() != static_cast<int>(matrices_.size()))
      throw dimension_error("System: alphabet size does not match matrix count");
    dim_ = matrices_.front().rows();
    for (const Matrix& m : matrices_) {
      if (!m.is_square() || m.rows() != dim_)
        throw dimension_error("System: matrices must be square with equal dimension");
    }
  }

  Index dimension() const { return dim_; }
  int alphabet_size() const { return static_cast<int>(matrices_.size()); }
  const Matrix& matrix(int label) const {  // labels are 1-based
    if (label < 1 || label > alphabet_size())
      throw dimension_error("System: label out of range");
    return matrices_[static_cast<std::size_t>(label - 1)];
  }
  const std::vector<Matrix>& matrices() const { return matrices_; }
  const Automaton& automaton() const { return automaton_; }

 private:
  Index dim_ = 0;
  std::vector<Matrix> matrices_;
  Automaton automaton_;
};

struct BoundsPair {
  double lower = 0.0;
  double upper = 0.0;

  BoundsPair(double lo, double up) : lower(lo), upper(up) {
    if (!(lo <= up + 1e-12)) throw numerical_error("BoundsPair: lower exceeds upper");
  }
};

// A_{sigma_k} ... A_{sigma_1}: the first edge's label is applied first.
inline Matrix product_along_path(const ConstrainedSwitchedSystem& sys, const Path& path) {
  if (!path_is_admissible(sys.automaton(), path))
    throw dimension_error("product_along_path: path not admissible");
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(sys.dimension(), sys.dimension());
  for (int e : path.edges) prod = sys.matrix(sys.automaton().edge(e).label).raw() * prod;
  return Matrix(std::move(prod));
}

inline Eigen::VectorXd simulate(const ConstrainedSwitchedSystem& sys, const Eigen::VectorXd& x0,
                                const Path& path) {
  if (x0.size() != sys.dimension()) throw dimension_error("simulate: state dimension mismatch");
  if (!path_is_admissible(sys.automaton(), path))
    throw dimension_error("simulate: path not admissible");
  Eigen::VectorXd x = x0;
  for (int e : path.edges) x = sys.matrix(sys.automaton().edge(e).label).raw() * x;
  return x;
}

struct BruteForceResult {
  double bound = 0.0;
  std::uint64_t path_count = 0;
  bool budget_exceeded = false;
};

// max over admissible length-k paths of ||A_s||^(1/k); a valid upper bound
// on the growth rate for every k. Prefix products are shared along the
// enumeration tree and exactly-zero prefixes are pruned.
inline BruteForceResult upper_bound_bruteforce_detail(const ConstrainedSwitchedSystem& sys, int k,
                                                      std::uint64_t budget = 10'000'000) {
  if (k < 1) throw std::invalid_argument("upper_bound_bruteforce: k must be >= 1");
  const Automaton& g = sys.automaton();
  BruteForceResult res;
  std::uint64_t paths = 0;
  try {
    paths = count_paths(g, k);
  } catch (const numerical_error&) {
    paths = UINT64_MAX;
  }
  res.path_count = paths;
  res.budget_exceeded = paths > budget;
  if (res.budget_exceeded) {
    std::cerr << "upper_bound_bruteforce: enumerating " << paths << " paths exceeds budget "
              << budget << "\n";
  }
  if (sys.dimension() == 0) return res;

  double best = 0.0;
  std::vector<Eigen::MatrixXd> stack;
  stack.reserve(static_cast<std::size_t>(k) + 1);
  stack.push_back(Eigen::MatrixXd::Identity(sys.dimension(), sys.dimension()));
  std::function<void(int, int)> rec = [&](int node, int depth) {
    if (depth == k) {
      best = std::max(best, spectral_norm(stack.back()));
      return;
    }
    for (int e : g.out_edges(node)) {
      const Edge& ed = g.edge(e);
      Eigen::MatrixXd next = sys.matrix(ed.label).raw() * stack.back();
      if (next.lpNorm<Eigen::Infinity>() == 0.0) continue;  // zero prefix cannot attain the max
      stack.push_back(std::move(next));
      rec(ed.to, depth + 1);
      stack.pop_back();
    }
  };
  for (int node = 0; node < g.node_count(); ++node) rec(node, 0);
  res.bound = std::pow(best, 1.0 / k);
  return res;
}

inline double upper_bound_bruteforce(const ConstrainedSwitchedSystem& sys, int k,
                                     std::uint64_t budget = 10'000'000) {
  return upper_bound_bruteforce_detail(sys, k, budget).bound;
}

// max over closed walks c of length <= max_len of rho(A_c)^(1/|c|); powers of
// any closed walk are admissible, so every value lower-bounds the growth
// rate. Walks (rather than only elementary cycles) are required as soon as a
// cycle revisits a node, e.g. repeated self-loops of a one-node automaton.
// Rotations of a walk share the product spectrum, so each walk is explored
// once, rooted at its minimal node.
inline double lower_bound_cycles(const ConstrainedSwitchedSystem& sys, int max_len) {
  if (max_len < 1) throw std::invalid_argument("lower_bound_cycles: max_len must be >= 1");
  const Automaton& g = sys.automaton();
  if (sys.dimension() == 0) return 0.0;
  double best = 0.0;
  std::vector<Eigen::MatrixXd> stack;
  stack.push_back(Eigen::MatrixXd::Identity(sys.dimension(), sys.dimension()));
  int root = 0;
  std::function<void(int, int)> rec = [&](int node, int depth) {
    for (int ei : g.out_edges(node)) {
      const Edge& e = g.edge(ei);
      if (e.to < root) continue;
      Eigen::MatrixXd next = sys.matrix(e.label).raw() * stack.back();
      if (e.to == root) {
        const double rho = spectral_radius(next);
        best = std::max(best, std::pow(rho, 1.0 / (depth + 1.0)));
      }
      if (depth + 1 < max_len) {
        stack.push_back(std::move(next));
        rec(e.to, depth + 1);
        stack.pop_back();
      }
    }
  };
  for (root = 0; root < g.node_count(); ++root) rec(root, 0);
  return best;
}

// One matrix per edge: Abar_e = E_{vu} (x) A_sigma on the n|V|-dimensional
// space, over the one-node full shift with |E| labels. Products of lifted
// matrices vanish unless the edges chain, so the unconstrained growth rate
// of the lift equals the constrained growth rate of the original.
inline ConstrainedSwitchedSystem kronecker_lift(const ConstrainedSwitchedSystem& sys) {
  const Automaton& g = sys.automaton();
  const Index n = sys.dimension();
  const int nv = g.node_count();
  std::vector<Matrix> lifted;
  lifted.reserve(static_cast<std::size_t>(g.edge_count()));
  for (const Edge& e : g.edges()) {
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * nv, n * nv);
    big.block(n * e.to, n * e.from, n, n) = sys.matrix(e.label).raw();
    lifted.emplace_back(std::move(big));
  }
  AutomatonData shift;
  shift.node_count = 1;
  shift.alphabet_size = g.edge_count();
  for (int l = 1; l <= g.edge_count(); ++l) shift.edges.push_back({0, 0, l});
  return ConstrainedSwitchedSystem(std::move(lifted), Automaton::validate(shift));
}

struct LowRankReduction {
  ConstrainedSwitchedSystem reduced;
  std::vector<Matrix> factors_x;  // per original label, n x r
  std::vector<Matrix> factors_y;  // per original label, n x r
  Index rank = 0;
  // reduced label (1-based) -> (newer sigma, older sigma)
  std::vector<std::pair<int, int>> pair_labels;
};

// Builds the reduced system on the edge graph: nodes are the original edges,
// a transition (u,v,s1) -> (v,w,s2) carries the r x r matrix Y_{s2}^T X_{s1}.
// Rank-deficient factors are zero-padded to the common width r, which keeps
// A_sigma = X_sigma Y_sigma^T and every product intact.
inline LowRankReduction low_rank_reduce(const ConstrainedSwitchedSystem& sys, double tol) {
  const Automaton& g = sys.automaton();
  const int m = sys.alphabet_size();

  std::vector<Matrix> xs, ys;
  Index r = 0;
  for (int l = 1; l <= m; ++l) {
    LowRankFactor f = low_rank_factor(sys.matrix(l), tol);
    r = std::max(r, f.rank);
    xs.push_back(std::move(f.x));
    ys.push_back(std::move(f.y));
  }
  for (int l = 0; l < m; ++l) {
    auto pad = [&](const Matrix& f) {
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(sys.dimension(), r);
      out.leftCols(f.cols()) = f.raw();
      return Matrix(std::move(out));
    };
    xs[static_cast<std::size_t>(l)] = pad(xs[static_cast<std::size_t>(l)]);
    ys[static_cast<std::size_t>(l)] = pad(ys[static_cast<std::size_t>(l)]);
  }

  // Label ids for (newer, older) pairs, dense in order of first occurrence.
  std::map<std::pair<int, int>, int> pair_to_label;
  std::vector<std::pair<int, int>> pair_labels;
  AutomatonData rdata;
  rdata.node_count = g.edge_count();
  for (int i = 0; i < g.edge_count(); ++i) {
    for (int j = 0; j < g.edge_count(); ++j) {
      if (g.edge(i).to != g.edge(j).from) continue;
      const std::pair<int, int> key{g.edge(j).label, g.edge(i).label};
      auto it = pair_to_label.find(key);
      if (it == pair_to_label.end()) {
        it = pair_to_label.emplace(key, static_cast<int>(pair_labels.size()) + 1).first;
        pair_labels.push_back(key);
      }
      rdata.edges.push_back({i, j, it->second});
    }
  }
  rdata.alphabet_size = static_cast<int>(pair_labels.size());

  std::vector<Matrix> reduced_mats;
  reduced_mats.reserve(pair_labels.size());
  for (const auto& [newer, older] : pair_labels) {
    reduced_mats.emplace_back(ys[static_cast<std::size_t>(newer - 1)].raw().transpose() *
                              xs[static_cast<std::size_t>(older - 1)].raw());
  }

  return LowRankReduction{
      ConstrainedSwitchedSystem(std::move(reduced_mats), Automaton::validate(rdata)),
      std::move(xs), std::move(ys), r, std::move(pair_labels)};
}

}  // namespace cjsr
