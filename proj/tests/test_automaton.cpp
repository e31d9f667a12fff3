#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "cjsr/automaton.hpp"
#include "test_support.hpp"

using namespace cjsr;

TEST_CASE("validation accepts the standard shapes", "[automaton]") {
  AutomatonData one_node;
  one_node.node_count = 1;
  one_node.alphabet_size = 2;
  one_node.edges = {{0, 0, 1}, {0, 0, 2}};
  CHECK(Automaton::validate(one_node).strongly_connected());

  const Automaton dropout = testsup::dropout_automaton();
  CHECK(dropout.strongly_connected());
  CHECK(dropout.edge_count() == 9);

  AutomatonData chain;
  chain.node_count = 2;
  chain.alphabet_size = 1;
  chain.edges = {{0, 1, 1}};
  CHECK_FALSE(Automaton::validate(chain).strongly_connected());
}

TEST_CASE("validation rejects malformed input", "[automaton]") {
  AutomatonData bad;
  bad.node_count = 2;
  bad.alphabet_size = 1;
  bad.edges = {{0, 2, 1}};
  CHECK_THROWS_AS(Automaton::validate(bad), dimension_error);
  bad.edges = {{0, 1, 3}};
  CHECK_THROWS_AS(Automaton::validate(bad), dimension_error);
  bad.edges = {};
  CHECK_THROWS_AS(Automaton::validate(bad), dimension_error);
}

TEST_CASE("right-resolving detection", "[automaton]") {
  CHECK(is_right_resolving(testsup::full_shift(3)));
  AutomatonData dup;
  dup.node_count = 1;
  dup.alphabet_size = 1;
  dup.edges = {{0, 0, 1}, {0, 0, 1}};
  CHECK_FALSE(is_right_resolving(Automaton::validate(dup)));
  CHECK(is_right_resolving(testsup::dropout_automaton()));
}

TEST_CASE("adjacency matrix", "[automaton]") {
  CHECK(adjacency_matrix(testsup::full_shift(5))(0, 0) == 5.0);

  const Matrix perm = adjacency_matrix(testsup::cycle_automaton(3));
  CHECK(perm(0, 1) == 1.0);
  CHECK(perm(1, 2) == 1.0);
  CHECK(perm(2, 0) == 1.0);
  CHECK(perm.raw().sum() == 3.0);

  const Matrix adj = adjacency_matrix(testsup::dropout_automaton());
  const Matrix want = Matrix::from_rows(
      {{0, 1, 1, 0}, {1, 0, 1, 0}, {1, 1, 1, 1}, {0, 0, 1, 0}});
  CHECK(spectral_norm(adj - want) == 0.0);
}

TEST_CASE("edge shift entropy", "[automaton]") {
  CHECK(entropy_edge_shift(testsup::full_shift(4)).bits == Catch::Approx(2.0));
  CHECK(entropy_edge_shift(testsup::cycle_automaton(5)).bits == Catch::Approx(0.0).margin(1e-12));
  const EntropyResult h = entropy_edge_shift(testsup::dropout_automaton());
  CHECK(h.adjacency_spectral_radius == Catch::Approx(2.61803).margin(1e-4));
  CHECK(h.bits == Catch::Approx(std::log2(2.6180339887)).margin(1e-9));
  CHECK_FALSE(h.acyclic);

  AutomatonData dag;
  dag.node_count = 2;
  dag.alphabet_size = 1;
  dag.edges = {{0, 1, 1}};
  const EntropyResult hd = entropy_edge_shift(Automaton::validate(dag));
  CHECK(hd.bits == 0.0);
  CHECK(hd.acyclic);
}

TEST_CASE("edge shift construction", "[automaton]") {
  AutomatonData loop;
  loop.node_count = 1;
  loop.alphabet_size = 1;
  loop.edges = {{0, 0, 1}};
  const Automaton es1 = edge_shift(Automaton::validate(loop));
  CHECK(es1.node_count() == 1);
  CHECK(es1.edge_count() == 1);

  const Automaton esm = edge_shift(testsup::full_shift(3));
  CHECK(esm.node_count() == 3);
  CHECK(esm.edge_count() == 9);

  const Automaton dropout = testsup::dropout_automaton();
  const Automaton esf = edge_shift(dropout);
  CHECK(esf.node_count() == 9);

  for (const Automaton& g : {dropout, testsup::golden_mean_automaton(), testsup::full_shift(3),
                             testsup::cycle_automaton(4)}) {
    CHECK(entropy_edge_shift(edge_shift(g)).bits ==
          Catch::Approx(entropy_edge_shift(g).bits).margin(1e-9));
  }
}

TEST_CASE("path counting", "[automaton]") {
  CHECK(count_paths(testsup::full_shift(3), 4) == 81);
  CHECK(count_paths(testsup::cycle_automaton(3), 5) == 3);
  const std::uint64_t fib[] = {3, 5, 8, 13, 21, 34};
  for (int k = 1; k <= 6; ++k)
    CHECK(count_paths(testsup::golden_mean_automaton(), k) == fib[k - 1]);
}

TEST_CASE("path enumeration", "[automaton]") {
  AutomatonData loop;
  loop.node_count = 1;
  loop.alphabet_size = 1;
  loop.edges = {{0, 0, 1}};
  CHECK(enumerate_paths(Automaton::validate(loop), 3).size() == 1);

  const auto paths = enumerate_paths(testsup::full_shift(2), 2);
  REQUIRE(paths.size() == 4);
  // lexicographic order by edge index
  CHECK(paths[0].edges == std::vector<int>{0, 0});
  CHECK(paths[1].edges == std::vector<int>{0, 1});
  CHECK(paths[2].edges == std::vector<int>{1, 0});
  CHECK(paths[3].edges == std::vector<int>{1, 1});

  // sum of entries of Adj^2 for the four-node automaton
  CHECK(enumerate_paths(testsup::dropout_automaton(), 2).size() == 25);
  CHECK(count_paths(testsup::dropout_automaton(), 2) == 25);
}

TEST_CASE("enumeration length matches the count", "[automaton]") {
  for (const Automaton& g : {testsup::dropout_automaton(), testsup::golden_mean_automaton(),
                             testsup::full_shift(3), testsup::cycle_automaton(3)}) {
    for (int k = 1; k <= 8; ++k) {
      std::uint64_t seen = 0;
      for_each_path(g, k, [&](const Path& p) {
        REQUIRE(path_is_admissible(g, p));
        ++seen;
        return true;
      });
      CHECK(seen == count_paths(g, k));
    }
  }
}

TEST_CASE("simple cycle enumeration", "[automaton]") {
  AutomatonData two_loops;
  two_loops.node_count = 1;
  two_loops.alphabet_size = 2;
  two_loops.edges = {{0, 0, 1}, {0, 0, 2}};
  CHECK(simple_cycles(Automaton::validate(two_loops), 1).size() == 2);

  CHECK(simple_cycles(testsup::cycle_automaton(3), 3).size() == 1);
  CHECK(simple_cycles(testsup::cycle_automaton(3), 2).empty());

  // self-loop at node 2 plus the four 2-cycles
  const auto cyc = simple_cycles(testsup::dropout_automaton(), 2);
  CHECK(cyc.size() == 5);
  std::multiset<std::size_t> lengths;
  for (const Path& c : cyc) lengths.insert(c.length());
  CHECK(lengths.count(1) == 1);
  CHECK(lengths.count(2) == 4);
}

TEST_CASE("entropy agrees with finite path counts", "[automaton]") {
  for (const Automaton& g : {testsup::dropout_automaton(), testsup::golden_mean_automaton(),
                             testsup::full_shift(2), testsup::cycle_automaton(3)}) {
    const double h = entropy_edge_shift(g).bits;
    const double h40 = std::log2(static_cast<double>(count_paths(g, 40))) / 40.0;
    CHECK(std::abs(h40 - h) < 0.05);
    const double h20 = std::log2(static_cast<double>(count_paths(g, 20))) / 20.0;
    CHECK(std::abs(h40 - h) <= std::abs(h20 - h) + 1e-12);
  }
}

TEST_CASE("labels determine paths from a fixed start under right-resolving", "[automaton]") {
  const Automaton g = testsup::dropout_automaton();
  REQUIRE(is_right_resolving(g));
  for (int k = 1; k <= 5; ++k) {
    std::map<std::pair<int, std::vector<int>>, int> seen;
    for_each_path(g, k, [&](const Path& p) {
      const int start = g.edge(p.edges.front()).from;
      ++seen[{start, path_labels(g, p)}];
      return true;
    });
    for (const auto& [key, count] : seen) CHECK(count == 1);
  }
}
