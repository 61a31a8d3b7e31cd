#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "mebns/error.hpp"
#include "mebns/graph.hpp"
#include "mebns/rng.hpp"

#include "support/toys.hpp"

using mebns::Edge;
using mebns::Error;
using mebns::Graph;
using mebns::Matrix;
using mebns::NormAdjacency;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = "/tmp/mebns_test_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("construction canonicalizes, dedups, and drops self-loops") {
  Graph g = Graph::from_edges(
      5, {{3, 1}, {1, 3}, {2, 2}, {0, 4}, {4, 0}, {0, 1}}, Matrix(0, 0));
  CHECK(g.num_nodes() == 5);
  CHECK(g.num_edges() == 3);
  CHECK(g.edge_list() == std::vector<Edge>{{0, 1}, {0, 4}, {1, 3}});
  CHECK(g.dropped_self_loops() == 1);
  CHECK(g.dropped_duplicates() == 2);

  CHECK(g.has_edge(1, 3));
  CHECK(g.has_edge(3, 1));  // undirected
  CHECK_FALSE(g.has_edge(1, 2));
  CHECK_FALSE(g.has_edge(2, 2));
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(2) == 0);
}

TEST_CASE("one-hot fallback builds identity features") {
  Graph g = testsupport::path_graph(4);
  CHECK(g.feature_dim() == 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(g.features()(i, j) == (i == j ? 1.0 : 0.0));

  Graph wide = Graph::from_edges(3, {{0, 1}}, Matrix(0, 0), 5);
  CHECK(wide.feature_dim() == 5);
  CHECK(wide.features()(2, 2) == 1.0);
  CHECK(wide.features()(2, 4) == 0.0);
}

TEST_CASE("dataset loader round-trips edges and features") {
  const std::string edges = write_temp(
      "load_edges.tsv", "# comment line\n0\t1\n1\t2\n\n2\t3\n");
  const std::string feats = write_temp(
      "load_feats.csv", "0,1,0\n1,0,1\n2,1,1\n3,0,0\n");
  Graph g = mebns::load_graph(edges, feats);
  CHECK(g.num_nodes() == 4);
  CHECK(g.num_edges() == 3);
  CHECK(g.feature_dim() == 2);
  CHECK(g.features()(2, 0) == 1.0);
  CHECK(g.features()(3, 1) == 0.0);
}

TEST_CASE("dataset loader reports the offending file and line") {
  const std::string bad = write_temp("bad_edges.tsv", "0\t1\nnot-a-node\t2\n");
  CHECK_THROWS_WITH_AS(mebns::load_graph(bad, ""),
                       doctest::Contains(":2:"), Error);

  const std::string edges = write_temp("range_edges.tsv", "0\t1\n1\t9\n");
  CHECK_THROWS_AS(mebns::load_graph(edges, "", 5), Error);

  const std::string feats = write_temp("ragged.csv", "0,1,0\n1,0\n");
  const std::string ok_edges = write_temp("ok_edges.tsv", "0\t1\n");
  CHECK_THROWS_WITH_AS(mebns::load_graph(ok_edges, feats),
                       doctest::Contains(":2:"), Error);

  CHECK_THROWS_AS(mebns::load_graph("/nonexistent/file.tsv", ""), Error);
}

TEST_CASE("edge split is exactly 70/10/20 with the remainder in test") {
  std::vector<Edge> edges;
  for (std::int64_t i = 0; i < 100; ++i) edges.push_back({i, i + 100});
  Graph g = Graph::from_edges(200, edges, Matrix(0, 0));
  const mebns::EdgeSplit s = mebns::split_edges(g, 7);
  CHECK(s.train.size() == 70);
  CHECK(s.valid.size() == 10);
  CHECK(s.test.size() == 20);

  // Disjoint cover of the full edge set.
  std::set<Edge> all(s.train.begin(), s.train.end());
  all.insert(s.valid.begin(), s.valid.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 100);

  // The message graph carries exactly the train edges.
  CHECK(s.message_graph.num_edges() == 70);
  for (const Edge& e : s.train) CHECK(s.message_graph.has_edge(e.u, e.v));
  CHECK(s.message_graph.num_nodes() == 200);
}

TEST_CASE("edge split sizes at the reference dataset scale") {
  // 10556 edges: floor arithmetic gives 7389 / 1055 / 2112.
  std::vector<Edge> edges;
  std::int64_t u = 0;
  for (std::int64_t i = 0; i < 10556; ++i) {
    edges.push_back({u, u + 1 + (i % 37)});
    u += 1 + (i % 3);
  }
  Graph g = Graph::from_edges(u + 40, edges, Matrix(0, 0), 1);
  REQUIRE(g.num_edges() == 10556);
  const mebns::EdgeSplit s = mebns::split_edges(g, 1);
  CHECK(s.train.size() == 7389);
  CHECK(s.valid.size() == 1055);
  CHECK(s.test.size() == 2112);
}

TEST_CASE("edge split is seed-deterministic and seed-sensitive") {
  Graph g = testsupport::ring_graph(60);
  const mebns::EdgeSplit a = mebns::split_edges(g, 5);
  const mebns::EdgeSplit b = mebns::split_edges(g, 5);
  CHECK(a.train == b.train);
  CHECK(a.valid == b.valid);
  CHECK(a.test == b.test);

  const mebns::EdgeSplit c = mebns::split_edges(g, 6);
  CHECK(a.train != c.train);
}

TEST_CASE("edge split refuses graphs that are too small") {
  Graph g = testsupport::path_graph(9);  // 8 edges
  CHECK_THROWS_AS(mebns::split_edges(g, 1), Error);
}

TEST_CASE("k-hop candidate sets follow BFS distance") {
  // path 0-1-2-3-4: from node 0, distance-2 reaches {2}, distance-3 {3}.
  Graph path = testsupport::path_graph(5);
  CHECK(mebns::k_hop_candidates(path, 0, 2) == std::vector<std::int64_t>{2});
  CHECK(mebns::k_hop_candidates(path, 0, 3) ==
        std::vector<std::int64_t>{2, 3});
  CHECK(mebns::k_hop_candidates(path, 2, 2) ==
        std::vector<std::int64_t>{0, 4});

  // ring of 6: two hops from 0 are {2, 4}, never the neighbors or itself.
  Graph ring = testsupport::ring_graph(6);
  CHECK(mebns::k_hop_candidates(ring, 0, 2) ==
        std::vector<std::int64_t>{2, 4});
  CHECK(mebns::k_hop_candidates(ring, 0, 3) ==
        std::vector<std::int64_t>{2, 3, 4});

  // isolated node: nothing within reach.
  Graph iso = Graph::from_edges(4, {{0, 1}}, Matrix(0, 0));
  CHECK(mebns::k_hop_candidates(iso, 3, 2).empty());
}

TEST_CASE("edge dropping masks edges at the requested rate") {
  Graph g = testsupport::ring_graph(10000);  // 10000 edges
  const mebns::AugmentedView none = mebns::drop_edge(g, 0.0, 3);
  CHECK(none.kept_edges() == 10000);
  const mebns::AugmentedView all = mebns::drop_edge(g, 1.0, 3);
  CHECK(all.kept_edges() == 0);

  // Binomial(10000, 0.5): 4-sigma band is 5000 +- 200.
  const mebns::AugmentedView half = mebns::drop_edge(g, 0.5, 3);
  CHECK(half.kept_edges() > 4800);
  CHECK(half.kept_edges() < 5200);

  // Same seed, same mask.
  const mebns::AugmentedView again = mebns::drop_edge(g, 0.5, 3);
  CHECK(again.keep == half.keep);
}

TEST_CASE("normalized adjacency matches the dense construction") {
  // Hand graph: 0-1, 1-2, 1-3, 2-3 on 4 nodes.
  Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}, {1, 3}, {2, 3}},
                              Matrix(0, 0));
  const NormAdjacency adj = NormAdjacency::build(g);

  // Dense oracle: D^(-1/2) (A + I) D^(-1/2) with degree+1 on the diagonal.
  Matrix a = Matrix::Identity(4, 4);
  auto put = [&](int u, int v) { a(u, v) = a(v, u) = 1.0; };
  put(0, 1);
  put(1, 2);
  put(1, 3);
  put(2, 3);
  mebns::Vector dinv = a.rowwise().sum().array().rsqrt();
  Matrix expected = dinv.asDiagonal() * a * dinv.asDiagonal();

  for (int u = 0; u < 4; ++u)
    for (int v = 0; v < 4; ++v)
      CHECK(adj.entry(u, v) == doctest::Approx(expected(u, v)).epsilon(1e-12));

  // multiply agrees with the dense product on a random block.
  mebns::Rng rng(9);
  Matrix x(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
  const Matrix got = adj.multiply(x);
  const Matrix want = expected * x;
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalized adjacency of a masked view skips dropped edges") {
  Graph g = testsupport::path_graph(3);  // edges (0,1), (1,2)
  mebns::AugmentedView view{&g, {1, 0}, 0.5};  // drop (1,2)
  const NormAdjacency adj = NormAdjacency::build(view);
  // Remaining graph: 0-1 plus an isolated 2. Degrees+1: [2, 2, 1].
  CHECK(adj.entry(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(adj.entry(1, 2) == 0.0);
  CHECK(adj.entry(2, 2) == doctest::Approx(1.0).epsilon(1e-12));
}
