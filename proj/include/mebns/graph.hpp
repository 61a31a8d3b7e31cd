#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mebns/linalg.hpp"

namespace mebns {

// Undirected edge stored with u < v.
struct Edge {
  std::int64_t u = 0;
  std::int64_t v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable undirected graph with node features. Adjacency is kept as CSR
// with sorted neighbor lists (edge membership is a binary search) plus a
// canonical lexicographically sorted edge list. Self-loops and duplicate
// input edges are dropped at construction.
class Graph {
 public:
  Graph() = default;

  // `features` must have one row per node; pass a matrix with zero columns
  // to request the one-hot fallback (identity truncated/padded to
  // `onehot_dim` columns, or num_nodes columns when onehot_dim == 0).
  static Graph from_edges(std::int64_t num_nodes, std::vector<Edge> edges,
                          Matrix features, std::int64_t onehot_dim = 0);

  std::int64_t num_nodes() const { return num_nodes_; }
  std::int64_t num_edges() const {
    return static_cast<std::int64_t>(edges_.size());
  }
  std::int64_t feature_dim() const { return features_->cols(); }

  const std::vector<Edge>& edge_list() const { return edges_; }
  const Matrix& features() const { return *features_; }
  std::shared_ptr<const Matrix> features_ptr() const { return features_; }

  std::int64_t degree(std::int64_t u) const {
    return offsets_[u + 1] - offsets_[u];
  }
  bool has_edge(std::int64_t u, std::int64_t v) const;

  const std::vector<std::int64_t>& csr_offsets() const { return offsets_; }
  const std::vector<std::int64_t>& csr_targets() const { return targets_; }

  // Construction bookkeeping (how much the loader had to clean up).
  std::int64_t dropped_self_loops() const { return dropped_self_loops_; }
  std::int64_t dropped_duplicates() const { return dropped_duplicates_; }

 private:
  std::int64_t num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int64_t> targets_;
  std::shared_ptr<const Matrix> features_ = std::make_shared<Matrix>(0, 0);
  std::int64_t dropped_self_loops_ = 0;
  std::int64_t dropped_duplicates_ = 0;
};

// Reads an edge list ("u<TAB>v" per line, '#' comment lines allowed) and an
// optional feature CSV ("node_id,v1,...,vf", no header). An empty feature
// path selects the one-hot fallback. declared_nodes < 0 means infer the node
// count from the data; otherwise any id >= declared_nodes is a range error.
Graph load_graph(const std::string& edge_path, const std::string& feature_path,
                 std::int64_t declared_nodes = -1, std::int64_t onehot_dim = 0);

// 70/10/20 train/valid/test edge split (floor arithmetic, remainder to
// test). The message graph contains the train edges only and shares the
// node set and features. Requires at least 10 edges.
struct EdgeSplit {
  std::vector<Edge> train;
  std::vector<Edge> valid;
  std::vector<Edge> test;
  Graph message_graph;
};

EdgeSplit split_edges(const Graph& g, std::uint64_t seed);

// Nodes at shortest-path distance in [2, k] from u. Sorted ascending.
std::vector<std::int64_t> k_hop_candidates(const Graph& g, std::int64_t u,
                                           int k);

// A DropEdge view: each undirected edge of the base graph is masked out
// independently with probability rho (both directions share the mask bit).
// The base graph must outlive the view.
struct AugmentedView {
  const Graph* base = nullptr;
  std::vector<std::uint8_t> keep;  // parallel to base->edge_list()
  double rho = 0.0;

  std::int64_t kept_edges() const;
};

AugmentedView drop_edge(const Graph& g, double rho, std::uint64_t seed);

// Symmetric-normalized adjacency with self-loops,
// D^(-1/2) (A + I) D^(-1/2), stored sparse row-wise.
class NormAdjacency {
 public:
  NormAdjacency() = default;

  std::int64_t num_nodes() const { return n_; }

  // Returns A_hat * x (x has one row per node).
  Matrix multiply(const Matrix& x) const;

  double entry(std::int64_t u, std::int64_t v) const;  // 0 when absent

  static NormAdjacency build(const Graph& g);
  static NormAdjacency build(const AugmentedView& view);

 private:
  std::int64_t n_ = 0;
  std::vector<std::int64_t> offsets_{0};
  std::vector<std::int64_t> targets_;
  std::vector<double> values_;
};

}  // namespace mebns
