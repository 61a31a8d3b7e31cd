#include "mebns/dataset_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>
#include <vector>

#include "mebns/error.hpp"
#include "mebns/rng.hpp"

namespace mebns {

namespace {

struct Community {
  std::int64_t first = 0;  // contiguous id block [first, first + count)
  std::int64_t count = 0;
  std::vector<std::int64_t> endpoint_pool;  // one entry per incident edge end
  std::vector<std::int64_t> vocabulary;
};

std::int64_t pick_member(const Community& c, double pa_strength, Rng& rng) {
  // Preferential attachment: reuse an endpoint proportionally to its degree,
  // otherwise a uniform member.
  if (!c.endpoint_pool.empty() && rng.uniform() < pa_strength)
    return c.endpoint_pool[rng.index(c.endpoint_pool.size())];
  return c.first + static_cast<std::int64_t>(rng.index(
                       static_cast<std::size_t>(c.count)));
}

}  // namespace

Graph generate_synth_graph(const SynthSpec& spec) {
  if (spec.nodes < 10 || spec.edges < 10 || spec.communities < 2 ||
      spec.feature_dim < 1 || spec.cluster_fraction < 0.0 ||
      spec.cluster_fraction >= 1.0 || spec.cluster_size < 2)
    throw Error::config("synthetic dataset spec out of range");

  Rng rng(mix_seed(spec.seed, stream::dataset));

  // Uneven community sizes: weights 2, 3, ..., communities+1.
  std::vector<Community> comms(static_cast<std::size_t>(spec.communities));
  {
    double total_w = 0.0;
    for (int c = 0; c < spec.communities; ++c) total_w += c + 2.0;
    std::int64_t assigned = 0;
    for (int c = 0; c < spec.communities; ++c) {
      auto& comm = comms[static_cast<std::size_t>(c)];
      comm.first = assigned;
      comm.count = c + 1 == spec.communities
                       ? spec.nodes - assigned
                       : static_cast<std::int64_t>(
                             static_cast<double>(spec.nodes) * (c + 2.0) /
                             total_w);
      assigned += comm.count;
    }
  }

  auto community_of = [&](std::int64_t node) -> std::size_t {
    for (std::size_t c = 0; c < comms.size(); ++c)
      if (node < comms[c].first + comms[c].count) return c;
    return comms.size() - 1;
  };

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(spec.edges));
  std::unordered_set<std::uint64_t> seen;
  auto key = [&](std::int64_t u, std::int64_t v) {
    const auto a = static_cast<std::uint64_t>(std::min(u, v));
    const auto b = static_cast<std::uint64_t>(std::max(u, v));
    return a * static_cast<std::uint64_t>(spec.nodes) + b;
  };

  auto add_edge = [&](std::int64_t u, std::int64_t v) {
    if (u == v || seen.count(key(u, v))) return false;
    seen.insert(key(u, v));
    edges.push_back({std::min(u, v), std::max(u, v)});
    comms[community_of(u)].endpoint_pool.push_back(u);
    comms[community_of(v)].endpoint_pool.push_back(v);
    return true;
  };

  const auto cross_target = static_cast<std::int64_t>(
      std::llround(spec.cross_fraction * static_cast<double>(spec.edges)));
  const auto cluster_target = static_cast<std::int64_t>(std::llround(
      spec.cluster_fraction * static_cast<double>(spec.edges - cross_target)));

  // 1) Topical cliques. Each community fragments into contiguous tiles of
  // cluster_size nodes; tiles are wired as complete cliques (in shuffled
  // order) until the cluster budget is spent. Clique edges carry thick
  // triangle support that partial edge removal cannot erase, while pairs
  // from two different tiles stay sparse look-alikes — the margin a link
  // predictor has to learn.
  {
    std::vector<std::pair<std::int64_t, std::int64_t>> tiles;
    for (const auto& comm : comms) {
      for (std::int64_t f = comm.first; f + 1 < comm.first + comm.count;
           f += spec.cluster_size)
        tiles.emplace_back(
            f, std::min<std::int64_t>(spec.cluster_size,
                                      comm.first + comm.count - f));
    }
    for (std::size_t i = tiles.size(); i > 1; --i)
      std::swap(tiles[i - 1], tiles[rng.index(i)]);
    std::int64_t added = 0;
    for (const auto& [f, count] : tiles) {
      if (added >= cluster_target) break;
      for (std::int64_t u = f; u < f + count && added < cluster_target; ++u)
        for (std::int64_t v = u + 1; v < f + count && added < cluster_target;
             ++v)
          if (add_edge(u, v)) ++added;
    }
  }

  // 2) Loose intra-community edges: the degree-skewed hairball wiring the
  // cliques together. Community chosen proportionally to size.
  while (static_cast<std::int64_t>(edges.size()) < spec.edges - cross_target) {
    const auto node = static_cast<std::int64_t>(
        rng.index(static_cast<std::size_t>(spec.nodes)));
    auto& comm = comms[community_of(node)];
    add_edge(pick_member(comm, spec.pa_strength, rng),
             pick_member(comm, spec.pa_strength, rng));
  }

  // 3) Cross-community bridges.
  while (static_cast<std::int64_t>(edges.size()) < spec.edges) {
    std::size_t ca = rng.index(comms.size());
    std::size_t cb = rng.index(comms.size());
    while (cb == ca) cb = rng.index(comms.size());
    add_edge(pick_member(comms[ca], spec.pa_strength, rng),
             pick_member(comms[cb], spec.pa_strength, rng));
  }

  // Community vocabularies and node word bags.
  for (auto& comm : comms) {
    comm.vocabulary.reserve(static_cast<std::size_t>(spec.words_per_community));
    for (int w = 0; w < spec.words_per_community; ++w)
      comm.vocabulary.push_back(static_cast<std::int64_t>(
          rng.index(static_cast<std::size_t>(spec.feature_dim))));
  }

  Matrix features = Matrix::Zero(spec.nodes, spec.feature_dim);
  for (std::int64_t node = 0; node < spec.nodes; ++node) {
    const auto& vocab = comms[community_of(node)].vocabulary;
    for (int w = 0; w < spec.words_per_node; ++w) {
      std::int64_t word;
      if (rng.uniform() < spec.word_noise)
        word = static_cast<std::int64_t>(
            rng.index(static_cast<std::size_t>(spec.feature_dim)));
      else
        word = vocab[rng.index(vocab.size())];
      features(node, word) = 1.0;
    }
  }

  // Pairwise topical overlap: linked pairs share a few words drawn from
  // the global dictionary, so connected nodes overlap in ways that
  // same-community strangers do not. A per-node budget keeps hub rows
  // sparse — prolific nodes stop acquiring edge words, which also leaves a
  // realistic share of unmarked (harder) pairs.
  {
    const int node_budget = 8 * spec.words_per_edge;
    std::vector<int> spent(static_cast<std::size_t>(spec.nodes), 0);
    for (const Edge& e : edges) {
      auto& su = spent[static_cast<std::size_t>(e.u)];
      auto& sv = spent[static_cast<std::size_t>(e.v)];
      if (su >= node_budget || sv >= node_budget) continue;
      for (int w = 0; w < spec.words_per_edge; ++w) {
        const auto word = static_cast<std::int64_t>(
            rng.index(static_cast<std::size_t>(spec.feature_dim)));
        features(e.u, word) = 1.0;
        features(e.v, word) = 1.0;
      }
      su += spec.words_per_edge;
      sv += spec.words_per_edge;
    }
  }

  return Graph::from_edges(spec.nodes, std::move(edges), std::move(features));
}

void write_synth_dataset(const std::string& edge_path,
                         const std::string& feature_path,
                         const SynthSpec& spec) {
  Graph g = generate_synth_graph(spec);

  std::ofstream eout(edge_path);
  if (!eout) throw Error::io("cannot open edge file for writing: " + edge_path);
  eout << "# synthetic citation-style graph: " << g.num_nodes() << " nodes, "
       << g.num_edges() << " undirected edges, seed " << spec.seed << "\n";
  for (const Edge& e : g.edge_list()) eout << e.u << "\t" << e.v << "\n";
  if (!eout) throw Error::io("failed writing edge file: " + edge_path);

  std::ofstream fout(feature_path);
  if (!fout)
    throw Error::io("cannot open feature file for writing: " + feature_path);
  const Matrix& f = g.features();
  for (std::int64_t i = 0; i < f.rows(); ++i) {
    fout << i;
    for (std::int64_t j = 0; j < f.cols(); ++j)
      fout << ',' << (f(i, j) != 0.0 ? 1 : 0);
    fout << "\n";
  }
  if (!fout) throw Error::io("failed writing feature file: " + feature_path);
}

}  // namespace mebns
