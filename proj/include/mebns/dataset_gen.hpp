#pragma once

#include <cstdint>
#include <string>

#include "mebns/graph.hpp"

namespace mebns {

// Deterministic generator for benchmark-shaped citation-style graphs:
// unevenly sized communities that fragment into small dense topical
// clusters, preferential-attachment degree skew, a controlled fraction of
// cross-community edges, and sparse binary bag-of-words features
// correlated with community membership. The clusters give true edges thick
// triangle support that survives edge held-out splits, while same-community
// pairs from different clusters stay near-miss look-alikes — the margin a
// link predictor has to learn. Defaults are calibrated to the 2708-node /
// 10556-edge / 1433-feature scale.
struct SynthSpec {
  std::int64_t nodes = 2708;
  std::int64_t edges = 10556;
  std::int64_t feature_dim = 1433;
  int communities = 7;
  double cross_fraction = 0.08;    // edges bridging two communities
  double pa_strength = 0.6;        // chance an endpoint is degree-biased
  double cluster_fraction = 0.45;  // community edges wired into cliques
  int cluster_size = 5;            // nodes per topical cluster
  int words_per_node = 18;
  int words_per_community = 160;   // community vocabulary size
  double word_noise = 0.35;        // chance a word is drawn globally
  int words_per_edge = 3;          // topical words shared by linked nodes
  std::uint64_t seed = 1;
};

// Builds the graph in memory (features attached).
Graph generate_synth_graph(const SynthSpec& spec);

// Writes edge TSV + feature CSV in the loader's input formats.
void write_synth_dataset(const std::string& edge_path,
                         const std::string& feature_path,
                         const SynthSpec& spec);

}  // namespace mebns
