// Seeded synthetic citation-style dataset generator: community-structured
// preferential-attachment graph plus bag-of-words features, written in the
// loader's edge-TSV / feature-CSV formats.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mebns/dataset_gen.hpp"
#include "mebns/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mebns-synth: synthetic link-prediction dataset generator"};

  mebns::SynthSpec spec;
  std::string edges_out, features_out;
  app.add_option("--nodes", spec.nodes, "node count (default 2708)");
  app.add_option("--edges", spec.edges, "undirected edge count (default 10556)");
  app.add_option("--feature-dim", spec.feature_dim,
                 "binary feature width (default 1433)");
  app.add_option("--communities", spec.communities,
                 "community count (default 7)");
  app.add_option("--cross-fraction", spec.cross_fraction,
                 "fraction of edges bridging two communities (default 0.08)");
  app.add_option("--pa-strength", spec.pa_strength,
                 "chance an endpoint is drawn degree-biased (default 0.6)");
  app.add_option("--cluster-fraction", spec.cluster_fraction,
                 "share of community edges wired into dense topical cliques "
                 "(default 0.45)");
  app.add_option("--cluster-size", spec.cluster_size,
                 "nodes per topical cluster (default 5)");
  app.add_option("--words-per-node", spec.words_per_node,
                 "feature words per node (default 18)");
  app.add_option("--words-per-community", spec.words_per_community,
                 "community vocabulary size (default 160)");
  app.add_option("--word-noise", spec.word_noise,
                 "chance a word is drawn globally instead (default 0.35)");
  app.add_option("--words-per-edge", spec.words_per_edge,
                 "topical words shared by each linked pair (default 5)");
  app.add_option("--seed", spec.seed, "generator seed (default 1)");
  app.add_option("--edges-out", edges_out, "edge TSV path")->required();
  app.add_option("--features-out", features_out, "feature CSV path")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    mebns::write_synth_dataset(edges_out, features_out, spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << edges_out << " and " << features_out << "\n";
  return 0;
}
