#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mebns/gcn.hpp"
#include "mebns/graph.hpp"
#include "mebns/params.hpp"
#include "mebns/samples.hpp"

namespace mebns {

// Scores every sample under the given parameters on the message adjacency.
Vector infer_scores(const ParamStore& params, const NormAdjacency& adj,
                    const Matrix& features, const SampleSet& samples);

enum class FilterScope : std::uint8_t { all, negatives_only };

FilterScope filter_scope_from_name(const std::string& name);
const char* filter_scope_name(FilterScope s);

// Keeps the highest-scoring floor(beta * n) samples ("hard" under the
// scoring model - easy well-separated ones fall away). Ranking ties break
// by (score desc, u asc, v asc); the returned indices are in the original
// input order, so beta = 1 is the identity. With negatives_only scope all
// positives survive and the quota applies to the negatives alone.
struct FilterResult {
  std::vector<std::size_t> kept;  // indices into the input set, ascending
  double threshold = 0.0;         // score of the last sample admitted
};

FilterResult filter_hard(const SampleSet& samples, const Vector& scores,
                         double beta, FilterScope scope = FilterScope::all);

SampleSet select_samples(const SampleSet& samples,
                         const std::vector<std::size_t>& kept);

// Prediction spread under repeated DropEdge augmentations: each draw
// samples a drop rate from a standard Gaussian truncated to [0,1], masks
// the message graph, re-encodes with the *same* parameters, and scores the
// set. `b` is the population variance over draws, in [0, 0.25].
struct UncertaintyTable {
  Vector b;
  int n_draws = 0;
};

UncertaintyTable estimate_uncertainty(const ParamStore& params,
                                      const Graph& message,
                                      const SampleSet& samples, int n_draws,
                                      std::uint64_t seed);

// Low-variance ("stable") samples: b < tau, strictly. Indices ascending.
std::vector<std::size_t> collect_meta_indices(const UncertaintyTable& table,
                                              double tau);

// Dumps u,v,y,b,kept rows for auditability.
void write_uncertainty_csv(const std::string& path, const SampleSet& samples,
                           const UncertaintyTable& table, double tau,
                           const std::vector<std::string>& header);

}  // namespace mebns
