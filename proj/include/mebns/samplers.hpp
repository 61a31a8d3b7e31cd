#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mebns/graph.hpp"
#include "mebns/samples.hpp"

namespace mebns {

// Scores a node pair under the current model; used by dynamic sampling.
using PairScorer = std::function<double(std::int64_t, std::int64_t)>;

enum class SamplerKind : std::uint8_t { uniform, pns, dns };

SamplerKind sampler_kind_from_name(const std::string& name);
const char* sampler_kind_name(SamplerKind k);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::uniform;
  double delta = 0.0;        // structure-aware mixture rate in [0,1]
  int khops = 3;             // BFS radius for the structure component (>= 2)
  int dns_pool = 8;          // candidate pool size for dynamic sampling
  double pns_exponent = 0.75;
};

// Validity checks for every drawn negative consult the *full* edge set
// (train + valid + test), never the message graph, so no true edge from any
// split can leak in as a negative.
//
// Per-positive determinism: positive i draws from its own seeded substream,
// so sampler output is invariant to how other positives consumed
// randomness. One negative per positive; an epoch's negatives never repeat
// an unordered pair (drawn pairs are rejected against the epoch's dedup
// set as well as the edge set). A draw that fails 100 times raises.

SampleSet sample_uniform(const Graph& full, const SampleSet& positives,
                         std::uint64_t seed);

// Degree-biased sampling, degree^exponent over the message graph; nodes
// isolated in the message graph carry zero weight and are never drawn.
SampleSet sample_pns(const Graph& full, const Graph& message,
                     const SampleSet& positives, double exponent,
                     std::uint64_t seed);

// Dynamic sampling: draw `pool` uniform valid candidates and keep the one
// the scorer ranks highest (ties to the smaller node id). pool == 1 is
// exactly sample_uniform.
SampleSet sample_dns(const Graph& full, const SampleSet& positives,
                     const PairScorer& scorer, int pool, std::uint64_t seed);

// Lazily computed per-node candidate sets at hop distance [2, k] on the
// message graph, pre-filtered against the full edge set.
class KHopCache {
 public:
  KHopCache(const Graph& full, const Graph& message, int khops);

  const std::vector<std::int64_t>& candidates(std::int64_t u) const;
  int khops() const { return khops_; }

 private:
  const Graph& full_;
  const Graph& message_;
  int khops_;
  mutable std::vector<std::unique_ptr<std::vector<std::int64_t>>> sets_;
};

// The structure-aware mixture: for each positive, an independent coin with
// probability delta selects a draw from the k-hop candidate set of the
// positive's first endpoint (provenance "khop"); otherwise - and whenever
// the candidate set is empty - the base sampler draws (provenance of the
// base kind). The coin consumes its own substream, so delta = 0 reproduces
// the base sampler exactly. `scorer` may be null unless kind == dns.
SampleSet std_generate(const Graph& full, const Graph& message,
                       const SampleSet& positives, const SamplerConfig& config,
                       const PairScorer& scorer, const KHopCache& khop,
                       std::uint64_t seed);

}  // namespace mebns
