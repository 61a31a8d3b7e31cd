#include "mebns/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mebns/error.hpp"
#include "mebns/rng.hpp"

namespace mebns {

SamplerKind sampler_kind_from_name(const std::string& name) {
  if (name == "uniform") return SamplerKind::uniform;
  if (name == "pns") return SamplerKind::pns;
  if (name == "dns") return SamplerKind::dns;
  throw Error::config("unknown sampler kind: '" + name +
                      "' (expected uniform, pns, or dns)");
}

const char* sampler_kind_name(SamplerKind k) {
  switch (k) {
    case SamplerKind::uniform: return "uniform";
    case SamplerKind::pns: return "pns";
    case SamplerKind::dns: return "dns";
  }
  return "?";
}

namespace {

constexpr int kMaxAttempts = 100;

// Unordered pairs already used this epoch (positives are not tracked; a
// negative colliding with a true edge is rejected by the edge check).
class EpochDedup {
 public:
  explicit EpochDedup(std::int64_t n) : n_(n) {}

  bool contains(std::int64_t u, std::int64_t v) const {
    return used_.count(key(u, v)) > 0;
  }
  void insert(std::int64_t u, std::int64_t v) { used_.insert(key(u, v)); }

 private:
  std::uint64_t key(std::int64_t u, std::int64_t v) const {
    const auto a = static_cast<std::uint64_t>(std::min(u, v));
    const auto b = static_cast<std::uint64_t>(std::max(u, v));
    return a * static_cast<std::uint64_t>(n_) + b;
  }

  std::int64_t n_;
  std::unordered_set<std::uint64_t> used_;
};

[[noreturn]] void sampling_failed(const Sample& pos, const char* how) {
  throw Error::runtime("negative sampling failed for positive (" +
                       std::to_string(pos.u) + ", " + std::to_string(pos.v) +
                       "): " + std::to_string(kMaxAttempts) + " " + how +
                       " draws rejected (node nearly saturated?)");
}

bool valid_negative(const Graph& full, const EpochDedup& dedup, std::int64_t u,
                    std::int64_t v) {
  return v != u && !full.has_edge(u, v) && !dedup.contains(u, v);
}

std::int64_t draw_uniform(const Graph& full, const EpochDedup& dedup,
                          const Sample& pos, Rng& rng) {
  const auto n = static_cast<std::size_t>(full.num_nodes());
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const auto v = static_cast<std::int64_t>(rng.index(n));
    if (valid_negative(full, dedup, pos.u, v)) return v;
  }
  sampling_failed(pos, "uniform");
}

struct PnsTable {
  std::vector<double> cumulative;
  double total = 0.0;
};

PnsTable build_pns_table(const Graph& message, double exponent) {
  PnsTable t;
  t.cumulative.resize(message.num_nodes());
  double acc = 0.0;
  for (std::int64_t i = 0; i < message.num_nodes(); ++i) {
    const auto d = static_cast<double>(message.degree(i));
    acc += d > 0.0 ? std::pow(d, exponent) : 0.0;  // isolated: weight 0
    t.cumulative[i] = acc;
  }
  t.total = acc;
  if (!(t.total > 0.0))
    throw Error::runtime(
        "degree-biased sampling impossible: every node is isolated in the "
        "message graph");
  return t;
}

std::int64_t draw_pns(const Graph& full, const PnsTable& table,
                      const EpochDedup& dedup, const Sample& pos, Rng& rng) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const double r = rng.uniform() * table.total;
    const auto it = std::upper_bound(table.cumulative.begin(),
                                     table.cumulative.end(), r);
    const auto v = static_cast<std::int64_t>(it - table.cumulative.begin());
    if (v < full.num_nodes() && valid_negative(full, dedup, pos.u, v)) return v;
  }
  sampling_failed(pos, "degree-biased");
}

std::int64_t draw_dns(const Graph& full, const PairScorer& scorer,
                      const EpochDedup& dedup, const Sample& pos, int pool,
                      Rng& rng) {
  std::int64_t best = -1;
  double best_score = 0.0;
  for (int c = 0; c < pool; ++c) {
    const std::int64_t cand = draw_uniform(full, dedup, pos, rng);
    const double score = scorer(pos.u, cand);
    if (best < 0 || score > best_score ||
        (score == best_score && cand < best)) {
      best = cand;
      best_score = score;
    }
  }
  return best;
}

struct BaseDrawer {
  const Graph& full;
  const SamplerConfig& config;
  const PairScorer* scorer = nullptr;
  PnsTable pns_table;

  std::int64_t draw(const EpochDedup& dedup, const Sample& pos,
                    Rng& rng) const {
    switch (config.kind) {
      case SamplerKind::uniform:
        return draw_uniform(full, dedup, pos, rng);
      case SamplerKind::pns:
        return draw_pns(full, pns_table, dedup, pos, rng);
      case SamplerKind::dns:
        return draw_dns(full, *scorer, dedup, pos, config.dns_pool, rng);
    }
    throw Error::runtime("unreachable sampler kind");
  }

  Provenance provenance() const {
    switch (config.kind) {
      case SamplerKind::uniform: return Provenance::uniform;
      case SamplerKind::pns: return Provenance::pns;
      case SamplerKind::dns: return Provenance::dns;
    }
    return Provenance::uniform;
  }
};

BaseDrawer make_base_drawer(const Graph& full, const Graph& message,
                            const SamplerConfig& config,
                            const PairScorer* scorer) {
  BaseDrawer d{full, config, nullptr, {}};
  if (config.kind == SamplerKind::pns)
    d.pns_table = build_pns_table(message, config.pns_exponent);
  if (config.kind == SamplerKind::dns) {
    if (!scorer || !*scorer)
      throw Error::config("dynamic sampling requires a pair scorer");
    if (config.dns_pool < 1)
      throw Error::config("dns pool size must be >= 1");
    d.scorer = scorer;
  }
  return d;
}

SampleSet run_base_sampler(const Graph& full, const Graph& message,
                           const SampleSet& positives,
                           const SamplerConfig& config,
                           const PairScorer* scorer, std::uint64_t seed) {
  const BaseDrawer drawer = make_base_drawer(full, message, config, scorer);
  EpochDedup dedup(full.num_nodes());
  SampleSet out;
  out.reserve(positives.size());
  for (std::size_t i = 0; i < positives.size(); ++i) {
    Rng rng(mix_seed(seed, stream::sample_draw, i));
    const std::int64_t v = drawer.draw(dedup, positives[i], rng);
    dedup.insert(positives[i].u, v);
    out.push_back({positives[i].u, v, 0, drawer.provenance()});
  }
  return out;
}

}  // namespace

SampleSet sample_uniform(const Graph& full, const SampleSet& positives,
                         std::uint64_t seed) {
  SamplerConfig c;
  c.kind = SamplerKind::uniform;
  return run_base_sampler(full, full, positives, c, nullptr, seed);
}

SampleSet sample_pns(const Graph& full, const Graph& message,
                     const SampleSet& positives, double exponent,
                     std::uint64_t seed) {
  SamplerConfig c;
  c.kind = SamplerKind::pns;
  c.pns_exponent = exponent;
  return run_base_sampler(full, message, positives, c, nullptr, seed);
}

SampleSet sample_dns(const Graph& full, const SampleSet& positives,
                     const PairScorer& scorer, int pool, std::uint64_t seed) {
  SamplerConfig c;
  c.kind = SamplerKind::dns;
  c.dns_pool = pool;
  return run_base_sampler(full, full, positives, c, &scorer, seed);
}

KHopCache::KHopCache(const Graph& full, const Graph& message, int khops)
    : full_(full), message_(message), khops_(khops) {
  if (khops < 2) throw Error::config("k-hop radius must be >= 2");
  sets_.resize(static_cast<std::size_t>(message.num_nodes()));
}

const std::vector<std::int64_t>& KHopCache::candidates(std::int64_t u) const {
  auto& slot = sets_[static_cast<std::size_t>(u)];
  if (!slot) {
    auto raw = k_hop_candidates(message_, u, khops_);
    auto filtered = std::make_unique<std::vector<std::int64_t>>();
    filtered->reserve(raw.size());
    for (std::int64_t c : raw)
      if (!full_.has_edge(u, c)) filtered->push_back(c);
    slot = std::move(filtered);
  }
  return *slot;
}

SampleSet std_generate(const Graph& full, const Graph& message,
                       const SampleSet& positives, const SamplerConfig& config,
                       const PairScorer& scorer, const KHopCache& khop,
                       std::uint64_t seed) {
  if (!(config.delta >= 0.0 && config.delta <= 1.0))
    throw Error::config("sampler delta must be in [0, 1]");
  const PairScorer* scorer_ptr = scorer ? &scorer : nullptr;
  const BaseDrawer drawer = make_base_drawer(full, message, config, scorer_ptr);

  EpochDedup dedup(full.num_nodes());
  SampleSet out;
  out.reserve(positives.size());
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const Sample& pos = positives[i];
    // The mixture coin has its own stream: with delta = 0 the draw stream
    // consumption is identical to running the base sampler directly.
    Rng coin(mix_seed(seed, stream::sample_coin, i));
    const bool want_khop = coin.uniform() < config.delta;

    Rng rng(mix_seed(seed, stream::sample_draw, i));
    std::int64_t v = -1;
    Provenance origin = drawer.provenance();
    if (want_khop) {
      const auto& cands = khop.candidates(pos.u);
      if (!cands.empty()) {
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
          const std::int64_t c =
              cands[rng.index(cands.size())];  // pre-filtered against E
          if (!dedup.contains(pos.u, c)) {
            v = c;
            origin = Provenance::khop;
            break;
          }
        }
      }
    }
    if (v < 0) v = drawer.draw(dedup, pos, rng);

    dedup.insert(pos.u, v);
    out.push_back({pos.u, v, 0, origin});
  }
  return out;
}

}  // namespace mebns
