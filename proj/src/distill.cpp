#include "mebns/distill.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "mebns/error.hpp"
#include "mebns/rng.hpp"

namespace mebns {

Vector infer_scores(const ParamStore& params, const NormAdjacency& adj,
                    const Matrix& features, const SampleSet& samples) {
  Matrix emb = encode(adj, features, params);
  return score_pairs(emb, samples);
}

FilterScope filter_scope_from_name(const std::string& name) {
  if (name == "all") return FilterScope::all;
  if (name == "negatives_only") return FilterScope::negatives_only;
  throw Error::config("unknown filter scope: '" + name +
                      "' (expected all or negatives_only)");
}

const char* filter_scope_name(FilterScope s) {
  return s == FilterScope::all ? "all" : "negatives_only";
}

namespace {

// Indices of `pool` ranked by (score desc, u asc, v asc), truncated to the
// top floor(beta * |pool|).
std::vector<std::size_t> top_quota(const SampleSet& samples,
                                   const Vector& scores,
                                   const std::vector<std::size_t>& pool,
                                   double beta, double* threshold) {
  const auto quota = static_cast<std::size_t>(
      std::floor(beta * static_cast<double>(pool.size())));
  if (quota < 1)
    throw Error::config(
        "hard-sample filter would keep nothing: beta * " +
        std::to_string(pool.size()) + " < 1; raise beta");

  std::vector<std::size_t> ranked = pool;
  std::sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
    const double sa = scores[static_cast<std::int64_t>(a)];
    const double sb = scores[static_cast<std::int64_t>(b)];
    if (sa != sb) return sa > sb;
    if (samples[a].u != samples[b].u) return samples[a].u < samples[b].u;
    return samples[a].v < samples[b].v;
  });
  ranked.resize(quota);
  if (threshold)
    *threshold = scores[static_cast<std::int64_t>(ranked.back())];
  return ranked;
}

}  // namespace

FilterResult filter_hard(const SampleSet& samples, const Vector& scores,
                         double beta, FilterScope scope) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw Error::config("beta must be in (0,1]");
  if (scores.size() != static_cast<std::int64_t>(samples.size()))
    throw Error::runtime("filter_hard: scores and samples differ in length");
  if (samples.empty()) throw Error::runtime("filter_hard: empty sample set");

  FilterResult r;
  if (scope == FilterScope::all) {
    std::vector<std::size_t> pool(samples.size());
    std::iota(pool.begin(), pool.end(), 0);
    r.kept = top_quota(samples, scores, pool, beta, &r.threshold);
  } else {
    std::vector<std::size_t> negatives;
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].label == 0) negatives.push_back(i);
    if (negatives.empty())
      throw Error::runtime("filter_hard: no negatives to filter");
    r.kept = top_quota(samples, scores, negatives, beta, &r.threshold);
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].label != 0) r.kept.push_back(i);
  }
  std::sort(r.kept.begin(), r.kept.end());
  return r;
}

SampleSet select_samples(const SampleSet& samples,
                         const std::vector<std::size_t>& kept) {
  SampleSet out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(samples[i]);
  return out;
}

UncertaintyTable estimate_uncertainty(const ParamStore& params,
                                      const Graph& message,
                                      const SampleSet& samples, int n_draws,
                                      std::uint64_t seed) {
  if (n_draws < 2)
    throw Error::config("uncertainty estimation needs at least 2 draws");
  if (samples.empty())
    throw Error::runtime("uncertainty estimation: empty sample set");

  const auto n = static_cast<std::int64_t>(samples.size());
  Vector sum = Vector::Zero(n);
  Vector sum_sq = Vector::Zero(n);
  for (int d = 0; d < n_draws; ++d) {
    Rng rho_rng(mix_seed(seed, stream::dropedge_rho, static_cast<std::uint64_t>(d)));
    const double rho = rho_rng.truncated_gaussian01();
    AugmentedView view = drop_edge(
        message, rho,
        mix_seed(seed, stream::dropedge_mask, static_cast<std::uint64_t>(d)));
    NormAdjacency adj = NormAdjacency::build(view);
    Vector p = infer_scores(params, adj, message.features(), samples);
    sum += p;
    sum_sq += p.cwiseProduct(p);
  }

  UncertaintyTable t;
  t.n_draws = n_draws;
  const double inv = 1.0 / static_cast<double>(n_draws);
  Vector mean = sum * inv;
  t.b = sum_sq * inv - mean.cwiseProduct(mean);
  return t;
}

std::vector<std::size_t> collect_meta_indices(const UncertaintyTable& table,
                                              double tau) {
  if (!(tau > 0.0)) throw Error::config("tau must be > 0");
  std::vector<std::size_t> kept;
  for (std::int64_t i = 0; i < table.b.size(); ++i)
    if (table.b[i] < tau) kept.push_back(static_cast<std::size_t>(i));
  if (kept.empty())
    throw Error::runtime(
        "meta-data collection kept nothing: every sample's prediction "
        "variance is >= tau; raise tau or the number of draws");
  return kept;
}

void write_uncertainty_csv(const std::string& path, const SampleSet& samples,
                           const UncertaintyTable& table, double tau,
                           const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw Error::io("cannot open uncertainty dump for writing: " + path);
  for (const auto& h : header) out << h << "\n";
  out << "u,v,y,b,kept\n";
  char buf[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto bi = table.b[static_cast<std::int64_t>(i)];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), bi);
    out << samples[i].u << ',' << samples[i].v << ','
        << static_cast<int>(samples[i].label) << ','
        << std::string_view(buf, static_cast<std::size_t>(ptr - buf)) << ','
        << (bi < tau ? 1 : 0) << "\n";
  }
  if (!out) throw Error::io("failed writing uncertainty dump: " + path);
}

}  // namespace mebns
