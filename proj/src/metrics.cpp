#include "mebns/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mebns/error.hpp"

namespace mebns {

double auc(const std::vector<double>& positive_scores,
           const std::vector<double>& negative_scores) {
  const auto p = static_cast<double>(positive_scores.size());
  const auto n = static_cast<double>(negative_scores.size());
  if (positive_scores.empty() || negative_scores.empty())
    throw Error::runtime("auc: both classes must be non-empty");

  // Rank-sum with midranks for ties:
  //   AUC = (R_pos - P(P+1)/2) / (P*N)
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) all.push_back({s, true});
  for (double s : negative_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    // 1-based ranks i+1 .. j share the midrank.
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (all[k].positive) rank_sum_pos += midrank;
    i = j;
  }
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n);
}

double hits_at_k(const std::vector<double>& positive_scores,
                 const std::vector<double>& negative_pool, int k) {
  if (k < 1) throw Error::config("hits@k needs k >= 1");
  if (static_cast<int>(negative_pool.size()) <= k)
    throw Error::runtime("hits@k needs a negative pool larger than k, got " +
                         std::to_string(negative_pool.size()));
  if (positive_scores.empty())
    throw Error::runtime("hits@k: no positive scores");

  std::vector<double> pool = negative_pool;
  std::nth_element(pool.begin(), pool.begin() + (k - 1), pool.end(),
                   std::greater<double>());
  const double kth = pool[static_cast<std::size_t>(k - 1)];

  std::int64_t hits = 0;
  for (double s : positive_scores)
    if (s > kth) ++hits;
  return static_cast<double>(hits) /
         static_cast<double>(positive_scores.size());
}

double roc_optimal_threshold(const std::vector<double>& scores,
                             const std::vector<std::int8_t>& labels) {
  if (scores.size() != labels.size())
    throw Error::runtime("roc threshold: scores and labels differ in length");
  std::int64_t p = 0, n = 0;
  for (auto y : labels) (y ? p : n) += 1;
  if (p == 0 || n == 0)
    throw Error::runtime(
        "roc threshold undefined: needs both classes present");

  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    all[i] = {scores[i], labels[i] != 0};
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score > b.score; });

  // Sweep candidate thresholds (the distinct scores) from high to low; at
  // threshold t everything scoring >= t is predicted positive. On equal
  // objective the later (smaller) threshold wins.
  double best_t = all.front().score;
  double best_j = -2.0;
  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) {
      if (all[j].positive)
        ++tp;
      else
        ++fp;
      ++j;
    }
    const double jstat = static_cast<double>(tp) / static_cast<double>(p) -
                         static_cast<double>(fp) / static_cast<double>(n);
    if (jstat > best_j || (jstat == best_j && all[i].score < best_t)) {
      best_j = jstat;
      best_t = all[i].score;
    }
    i = j;
  }
  return best_t;
}

}  // namespace mebns
