#pragma once

#include <cstdint>
#include <vector>

namespace mebns {

// Exact rank-based AUC with midrank tie handling: equals the probability a
// random positive outscores a random negative, ties counting one half.
double auc(const std::vector<double>& positive_scores,
           const std::vector<double>& negative_scores);

// Fraction of positives scoring strictly above the k-th largest score in
// the shared negative pool. Requires pool size > k.
double hits_at_k(const std::vector<double>& positive_scores,
                 const std::vector<double>& negative_pool, int k);

// Threshold maximizing TPR - FPR over the distinct scores as candidate
// thresholds, predicting positive at score >= threshold. Ties prefer the
// smallest threshold. Needs both classes present.
double roc_optimal_threshold(const std::vector<double>& scores,
                             const std::vector<std::int8_t>& labels);

}  // namespace mebns
