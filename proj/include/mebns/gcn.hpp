#pragma once

#include <cstdint>

#include "mebns/grad.hpp"
#include "mebns/graph.hpp"
#include "mebns/params.hpp"
#include "mebns/samples.hpp"

namespace mebns {

// Two-layer graph convolutional encoder with an inner-product edge decoder.
//   H1 = relu(A_hat (X W1)),  H = A_hat (H1 W2),  score(u,v) = sigmoid(h_u . h_v)
// No biases, no dropout; message passing always runs on the training-split
// adjacency handed in by the caller.
struct GcnDims {
  std::int64_t in = 0;
  std::int64_t hidden = 128;
  std::int64_t out = 64;
};

inline constexpr const char* kGcnW1 = "gcn.w1";
inline constexpr const char* kGcnW2 = "gcn.w2";

// Glorot-uniform initialization, seeded.
ParamStore init_gcn_params(const GcnDims& dims, std::uint64_t seed);

GcnDims gcn_dims_of(const ParamStore& params);

// Intermediates kept around for the backward and directional passes.
struct EncodeCache {
  Matrix z1;  // pre-activation of layer 1
  Matrix h1;  // relu(z1)
  Matrix h2;  // final embeddings
};

Matrix encode(const NormAdjacency& adj, const Matrix& features,
              const ParamStore& params, EncodeCache* cache = nullptr);

// Forward-mode pass: the directional derivative of the embeddings along a
// parameter-space direction, reusing the primal intermediates. This is what
// lets the one-step meta gradient touch the encoder only once per
// per-sample dot product batch instead of once per sample.
Matrix encode_jvp(const NormAdjacency& adj, const Matrix& features,
                  const ParamStore& params, const ParamStore& direction,
                  const EncodeCache& cache);

// Raw decoder logits h_u . h_v for each pair.
Vector pair_logits(const Matrix& embeddings, const SampleSet& pairs);

// sigmoid(logit) for each pair; in (0,1) up to floating-point saturation.
Vector score_pairs(const Matrix& embeddings, const SampleSet& pairs);

// Point-wise binary cross-entropy on probabilities, clamped away from 0/1.
struct BceResult {
  Vector per_sample;
  double mean = 0.0;
};
BceResult bce_loss(const Vector& scores, const std::vector<std::int8_t>& labels);

// Per-sample cross-entropy computed from logits in the softplus form the
// training path uses (same gradients as bce_loss, stable everywhere).
Vector bce_from_logits(const Vector& logits,
                       const std::vector<std::int8_t>& labels);

// Weighted mean cross-entropy of the encoder scores on a sample set:
//   L(params) = (1/n) sum_i w_i * ce(score_i, y_i)
// `weights == nullptr` means unit weights. This one objective drives both
// training phases (the first phase simply passes unit weights), so the two
// phases share every line of numeric code.
class LinkLoss final : public LossFunction {
 public:
  LinkLoss(const NormAdjacency& adj, const Matrix& features,
           const SampleSet& samples, const Vector* weights = nullptr);

  double value(const ParamStore& params) const override;
  GradientBundle gradients(const ParamStore& params) const override;

  // Per-sample unweighted losses at `params` (one forward pass).
  Vector per_sample(const ParamStore& params) const;

 private:
  const NormAdjacency& adj_;
  const Matrix& features_;
  const SampleSet& samples_;
  const Vector* weights_;
};

// Encoder pass counters, for tests that pin the per-iteration budget.
struct PassCounters {
  std::int64_t forward = 0;
  std::int64_t backward = 0;
  std::int64_t jvp = 0;
};
PassCounters& pass_counters();
void reset_pass_counters();

}  // namespace mebns
