#include "mebns/gcn.hpp"

#include <cmath>

#include "mebns/error.hpp"
#include "mebns/rng.hpp"

namespace mebns {

namespace {

Matrix glorot(std::int64_t rows, std::int64_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t c = 0; c < cols; ++c)
      m(r, c) = rng.uniform(-limit, limit);
  return m;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// softplus(z) - y*z, evaluated without overflow for any z.
double ce_from_logit(double z, double y) {
  const double sp = z > 0.0 ? z + std::log1p(std::exp(-z))
                            : std::log1p(std::exp(z));
  return sp - y * z;
}

}  // namespace

ParamStore init_gcn_params(const GcnDims& dims, std::uint64_t seed) {
  if (dims.in <= 0 || dims.hidden <= 0 || dims.out <= 0)
    throw Error::config("encoder dims must be positive");
  Rng rng(seed);
  ParamStore p;
  p.add(kGcnW1, glorot(dims.in, dims.hidden, rng));
  p.add(kGcnW2, glorot(dims.hidden, dims.out, rng));
  return p;
}

GcnDims gcn_dims_of(const ParamStore& params) {
  const Matrix& w1 = params.at(kGcnW1);
  const Matrix& w2 = params.at(kGcnW2);
  if (w1.cols() != w2.rows())
    throw Error::runtime("encoder weight shapes are inconsistent");
  return {w1.rows(), w1.cols(), w2.cols()};
}

PassCounters& pass_counters() {
  static PassCounters counters;
  return counters;
}

void reset_pass_counters() { pass_counters() = PassCounters{}; }

Matrix encode(const NormAdjacency& adj, const Matrix& features,
              const ParamStore& params, EncodeCache* cache) {
  const Matrix& w1 = params.at(kGcnW1);
  const Matrix& w2 = params.at(kGcnW2);
  if (features.cols() != w1.rows())
    throw Error::runtime("feature width does not match encoder input dim");
  if (features.rows() != adj.num_nodes())
    throw Error::runtime("feature rows do not match graph node count");

  ++pass_counters().forward;
  Matrix z1 = adj.multiply(features * w1);
  Matrix h1 = z1.cwiseMax(0.0);
  Matrix h2 = adj.multiply(h1 * w2);
  if (cache) {
    cache->z1 = std::move(z1);
    cache->h1 = h1;
    cache->h2 = h2;
  }
  return h2;
}

Matrix encode_jvp(const NormAdjacency& adj, const Matrix& features,
                  const ParamStore& params, const ParamStore& direction,
                  const EncodeCache& cache) {
  const Matrix& w2 = params.at(kGcnW2);
  const Matrix& dw1 = direction.at(kGcnW1);
  const Matrix& dw2 = direction.at(kGcnW2);

  ++pass_counters().jvp;
  Matrix dz1 = adj.multiply(features * dw1);
  // relu passes the tangent through exactly where the primal was active.
  Matrix dh1 =
      dz1.cwiseProduct((cache.z1.array() > 0.0).cast<double>().matrix());
  return adj.multiply(dh1 * w2 + cache.h1 * dw2);
}

Vector pair_logits(const Matrix& embeddings, const SampleSet& pairs) {
  Vector z(static_cast<std::int64_t>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Sample& s = pairs[i];
    z[static_cast<std::int64_t>(i)] =
        embeddings.row(s.u).dot(embeddings.row(s.v));
  }
  return z;
}

Vector score_pairs(const Matrix& embeddings, const SampleSet& pairs) {
  Vector z = pair_logits(embeddings, pairs);
  for (std::int64_t i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
  return z;
}

BceResult bce_loss(const Vector& scores,
                   const std::vector<std::int8_t>& labels) {
  if (scores.size() != static_cast<std::int64_t>(labels.size()))
    throw Error::runtime("bce_loss: scores and labels differ in length");
  if (scores.size() == 0) throw Error::runtime("bce_loss: empty batch");
  constexpr double lo = 1e-12, hi = 1.0 - 1e-12;
  BceResult r;
  r.per_sample.resize(scores.size());
  for (std::int64_t i = 0; i < scores.size(); ++i) {
    const double s = std::min(hi, std::max(lo, scores[i]));
    const double y = static_cast<double>(labels[static_cast<std::size_t>(i)]);
    r.per_sample[i] = -(y * std::log(s) + (1.0 - y) * std::log(1.0 - s));
  }
  r.mean = r.per_sample.mean();
  return r;
}

Vector bce_from_logits(const Vector& logits,
                       const std::vector<std::int8_t>& labels) {
  if (logits.size() != static_cast<std::int64_t>(labels.size()))
    throw Error::runtime("bce_from_logits: logits and labels differ in length");
  Vector out(logits.size());
  for (std::int64_t i = 0; i < logits.size(); ++i)
    out[i] = ce_from_logit(
        logits[i], static_cast<double>(labels[static_cast<std::size_t>(i)]));
  return out;
}

LinkLoss::LinkLoss(const NormAdjacency& adj, const Matrix& features,
                   const SampleSet& samples, const Vector* weights)
    : adj_(adj), features_(features), samples_(samples), weights_(weights) {
  if (samples_.empty()) throw Error::runtime("link loss: empty sample set");
  if (weights_ && weights_->size() != static_cast<std::int64_t>(samples.size()))
    throw Error::runtime("link loss: weight vector length mismatch");
}

double LinkLoss::value(const ParamStore& params) const {
  Matrix emb = encode(adj_, features_, params);
  Vector z = pair_logits(emb, samples_);
  double acc = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const double w =
        weights_ ? (*weights_)[static_cast<std::int64_t>(i)] : 1.0;
    acc += w * ce_from_logit(z[static_cast<std::int64_t>(i)],
                             static_cast<double>(samples_[i].label));
  }
  return acc / static_cast<double>(samples_.size());
}

Vector LinkLoss::per_sample(const ParamStore& params) const {
  Matrix emb = encode(adj_, features_, params);
  return bce_from_logits(pair_logits(emb, samples_), labels_of(samples_));
}

GradientBundle LinkLoss::gradients(const ParamStore& params) const {
  const Matrix& w2 = params.at(kGcnW2);

  EncodeCache cache;
  encode(adj_, features_, params, &cache);
  Vector z = pair_logits(cache.h2, samples_);

  ++pass_counters().backward;
  const auto n = static_cast<double>(samples_.size());
  double loss = 0.0;
  // d(loss)/d(embeddings): scatter each pair's contribution to both ends.
  Matrix dh2 = Matrix::Zero(cache.h2.rows(), cache.h2.cols());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    const auto zi = z[static_cast<std::int64_t>(i)];
    const double y = static_cast<double>(s.label);
    const double w =
        weights_ ? (*weights_)[static_cast<std::int64_t>(i)] : 1.0;
    loss += w * ce_from_logit(zi, y);
    const double dz = w * (sigmoid(zi) - y) / n;
    dh2.row(s.u) += dz * cache.h2.row(s.v);
    dh2.row(s.v) += dz * cache.h2.row(s.u);
  }
  loss /= n;

  // A_hat is symmetric, so the adjoint of multiply is multiply.
  Matrix dp1 = adj_.multiply(dh2);
  Matrix gw2 = cache.h1.transpose() * dp1;
  Matrix dh1 = dp1 * w2.transpose();
  Matrix dz1 =
      dh1.cwiseProduct((cache.z1.array() > 0.0).cast<double>().matrix());
  Matrix dp0 = adj_.multiply(dz1);
  Matrix gw1 = features_.transpose() * dp0;

  GradientBundle b;
  b.loss = loss;
  b.grads.add(kGcnW1, std::move(gw1));
  b.grads.add(kGcnW2, std::move(gw2));
  return b;
}

}  // namespace mebns
