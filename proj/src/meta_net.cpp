#include "mebns/meta_net.hpp"

#include <cmath>

#include "mebns/error.hpp"
#include "mebns/rng.hpp"

namespace mebns {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct MetaForward {
  Vector z1, a1;
  double z2 = 0.0;
  double out = 0.0;
};

MetaForward meta_forward(double loss, const ParamStore& delta) {
  const Matrix& w1 = delta.at(kMetaW1);
  const Matrix& b1 = delta.at(kMetaB1);
  const Matrix& w2 = delta.at(kMetaW2);
  const Matrix& b2 = delta.at(kMetaB2);

  MetaForward f;
  f.z1 = w1.col(0) * loss + b1.col(0);
  f.a1 = f.z1.cwiseMax(0.0);
  f.z2 = w2.row(0).dot(f.a1) + b2(0, 0);
  f.out = sigmoid(f.z2);
  return f;
}

}  // namespace

ParamStore init_meta_params(std::uint64_t seed, std::int64_t hidden) {
  if (hidden <= 0) throw Error::config("meta net hidden width must be > 0");
  Rng rng(seed);
  ParamStore p;
  Matrix w1(hidden, 1), w2(1, hidden);
  for (std::int64_t i = 0; i < hidden; ++i) w1(i, 0) = rng.uniform(-0.01, 0.01);
  for (std::int64_t i = 0; i < hidden; ++i) w2(0, i) = rng.uniform(-0.01, 0.01);
  p.add(kMetaW1, std::move(w1));
  p.add(kMetaB1, Matrix::Zero(hidden, 1));
  p.add(kMetaW2, std::move(w2));
  p.add(kMetaB2, Matrix::Zero(1, 1));
  return p;
}

double meta_weight(double loss, const ParamStore& delta) {
  return meta_forward(loss, delta).out;
}

Vector meta_weight_batch(const Vector& losses, const ParamStore& delta) {
  Vector out(losses.size());
  for (std::int64_t i = 0; i < losses.size(); ++i)
    out[i] = meta_weight(losses[i], delta);
  return out;
}

ParamStore meta_weight_param_grad(double loss, const ParamStore& delta) {
  const MetaForward f = meta_forward(loss, delta);
  const Matrix& w2 = delta.at(kMetaW2);

  const double dsig = f.out * (1.0 - f.out);
  Vector mask = (f.z1.array() > 0.0).cast<double>();
  Vector r = dsig * w2.row(0).transpose().cwiseProduct(mask);

  ParamStore g = delta.zeros_like();
  g.at(kMetaW1).col(0) = r * loss;
  g.at(kMetaB1).col(0) = r;
  g.at(kMetaW2).row(0) = dsig * f.a1.transpose();
  g.at(kMetaB2)(0, 0) = dsig;
  return g;
}

}  // namespace mebns
