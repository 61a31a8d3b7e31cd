#include <doctest.h>

#include <cmath>
#include <vector>

#include "mebns/error.hpp"
#include "mebns/gcn.hpp"
#include "mebns/grad.hpp"
#include "mebns/graph.hpp"
#include "mebns/rng.hpp"

#include "support/fd.hpp"
#include "support/toys.hpp"

using mebns::EncodeCache;
using mebns::Error;
using mebns::GcnDims;
using mebns::GradientBundle;
using mebns::Graph;
using mebns::LinkLoss;
using mebns::Matrix;
using mebns::NormAdjacency;
using mebns::ParamStore;
using mebns::Sample;
using mebns::SampleSet;
using mebns::Vector;

namespace {

Matrix random_features(std::int64_t n, std::int64_t f, std::uint64_t seed) {
  mebns::Rng rng(seed);
  Matrix x(n, f);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < f; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
  return x;
}

// 6-node test bed with a mixed positive/negative sample set.
struct TinyProblem {
  Graph g = testsupport::toy_graph(
      6, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
  Matrix x = random_features(6, 3, 21);
  NormAdjacency adj = NormAdjacency::build(g);
  SampleSet samples = {{0, 1, 1, mebns::Provenance::positive},
                       {2, 3, 1, mebns::Provenance::positive},
                       {4, 5, 1, mebns::Provenance::positive},
                       {0, 5, 0, mebns::Provenance::uniform},
                       {1, 4, 0, mebns::Provenance::uniform}};
  ParamStore params = mebns::init_gcn_params({3, 4, 2}, 77);
};

}  // namespace

TEST_CASE("initialization draws inside the glorot bound") {
  const ParamStore p = mebns::init_gcn_params({10, 8, 4}, 3);
  const double lim1 = std::sqrt(6.0 / (10 + 8));
  const double lim2 = std::sqrt(6.0 / (8 + 4));
  CHECK(p.at(mebns::kGcnW1).cwiseAbs().maxCoeff() <= lim1);
  CHECK(p.at(mebns::kGcnW2).cwiseAbs().maxCoeff() <= lim2);
  // Same seed, same matrices; different seed, different matrices.
  CHECK(p == mebns::init_gcn_params({10, 8, 4}, 3));
  CHECK_FALSE(p == mebns::init_gcn_params({10, 8, 4}, 4));

  const GcnDims dims = mebns::gcn_dims_of(p);
  CHECK(dims.in == 10);
  CHECK(dims.hidden == 8);
  CHECK(dims.out == 4);
  CHECK_THROWS_AS(mebns::init_gcn_params({0, 8, 4}, 3), Error);
}

TEST_CASE("encoder matches the dense two-layer formula") {
  TinyProblem t;
  EncodeCache cache;
  const Matrix h = mebns::encode(t.adj, t.x, t.params, &cache);

  // Dense replica of the same computation.
  Matrix ahat(6, 6);
  for (int u = 0; u < 6; ++u)
    for (int v = 0; v < 6; ++v) ahat(u, v) = t.adj.entry(u, v);
  const Matrix z1 = ahat * (t.x * t.params.at(mebns::kGcnW1));
  const Matrix h1 = z1.cwiseMax(0.0);
  const Matrix h2 = ahat * (h1 * t.params.at(mebns::kGcnW2));

  CHECK((h - h2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((cache.z1 - z1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((cache.h1 - h1).cwiseAbs().maxCoeff() < 1e-12);

  // Dim mismatches are hard errors, not silent broadcasts.
  CHECK_THROWS_AS(mebns::encode(t.adj, random_features(6, 5, 1), t.params),
                  Error);
  CHECK_THROWS_AS(mebns::encode(t.adj, random_features(4, 3, 1), t.params),
                  Error);
}

TEST_CASE("relabeling the nodes relabels the embeddings") {
  // Star around node 0, then the same star with ids 0 and 3 swapped.
  const std::vector<std::int64_t> perm = {3, 1, 2, 0};
  Graph g1 = testsupport::toy_graph(4, {{0, 1}, {0, 2}, {0, 3}});
  Graph g2 = testsupport::toy_graph(4, {{3, 1}, {3, 2}, {3, 0}});
  const Matrix x1 = random_features(4, 3, 5);
  Matrix x2(4, 3);
  for (int i = 0; i < 4; ++i) x2.row(perm[i]) = x1.row(i);

  const ParamStore params = mebns::init_gcn_params({3, 4, 2}, 9);
  const Matrix h1 = mebns::encode(NormAdjacency::build(g1), x1, params);
  const Matrix h2 = mebns::encode(NormAdjacency::build(g2), x2, params);
  for (int i = 0; i < 4; ++i)
    CHECK((h2.row(perm[i]) - h1.row(i)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pair scores go through the logistic function") {
  Matrix emb(2, 1);
  emb << std::log(3.0), 1.0;
  const SampleSet pairs = {{0, 1, 1, mebns::Provenance::positive}};
  const Vector s = mebns::score_pairs(emb, pairs);
  // logit = ln 3, so the score is exactly 3/4.
  CHECK(s[0] == doctest::Approx(0.75).epsilon(1e-15));
  const Vector z = mebns::pair_logits(emb, pairs);
  CHECK(z[0] == doctest::Approx(std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("cross-entropy hand values and clamping") {
  Vector scores(2);
  scores << 0.9, 0.1;
  const std::vector<std::int8_t> labels = {1, 0};
  const mebns::BceResult r = mebns::bce_loss(scores, labels);
  CHECK(r.per_sample[0] == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK(r.per_sample[1] == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK(r.mean == doctest::Approx(-std::log(0.9)).epsilon(1e-12));

  // Degenerate scores clamp to [1e-12, 1 - 1e-12] instead of exploding.
  Vector hard(2);
  hard << 0.0, 1.0;
  const mebns::BceResult c = mebns::bce_loss(hard, {1, 0});
  CHECK(c.per_sample[0] == doctest::Approx(-std::log(1e-12)).epsilon(1e-9));
  // The upper clamp goes through 1 - (1 - 1e-12), which rounds ~8e-7 away
  // from 1e-12 in double precision.
  CHECK(c.per_sample[1] == doctest::Approx(-std::log(1e-12)).epsilon(1e-5));
  CHECK(std::isfinite(c.mean));

  CHECK_THROWS_AS(mebns::bce_loss(Vector(0), {}), Error);
  CHECK_THROWS_AS(mebns::bce_loss(scores, {1}), Error);
}

TEST_CASE("logit-form cross-entropy agrees with the probability form") {
  Vector logits(5);
  logits << -3.0, -0.5, 0.0, 1.25, 4.0;
  const std::vector<std::int8_t> labels = {0, 1, 1, 0, 1};
  Vector probs(5);
  for (int i = 0; i < 5; ++i) probs[i] = 1.0 / (1.0 + std::exp(-logits[i]));

  const Vector a = mebns::bce_from_logits(logits, labels);
  const mebns::BceResult b = mebns::bce_loss(probs, labels);
  CHECK((a - b.per_sample).cwiseAbs().maxCoeff() < 1e-12);

  // Extreme logits stay finite in the logit form.
  Vector extreme(2);
  extreme << 700.0, -700.0;
  const Vector e = mebns::bce_from_logits(extreme, {0, 1});
  CHECK(std::isfinite(e[0]));
  CHECK(e[0] == doctest::Approx(700.0).epsilon(1e-12));
  CHECK(e[1] == doctest::Approx(700.0).epsilon(1e-12));
}

TEST_CASE("training loss equals the weighted mean of per-sample terms") {
  TinyProblem t;
  const LinkLoss unweighted(t.adj, t.x, t.samples);
  const Vector per = unweighted.per_sample(t.params);
  CHECK(unweighted.value(t.params) ==
        doctest::Approx(per.mean()).epsilon(1e-14));

  Vector w(5);
  w << 0.3, 1.7, 1.0, 0.5, 2.0;
  const LinkLoss weighted(t.adj, t.x, t.samples, &w);
  CHECK(weighted.value(t.params) ==
        doctest::Approx(w.dot(per) / 5.0).epsilon(1e-14));

  // Unit weight vector and no weight vector are the same computation bit
  // for bit - the second-phase objective collapses to the first-phase one.
  Vector ones = Vector::Ones(5);
  const LinkLoss unit(t.adj, t.x, t.samples, &ones);
  CHECK(unit.value(t.params) == unweighted.value(t.params));
  const GradientBundle ga = unit.gradients(t.params);
  const GradientBundle gb = unweighted.gradients(t.params);
  CHECK(ga.loss == gb.loss);
  CHECK(ga.grads == gb.grads);

  Vector bad(2);
  CHECK_THROWS_AS(LinkLoss(t.adj, t.x, t.samples, &bad), Error);
  CHECK_THROWS_AS(LinkLoss(t.adj, t.x, SampleSet{}), Error);
}

TEST_CASE("analytic gradients match central differences") {
  TinyProblem t;
  const LinkLoss loss(t.adj, t.x, t.samples);
  const GradientBundle g = mebns::backward_gradients(loss, t.params);
  const ParamStore fd = testsupport::fd_gradient(
      [&](const ParamStore& p) { return loss.value(p); }, t.params, 1e-5);
  CHECK(testsupport::max_rel_error(g.grads, fd) < 1e-4);
  CHECK(g.loss == doctest::Approx(loss.value(t.params)).epsilon(1e-14));
}

TEST_CASE("analytic gradients match central differences under weights") {
  TinyProblem t;
  Vector w(5);
  w << 0.3, 1.7, 1.0, 0.5, 2.0;
  const LinkLoss loss(t.adj, t.x, t.samples, &w);
  const GradientBundle g = loss.gradients(t.params);
  const ParamStore fd = testsupport::fd_gradient(
      [&](const ParamStore& p) { return loss.value(p); }, t.params, 1e-5);
  CHECK(testsupport::max_rel_error(g.grads, fd) < 1e-4);
}

TEST_CASE("directional derivative matches central differences") {
  TinyProblem t;
  mebns::Rng rng(31);
  ParamStore dir = t.params.zeros_like();
  for (std::size_t p = 0; p < dir.size(); ++p)
    for (std::int64_t c = 0; c < dir.value(p).cols(); ++c)
      for (std::int64_t r = 0; r < dir.value(p).rows(); ++r)
        dir.value(p)(r, c) = rng.uniform(-1.0, 1.0);

  EncodeCache cache;
  mebns::encode(t.adj, t.x, t.params, &cache);
  const Matrix jvp = mebns::encode_jvp(t.adj, t.x, t.params, dir, cache);

  const double h = 1e-6;
  ParamStore up = t.params;
  up.axpy(h, dir);
  ParamStore down = t.params;
  down.axpy(-h, dir);
  const Matrix fd = (mebns::encode(t.adj, t.x, up) -
                     mebns::encode(t.adj, t.x, down)) /
                    (2.0 * h);
  CHECK((jvp - fd).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("pass counters see every encoder traversal") {
  TinyProblem t;
  mebns::reset_pass_counters();
  CHECK(mebns::pass_counters().forward == 0);

  EncodeCache cache;
  mebns::encode(t.adj, t.x, t.params, &cache);
  CHECK(mebns::pass_counters().forward == 1);

  mebns::encode_jvp(t.adj, t.x, t.params, t.params.zeros_like(), cache);
  CHECK(mebns::pass_counters().jvp == 1);

  const LinkLoss loss(t.adj, t.x, t.samples);
  loss.gradients(t.params);
  CHECK(mebns::pass_counters().forward == 2);  // gradient includes a forward
  CHECK(mebns::pass_counters().backward == 1);
  mebns::reset_pass_counters();
  CHECK(mebns::pass_counters().backward == 0);
}
