#include "mebns/bilevel.hpp"

#include <cmath>

#include "mebns/error.hpp"
#include "mebns/grad.hpp"
#include "mebns/meta_net.hpp"

namespace mebns {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

GcnBilevelProblem::GcnBilevelProblem(const NormAdjacency& adj,
                                     const Matrix& features,
                                     const SampleSet& hard,
                                     const SampleSet& meta)
    : adj_(adj), features_(features), hard_(hard), meta_(meta) {
  if (hard_.empty()) throw Error::runtime("bilevel problem: empty hard set");
  if (meta_.empty()) throw Error::runtime("bilevel problem: empty meta set");
}

Vector GcnBilevelProblem::hard_losses(const ParamStore& theta) const {
  return LinkLoss(adj_, features_, hard_).per_sample(theta);
}

GradientBundle GcnBilevelProblem::weighted_hard_gradient(
    const ParamStore& theta, const Vector& w) const {
  LinkLoss loss(adj_, features_, hard_, &w);
  return backward_gradients(loss, theta);
}

GradientBundle GcnBilevelProblem::meta_gradient(
    const ParamStore& theta) const {
  LinkLoss loss(adj_, features_, meta_);
  return backward_gradients(loss, theta);
}

Vector GcnBilevelProblem::hard_gradient_dots(
    const ParamStore& theta, const ParamStore& direction) const {
  // <grad loss_i, dir> = dce/dlogit_i * d(logit_i)[dir], and the directional
  // derivative of every logit falls out of a single forward-mode pass:
  //   d(logit_i) = <dH[u_i], H[v_i]> + <H[u_i], dH[v_i]>.
  EncodeCache cache;
  encode(adj_, features_, theta, &cache);
  Matrix dh = encode_jvp(adj_, features_, theta, direction, cache);

  Vector out(static_cast<std::int64_t>(hard_.size()));
  for (std::size_t i = 0; i < hard_.size(); ++i) {
    const Sample& s = hard_[i];
    const double logit = cache.h2.row(s.u).dot(cache.h2.row(s.v));
    const double dlogit =
        dh.row(s.u).dot(cache.h2.row(s.v)) + cache.h2.row(s.u).dot(dh.row(s.v));
    out[static_cast<std::int64_t>(i)] =
        (sigmoid(logit) - static_cast<double>(s.label)) * dlogit;
  }
  return out;
}

InnerStepResult inner_step(const BilevelProblem& problem,
                           const ParamStore& theta, const ParamStore& delta,
                           double inner_lr) {
  InnerStepResult r;
  r.losses = problem.hard_losses(theta);
  r.weights = meta_weight_batch(r.losses, delta);
  GradientBundle g = problem.weighted_hard_gradient(theta, r.weights);
  r.theta_prime = theta;
  r.theta_prime.axpy(-inner_lr, g.grads);
  return r;
}

GradientBundle hypergradient_from(const BilevelProblem& problem,
                                  const ParamStore& theta,
                                  const ParamStore& delta, double inner_lr,
                                  const InnerStepResult& inner) {
  GradientBundle meta = problem.meta_gradient(inner.theta_prime);
  Vector dots = problem.hard_gradient_dots(theta, meta.grads);

  const auto n = static_cast<double>(problem.hard_count());
  const double scale = -inner_lr / n;
  GradientBundle hyper;
  hyper.loss = meta.loss;
  hyper.grads = delta.zeros_like();
  for (std::int64_t i = 0; i < dots.size(); ++i) {
    // Chain through weight_i = net(loss_i): scalar coefficient times the
    // net's parameter gradient at that input.
    ParamStore dw = meta_weight_param_grad(inner.losses[i], delta);
    hyper.grads.axpy(scale * dots[i], dw);
  }
  if (!hyper.grads.all_finite())
    throw Error::numeric("meta gradient contains non-finite entries");
  return hyper;
}

GradientBundle hypergradient(const BilevelProblem& problem,
                             const ParamStore& theta, const ParamStore& delta,
                             double inner_lr) {
  InnerStepResult inner = inner_step(problem, theta, delta, inner_lr);
  return hypergradient_from(problem, theta, delta, inner_lr, inner);
}

BilevelStepInfo bilevel_iteration(BilevelState& state,
                                  const BilevelProblem& problem,
                                  bool freeze_weights) {
  BilevelStepInfo info;
  Vector weights;

  if (freeze_weights) {
    weights = Vector::Ones(static_cast<std::int64_t>(problem.hard_count()));
  } else {
    // Lookahead from the current student, update the weighting net against
    // the meta set, then reweight with the *updated* net. The lookahead
    // parameters are discarded.
    InnerStepResult inner =
        inner_step(problem, state.student, state.delta, state.inner_lr);
    GradientBundle hyper = hypergradient_from(problem, state.student,
                                              state.delta, state.inner_lr,
                                              inner);
    state.meta_opt.apply_update(state.delta, hyper);
    weights = meta_weight_batch(inner.losses, state.delta);
    info.meta_loss = hyper.loss;
    info.meta_grad_norm = hyper.norm();
    info.mean_hard_loss = inner.losses.mean();
  }

  GradientBundle g = problem.weighted_hard_gradient(state.student, weights);
  state.outer_opt.apply_update(state.student, g);

  info.mean_weight = weights.mean();
  info.student_grad_norm = g.norm();
  // Under frozen unit weights the committed step's objective *is* the mean
  // hard loss; otherwise the unweighted mean from the lookahead was kept.
  if (freeze_weights) info.mean_hard_loss = g.loss;
  return info;
}

}  // namespace mebns
