#pragma once

#include <cstdint>

#include "mebns/gcn.hpp"
#include "mebns/optim.hpp"
#include "mebns/params.hpp"

namespace mebns {

// The pieces of a reweighting problem the one-step meta gradient needs.
// Kept abstract so closed-form scalar toys can exercise the exact same
// update code that drives the graph model.
//
// "hard" below refers to the filtered training set the weights apply to;
// "meta" is the clean held-out set the lookahead is evaluated on.
class BilevelProblem {
 public:
  virtual ~BilevelProblem() = default;

  virtual std::size_t hard_count() const = 0;

  // Per-sample unweighted losses at theta.
  virtual Vector hard_losses(const ParamStore& theta) const = 0;

  // Gradient of (1/n) sum_i w_i * loss_i at theta.
  virtual GradientBundle weighted_hard_gradient(const ParamStore& theta,
                                                const Vector& w) const = 0;

  // Gradient of the mean meta-set loss at theta (evaluated at the lookahead
  // point by the meta update).
  virtual GradientBundle meta_gradient(const ParamStore& theta) const = 0;

  // Dot products <grad of loss_i at theta, direction> for every hard sample
  // at once. Implementations must not cost n separate gradient passes.
  virtual Vector hard_gradient_dots(const ParamStore& theta,
                                    const ParamStore& direction) const = 0;
};

// Reweighting problem over the graph encoder: hard set + meta set share the
// adjacency and features. The gradient-dot batch runs one forward-mode pass.
class GcnBilevelProblem final : public BilevelProblem {
 public:
  GcnBilevelProblem(const NormAdjacency& adj, const Matrix& features,
                    const SampleSet& hard, const SampleSet& meta);

  std::size_t hard_count() const override { return hard_.size(); }
  Vector hard_losses(const ParamStore& theta) const override;
  GradientBundle weighted_hard_gradient(const ParamStore& theta,
                                        const Vector& w) const override;
  GradientBundle meta_gradient(const ParamStore& theta) const override;
  Vector hard_gradient_dots(const ParamStore& theta,
                            const ParamStore& direction) const override;

 private:
  const NormAdjacency& adj_;
  const Matrix& features_;
  const SampleSet& hard_;
  const SampleSet& meta_;
};

// One SGD lookahead step from theta with weights from the weighting net:
//   theta' = theta - inner_lr * grad((1/n) sum_i weight(loss_i) * loss_i)
// The returned parameters are a probe point only; callers never commit them.
struct InnerStepResult {
  ParamStore theta_prime;
  Vector losses;   // per-sample hard losses at theta
  Vector weights;  // weighting-net outputs on those losses
};

InnerStepResult inner_step(const BilevelProblem& problem,
                           const ParamStore& theta, const ParamStore& delta,
                           double inner_lr);

// Exact gradient of the meta-set loss after the lookahead step with respect
// to the weighting net's parameters:
//   d meta(theta') / d delta
//     = -(inner_lr/n) * sum_i <grad meta(theta'), grad loss_i(theta)>
//                       * d weight_i / d delta.
// The inner products come from one forward-mode pass along grad meta
// instead of n backward passes.
GradientBundle hypergradient(const BilevelProblem& problem,
                             const ParamStore& theta, const ParamStore& delta,
                             double inner_lr);

// Same, reusing an inner_step result to avoid recomputation.
GradientBundle hypergradient_from(const BilevelProblem& problem,
                                  const ParamStore& theta,
                                  const ParamStore& delta, double inner_lr,
                                  const InnerStepResult& inner);

// State threaded through the alternating update loop.
struct BilevelState {
  ParamStore student;
  ParamStore delta;
  Optimizer outer_opt;  // steps `student`
  Optimizer meta_opt;   // steps `delta`
  double inner_lr = 0.01;
};

// Telemetry from one alternating iteration.
struct BilevelStepInfo {
  double mean_hard_loss = 0.0;
  double mean_weight = 0.0;
  double meta_loss = 0.0;
  double student_grad_norm = 0.0;
  double meta_grad_norm = 0.0;
};

// One full iteration: lookahead, weighting-net update, then a committed
// outer step on the student at its *current* parameters using weights from
// the freshly updated net. With `freeze_weights` the weighting path is
// skipped entirely and every weight is exactly 1.
BilevelStepInfo bilevel_iteration(BilevelState& state,
                                  const BilevelProblem& problem,
                                  bool freeze_weights = false);

}  // namespace mebns
