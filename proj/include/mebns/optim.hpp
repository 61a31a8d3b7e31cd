#pragma once

#include <cstdint>

#include "mebns/params.hpp"

namespace mebns {

// First-order optimizer applying in-place updates to a ParamStore.
// Adam keeps per-parameter moments; the whole object is copyable, which is
// how a follow-on training phase inherits the state of an earlier one.
class Optimizer {
 public:
  static Optimizer sgd(double lr);
  static Optimizer adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                        double eps = 1e-8);

  // params -= update(grads). Shapes must match the first call's shapes.
  void apply_update(ParamStore& params, const GradientBundle& g);

  std::int64_t step_count() const { return step_; }
  double learning_rate() const { return lr_; }

  // Retunes the step size without touching the accumulated moments, so a
  // phase can inherit another phase's state under its own learning rate.
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  enum class Kind { sgd, adam };

  Kind kind_ = Kind::sgd;
  double lr_ = 0.0;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::int64_t step_ = 0;
  bool initialized_ = false;
  ParamStore m_, v_;
};

}  // namespace mebns
