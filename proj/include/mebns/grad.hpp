#pragma once

#include "mebns/params.hpp"

namespace mebns {

// A differentiable scalar objective over a parameter store. Implementations
// provide analytic gradients; there is deliberately no general tape here -
// the two models in this codebase (the graph encoder and the tiny weighting
// net) have hand-derived backward passes, and tests pin them against finite
// differences.
class LossFunction {
 public:
  virtual ~LossFunction() = default;

  virtual double value(const ParamStore& params) const = 0;
  virtual GradientBundle gradients(const ParamStore& params) const = 0;
};

// Gradient entry point used by the optimizers: evaluates f.gradients and
// enforces the bundle contract (finite loss, finite entries, shapes
// mirroring the parameters). Never mutates `params`.
GradientBundle backward_gradients(const LossFunction& f,
                                  const ParamStore& params);

}  // namespace mebns
