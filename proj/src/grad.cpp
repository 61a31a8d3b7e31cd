#include "mebns/grad.hpp"

#include <cmath>

#include "mebns/error.hpp"

namespace mebns {

GradientBundle backward_gradients(const LossFunction& f,
                                  const ParamStore& params) {
  GradientBundle b = f.gradients(params);
  if (!std::isfinite(b.loss))
    throw Error::numeric("loss is not finite: " + std::to_string(b.loss));
  if (!b.grads.same_shapes(params))
    throw Error::numeric("gradient shapes do not mirror the parameters");
  if (!b.grads.all_finite())
    throw Error::numeric("gradient contains non-finite entries");
  return b;
}

}  // namespace mebns
