#include "mebns/optim.hpp"

#include <cmath>

#include "mebns/error.hpp"

namespace mebns {

Optimizer Optimizer::sgd(double lr) {
  Optimizer o;
  o.kind_ = Kind::sgd;
  o.lr_ = lr;
  return o;
}

Optimizer Optimizer::adam(double lr, double beta1, double beta2, double eps) {
  Optimizer o;
  o.kind_ = Kind::adam;
  o.lr_ = lr;
  o.beta1_ = beta1;
  o.beta2_ = beta2;
  o.eps_ = eps;
  return o;
}

void Optimizer::apply_update(ParamStore& params, const GradientBundle& g) {
  if (!params.same_shapes(g.grads))
    throw Error::runtime("optimizer: gradient shapes do not match parameters");

  if (kind_ == Kind::sgd) {
    params.axpy(-lr_, g.grads);
    ++step_;
    return;
  }

  if (!initialized_) {
    m_ = params.zeros_like();
    v_ = params.zeros_like();
    initialized_ = true;
  } else if (!m_.same_shapes(params)) {
    throw Error::runtime("optimizer: parameter shapes changed mid-run");
  }

  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Matrix& grad = g.grads.value(i);
    Matrix& m = m_.value(i);
    Matrix& v = v_.value(i);
    m = beta1_ * m + (1.0 - beta1_) * grad;
    v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
    params.value(i).array() -=
        lr_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps_);
  }
}

}  // namespace mebns
