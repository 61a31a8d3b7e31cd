#pragma once

#include <cstdint>

#include "mebns/params.hpp"

namespace mebns {

// Tiny weighting net: maps one per-sample loss value to a weight in (0,1).
//   a = relu(w1 * loss + b1),  weight = sigmoid(w2 . a + b2)
// Hidden width 64 by default. Weights start near zero and biases at zero so
// the initial output sits at ~0.5 for every input.
inline constexpr const char* kMetaW1 = "meta.w1";  // hidden x 1
inline constexpr const char* kMetaB1 = "meta.b1";  // hidden x 1
inline constexpr const char* kMetaW2 = "meta.w2";  // 1 x hidden
inline constexpr const char* kMetaB2 = "meta.b2";  // 1 x 1

ParamStore init_meta_params(std::uint64_t seed, std::int64_t hidden = 64);

double meta_weight(double loss, const ParamStore& delta);

Vector meta_weight_batch(const Vector& losses, const ParamStore& delta);

// Gradient of the output weight with respect to the net's own parameters,
// at the given input.
ParamStore meta_weight_param_grad(double loss, const ParamStore& delta);

}  // namespace mebns
