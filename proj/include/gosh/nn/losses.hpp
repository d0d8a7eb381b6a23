#pragma once

#include "gosh/nn/tape.hpp"

namespace gosh::nn {

inline constexpr double kSigmaMin = 1e-3;

// Heteroscedastic Gaussian negative log likelihood:
//   (1/T) sum (mu - y)^2 / (2 sigma^2) + (1/2) ln sigma^2
// sigma is clamped below at kSigmaMin. mu/sigma/targets: (n x 1).
Value aleatoric_loss(Value mu, Value sigma, Value targets);

Value mse_loss(Value preds, Value targets);

}  // namespace gosh::nn
