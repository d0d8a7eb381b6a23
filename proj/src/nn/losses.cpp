#include "gosh/nn/losses.hpp"

#include <stdexcept>

namespace gosh::nn {

Value aleatoric_loss(Value mu, Value sigma, Value targets) {
  if (mu.val().size() == 0) throw std::invalid_argument("aleatoric_loss: empty batch");
  if (mu.val().rows() != targets.val().rows() ||
      sigma.val().rows() != targets.val().rows())
    throw std::invalid_argument("aleatoric_loss: batch size mismatch");
  Value s = clamp_min(sigma, kSigmaMin);
  Value var = square(s);
  Value resid2 = square(sub(mu, targets));
  Value fit = div(resid2, scale(var, 2.0));
  Value reg = scale(log_op(var), 0.5);
  return mean(add(fit, reg));
}

Value mse_loss(Value preds, Value targets) {
  if (preds.val().size() == 0) throw std::invalid_argument("mse_loss: empty batch");
  if (preds.val().rows() != targets.val().rows() ||
      preds.val().cols() != targets.val().cols())
    throw std::invalid_argument("mse_loss: shape mismatch");
  return mean(square(sub(preds, targets)));
}

}  // namespace gosh::nn
