// Decoupled weight decay Adam over a flat parameter vector.

#pragma once

#include <string>

#include "gosh/nn/models.hpp"

namespace gosh::nn {

struct AdamWConfig {
  double lr = 1e-5;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamW {
 public:
  explicit AdamW(AdamWConfig cfg = {}) : cfg_(cfg) {}

  const AdamWConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }
  int step_count() const { return t_; }

  // In-place update of the model's parameter matrices. `grads` must line up
  // with `params`. Throws on non-finite gradients, naming the block.
  void step(const std::vector<ParamRef>& params,
            const std::vector<Matrix>& grads);

 private:
  AdamWConfig cfg_;
  int t_ = 0;
  Eigen::VectorXd m_, v_;
};

}  // namespace gosh::nn
