#include "gosh/nn/adamw.hpp"

#include <cmath>
#include <stdexcept>

namespace gosh::nn {

void AdamW::step(const std::vector<ParamRef>& params,
                 const std::vector<Matrix>& grads) {
  if (grads.size() != params.size())
    throw std::invalid_argument("AdamW: gradient/parameter count mismatch");
  int total = 0;
  for (const auto& p : params) total += static_cast<int>(p.mat->size());
  if (m_.size() == 0) {
    m_ = Eigen::VectorXd::Zero(total);
    v_ = Eigen::VectorXd::Zero(total);
  } else if (m_.size() != total) {
    throw std::invalid_argument("AdamW: parameter layout changed mid-run");
  }

  Eigen::VectorXd g(total);
  int off = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].rows() != params[i].mat->rows() ||
        grads[i].cols() != params[i].mat->cols())
      throw std::invalid_argument("AdamW: gradient shape mismatch for " +
                                  params[i].name);
    if (!grads[i].allFinite())
      throw std::runtime_error("AdamW: non-finite gradient in block " +
                               params[i].name);
    g.segment(off, grads[i].size()) =
        Eigen::Map<const Eigen::VectorXd>(grads[i].data(), grads[i].size());
    off += static_cast<int>(grads[i].size());
  }

  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * g;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);

  off = 0;
  for (const auto& p : params) {
    auto flat = Eigen::Map<Eigen::VectorXd>(p.mat->data(), p.mat->size());
    auto mh = (m_.segment(off, p.mat->size()) / bc1).eval();
    auto vh = (v_.segment(off, p.mat->size()) / bc2).eval();
    flat -= cfg_.lr * (mh.array() / (vh.array().sqrt() + cfg_.eps)).matrix();
    flat -= cfg_.lr * cfg_.weight_decay * flat;
    off += static_cast<int>(p.mat->size());
  }
}

}  // namespace gosh::nn
