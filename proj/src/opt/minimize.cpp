#include "gosh/opt/minimize.hpp"

#include <cmath>
#include <stdexcept>

namespace gosh::opt {

using nn::Matrix;
using nn::Tape;
using nn::Value;

namespace {

Matrix row_from(const Eigen::VectorXd& v) {
  return Eigen::Map<const Matrix>(v.data(), 1, v.size());
}

Eigen::VectorXd vec_from(const Matrix& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Matrix rademacher_row(int n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Matrix z(1, n);
  for (int i = 0; i < n; ++i) z(0, i) = coin(rng) ? 1.0 : -1.0;
  return z;
}

// Gradient of the (optionally IGR-augmented) objective as a graph node.
Value objective_gradient(const ObjectiveFn& objective, Tape& tape, Value x,
                         double igr_coefficient, double* objective_value) {
  Value obj = objective(tape, x);
  if (obj.val().rows() != 1 || obj.val().cols() != 1)
    throw std::invalid_argument("minimize: objective must be scalar");
  if (objective_value) *objective_value = obj.val()(0, 0);
  Value total = obj;
  if (igr_coefficient > 0.0) {
    Value g0 = nn::grad(obj, std::vector<Value>{x})[0];
    total = nn::add(obj, nn::scale(nn::sum(nn::square(g0)), igr_coefficient));
  }
  return nn::grad(total, std::vector<Value>{x})[0];
}

Eigen::VectorXd hutchinson_of_grad(Tape& tape, Value g, Value x, int m,
                                   std::mt19937_64& rng) {
  const int n = static_cast<int>(g.val().cols());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < m; ++j) {
    Matrix z = rademacher_row(n, rng);
    Value dir = nn::sum(nn::mul(g, tape.constant(z)));
    Value hz = nn::grad(dir, std::vector<Value>{x})[0];
    acc += vec_from(z.cwiseProduct(hz.val()));
  }
  return acc / m;
}

}  // namespace

Eigen::VectorXd hutchinson_diag(const ObjectiveFn& objective,
                                const Eigen::VectorXd& at, int m,
                                std::mt19937_64& rng) {
  if (m < 1) throw std::invalid_argument("hutchinson_diag: m must be >= 1");
  Tape tape;
  Value x = tape.leaf(row_from(at));
  Value g = objective_gradient(objective, tape, x, 0.0, nullptr);
  Eigen::VectorXd est = hutchinson_of_grad(tape, g, x, m, rng);
  if (!est.allFinite())
    throw std::runtime_error("hutchinson_diag: non-finite estimate");
  return est;
}

MinimizeResult second_order_minimize(const ObjectiveFn& objective,
                                     Eigen::VectorXd initial,
                                     const OptimizerConfig& cfg,
                                     HessianState& hessian,
                                     std::mt19937_64& rng) {
  MinimizeResult res;
  res.x = std::move(initial);
  const int n = static_cast<int>(res.x.size());
  for (int i = 1; i <= cfg.max_iterations; ++i) {
    Tape tape;
    Value x = tape.leaf(row_from(res.x));
    double obj_value = 0.0;
    Value g = objective_gradient(objective, tape, x, cfg.igr_coefficient,
                                 &obj_value);
    Eigen::VectorXd gv = vec_from(g.val());
    if (!gv.allFinite())
      throw std::runtime_error("second_order_minimize: non-finite gradient");
    if (gv.isZero()) {
      res.trajectory.push_back({i, obj_value, 0.0});
      break;  // already at a stationary point
    }

    Eigen::VectorXd est =
        hutchinson_of_grad(tape, g, x, cfg.hutchinson_samples, rng);
    if (!est.allFinite())
      throw std::runtime_error("second_order_minimize: non-finite Hessian");
    if (!hessian.initialized) {
      hessian.diag = est;
      hessian.omega = cfg.omega;
      hessian.initialized = true;
    } else {
      hessian.diag = cfg.omega * hessian.diag + (1.0 - cfg.omega) * est;
    }

    // magnitude damping: curvature only scales the step, so negative
    // curvature never turns a descent direction uphill
    Eigen::VectorXd step(n);
    for (int c = 0; c < n; ++c) {
      double damped = std::max(std::abs(hessian.diag[c]), cfg.h_min);
      step[c] = cfg.gamma * gv[c] / damped;
    }
    res.x -= step;
    res.iterations = i;
    double norm = step.cwiseAbs().maxCoeff();
    res.trajectory.push_back({i, obj_value, norm});
    if (norm <= cfg.epsilon) break;
  }
  return res;
}

MinimizeResult first_order_minimize(const ObjectiveFn& objective,
                                    Eigen::VectorXd initial,
                                    const OptimizerConfig& cfg) {
  MinimizeResult res;
  res.x = std::move(initial);
  for (int i = 1; i <= cfg.max_iterations; ++i) {
    Tape tape;
    Value x = tape.leaf(row_from(res.x));
    double obj_value = 0.0;
    Value g = objective_gradient(objective, tape, x, cfg.igr_coefficient,
                                 &obj_value);
    Eigen::VectorXd gv = vec_from(g.val());
    if (!gv.allFinite())
      throw std::runtime_error("first_order_minimize: non-finite gradient");
    if (gv.isZero()) {
      res.trajectory.push_back({i, obj_value, 0.0});
      break;
    }
    Eigen::VectorXd step = cfg.gamma * gv;
    res.x -= step;
    res.iterations = i;
    double norm = step.cwiseAbs().maxCoeff();
    res.trajectory.push_back({i, obj_value, norm});
    if (norm <= cfg.epsilon) break;
  }
  return res;
}

}  // namespace gosh::opt
