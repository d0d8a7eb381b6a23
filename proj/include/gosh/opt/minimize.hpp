// First- and second-order minimization of a differentiable scalar objective
// over a flat decision vector, with Hutchinson's Hessian-diagonal estimator
// and its moving average.

#pragma once

#include <functional>
#include <random>

#include "gosh/nn/tape.hpp"

namespace gosh::opt {

// Builds the objective graph for a tape-resident decision vector (1 x d leaf)
// and returns a 1x1 node.
using ObjectiveFn = std::function<nn::Value(nn::Tape&, nn::Value)>;

struct OptimizerConfig {
  double gamma = 0.1;           // learning rate
  double epsilon = 1e-3;        // max-norm step threshold
  int max_iterations = 50;      // L
  double omega = 0.9;           // Hessian moving-average momentum
  int hutchinson_samples = 1;   // m
  double igr_coefficient = 1e-3;
  // Damping floor on |H_i|. Sized for sigmoid-output surrogates over a [0,1]
  // box: flatter directions fall back to gradient descent at gamma / h_min
  // instead of taking near-unbounded Newton steps.
  double h_min = 0.3;
};

struct HessianState {
  Eigen::VectorXd diag;
  double omega = 0.9;
  bool initialized = false;
};

struct TrajectoryPoint {
  int iteration = 0;
  double objective = 0.0;
  double step_norm = 0.0;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  int iterations = 0;
  std::vector<TrajectoryPoint> trajectory;
};

// (1/m) sum z o (H z) over Rademacher z, with H z taken exactly by
// differentiating the directional derivative of the gradient graph.
Eigen::VectorXd hutchinson_diag(const ObjectiveFn& objective,
                                const Eigen::VectorXd& at, int m,
                                std::mt19937_64& rng);

// Preconditioned descent x <- x - gamma * grad / damped(H_ma), stopping when
// the applied step's max-norm falls to epsilon or the iteration limit hits.
// A positive igr coefficient adds lambda * |grad objective|^2 to the
// objective before differentiation.
MinimizeResult second_order_minimize(const ObjectiveFn& objective,
                                     Eigen::VectorXd initial,
                                     const OptimizerConfig& cfg,
                                     HessianState& hessian,
                                     std::mt19937_64& rng);

// Plain gradient descent with the same stopping rule (ablation path).
MinimizeResult first_order_minimize(const ObjectiveFn& objective,
                                    Eigen::VectorXd initial,
                                    const OptimizerConfig& cfg);

}  // namespace gosh::opt
