// Shared oracles for the test suites: central finite differences and small
// helpers. Kept independent of the autodiff implementation under test.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>

namespace testutil {

using Matrix = Eigen::MatrixXd;

// Central finite-difference gradient of a scalar function of a matrix.
inline Matrix numeric_grad(const std::function<double(const Matrix&)>& f,
                           Matrix x, double h = 1e-4) {
  Matrix g(x.rows(), x.cols());
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      const double orig = x(r, c);
      x(r, c) = orig + h;
      const double fp = f(x);
      x(r, c) = orig - h;
      const double fm = f(x);
      x(r, c) = orig;
      g(r, c) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

// Relative error with an absolute floor for near-zero entries.
inline double rel_err(const Matrix& a, const Matrix& b, double floor = 1e-6) {
  double worst = 0.0;
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      double denom = std::max({std::abs(a(r, c)), std::abs(b(r, c)), floor});
      worst = std::max(worst, std::abs(a(r, c) - b(r, c)) / denom);
    }
  return worst;
}

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

}  // namespace testutil
