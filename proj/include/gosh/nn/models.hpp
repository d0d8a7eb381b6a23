// FCN, Gaussian NPN and LSTM models on top of the autodiff tape.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "gosh/nn/tape.hpp"

namespace gosh::nn {

enum class Act { Softplus, TanhShrink, Sigmoid, None };

std::string act_name(Act a);
Act act_from_name(const std::string& name);

// Applies activation to a pre-activation node.
Value apply_act(Value pre, Act act);
// Derivative of the activation at the pre-activation, as a graph node
// (used by the NPN delta-method variance propagation).
Value act_derivative(Value pre, Act act);

// One named parameter block; models own their matrices directly.
struct ParamRef {
  std::string name;
  Matrix* mat;
};

// Flat layout descriptor for checkpointing and flatten/unflatten.
struct ParamLayout {
  struct Entry {
    std::string name;
    int rows = 0;
    int cols = 0;

    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;

  bool operator==(const ParamLayout&) const = default;
  int total_size() const;
};

ParamLayout layout_of(const std::vector<ParamRef>& params);
Eigen::VectorXd flatten(const std::vector<ParamRef>& params);
void unflatten(const Eigen::VectorXd& flat, const std::vector<ParamRef>& params);

// Parameters bound onto a tape for one forward/backward pass.
struct BoundParams {
  std::vector<Value> values;
};

// Binds every parameter as a leaf (trainable) or constant (frozen).
BoundParams bind(Tape& tape, const std::vector<ParamRef>& params,
                 bool trainable);

struct FcnModel {
  std::vector<int> sizes;  // e.g. {in, 128, 64, 1}
  std::vector<Act> acts;   // one per layer
  double dropout = 0.0;    // applied to hidden activations when active
  std::vector<Matrix> weights;  // (in x out)
  std::vector<Matrix> biases;   // (1 x out)

  static FcnModel make(int input_dim, double dropout, std::mt19937_64& rng);
  static FcnModel make_sized(std::vector<int> sizes, std::vector<Act> acts,
                             double dropout, std::mt19937_64& rng);

  std::vector<ParamRef> params();
  std::vector<ParamRef> params() const;

  // x: (n x in). Returns (n x out_dim). When dropout_active, each hidden unit
  // is zeroed with probability `dropout` and survivors scaled by 1/(1-p).
  Value forward(Tape& tape, Value x, const BoundParams& bound,
                bool dropout_active, std::mt19937_64* rng) const;

  // Convenience: frozen-parameter forward returning plain numbers.
  Matrix infer(const Matrix& x, bool dropout_active = false,
               std::mt19937_64* rng = nullptr) const;

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
};

struct NpnOutput {
  Value mu;     // (n x out)
  Value sigma;  // (n x out), >= 0
};

// Gaussian natural-parameter network. Variance-side weights go through a
// square positivity transform, so raw parameters at zero give exactly zero
// variance and the mean path reduces to the plain FCN.
struct NpnModel {
  std::vector<int> sizes;
  std::vector<Act> acts;
  std::vector<Matrix> mean_weights, mean_biases;
  std::vector<Matrix> var_weights_raw, var_biases_raw;

  static NpnModel make(int input_dim, std::mt19937_64& rng);
  static NpnModel make_sized(std::vector<int> sizes, std::vector<Act> acts,
                             std::mt19937_64& rng);

  std::vector<ParamRef> params();
  std::vector<ParamRef> params() const;

  NpnOutput forward(Tape& tape, Value x, const BoundParams& bound) const;

  // Frozen-parameter forward; returns column-stacked [mu, sigma].
  std::pair<Matrix, Matrix> infer(const Matrix& x) const;

  int input_dim() const { return sizes.front(); }
};

// Single-layer LSTM over a feature sequence with a linear head, output
// clamped to [0,1] (straight-through gradient).
struct LstmModel {
  int input_dim = 0;
  int hidden_dim = 0;
  int output_dim = 0;
  Matrix w_ih;  // (in x 4H), gate order i, f, g, o
  Matrix w_hh;  // (H x 4H)
  Matrix b;     // (1 x 4H)
  Matrix w_out;  // (H x out)
  Matrix b_out;  // (1 x out)

  static LstmModel make(int input_dim, int hidden_dim, int output_dim,
                        std::mt19937_64& rng);

  std::vector<ParamRef> params();
  std::vector<ParamRef> params() const;

  // history: one Value per timestep, each (1 x input_dim), oldest first.
  Value forward(Tape& tape, std::span<const Value> history,
                const BoundParams& bound) const;

  Matrix infer(const std::vector<Matrix>& history) const;
};

// Paper-scale layer stack: input -> 128 softplus -> 64 tanhshrink -> 1 sigmoid.
std::vector<int> default_sizes(int input_dim);
std::vector<Act> default_acts();

}  // namespace gosh::nn
