// Reverse-mode autodiff tape over Eigen matrices.
//
// Backward passes build new nodes on the same tape, so gradients are
// themselves differentiable (needed for exact Hessian-vector products and
// gradient-norm penalties).

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace gosh::nn {

using Matrix = Eigen::MatrixXd;

class Tape;

// Lightweight handle into a Tape. Valid only while the tape is alive.
class Value {
 public:
  Value() = default;
  Value(Tape* tape, int id) : tape_(tape), id_(id) {}

  const Matrix& val() const;
  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

enum class Op : std::uint8_t {
  Leaf,
  Const,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  MatMul,
  Transpose,
  Sigmoid,
  Softplus,
  Tanh,
  Log,
  Sqrt,
  Square,
  Sum,
  Scale,          // value * attr
  AddScalar,      // value + attr
  AddRowVec,      // (n x m) + broadcast (1 x m)
  SumRows,        // (n x m) -> (1 x m)
  BroadcastRows,  // (1 x m) -> (iattr0 x m)
  BroadcastScalar,// (1 x 1) -> (iattr0 x iattr1)
  ConcatCols,
  SliceCols,      // cols [iattr0, iattr0 + iattr1)
  PadCols,        // inverse of SliceCols; iattr0 = start, iattr1 = total cols
  ClampMin,       // cwiseMax(attr); gradient zero below the clamp
  Clamp01ST,      // clamp to [0,1]; straight-through gradient
};

class Tape {
 public:
  struct Node {
    Op op;
    int in0 = -1;
    int in1 = -1;
    double attr = 0.0;
    int iattr0 = 0;
    int iattr1 = 0;
    bool requires_grad = false;
    Matrix value;
  };

  Value leaf(Matrix v);      // differentiable input / parameter
  Value constant(Matrix v);  // no gradient flows into it
  Value scalar_const(double v);

  const Node& node(int id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  Value emit(Op op, int in0, int in1, Matrix value, double attr = 0.0,
             int iattr0 = 0, int iattr1 = 0);

 private:
  std::vector<Node> nodes_;
};

// Elementwise / structural ops. Shapes are validated; mismatches throw
// std::invalid_argument.
Value add(Value a, Value b);
Value sub(Value a, Value b);
Value mul(Value a, Value b);
Value div(Value a, Value b);
Value neg(Value a);
Value matmul(Value a, Value b);
Value transpose(Value a);
Value sigmoid(Value a);
Value softplus(Value a);
Value tanh_op(Value a);
Value tanhshrink(Value a);  // x - tanh(x)
Value log_op(Value a);
Value sqrt_op(Value a);
Value square(Value a);
Value sum(Value a);                 // -> 1x1
Value mean(Value a);                // -> 1x1
Value scale(Value a, double c);
Value add_scalar(Value a, double c);
Value add_rowvec(Value a, Value b);
Value sum_rows(Value a);
Value broadcast_rows(Value a, int rows);
Value concat_cols(Value a, Value b);
Value slice_cols(Value a, int start, int n);
Value clamp_min(Value a, double c);
Value clamp01_st(Value a);

// Gradient of a 1x1 loss w.r.t. each of `wrt`. Unreachable entries come back
// as zero constants. Results live on the same tape and are differentiable.
std::vector<Value> grad(Value loss, std::span<const Value> wrt);

}  // namespace gosh::nn
