#include "gosh/nn/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace gosh::nn {

namespace {

void check_same_tape(Value a, Value b) {
  if (a.tape() != b.tape())
    throw std::invalid_argument("tape: operands belong to different tapes");
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string("tape: shape mismatch in ") + op);
}

Matrix softplus_mat(const Matrix& x) {
  // log(1 + e^x), stable for large |x|
  return x.unaryExpr([](double v) {
    if (v > 30.0) return v;
    if (v < -30.0) return std::exp(v);
    return std::log1p(std::exp(v));
  });
}

Matrix sigmoid_mat(const Matrix& x) {
  return x.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    double e = std::exp(v);
    return e / (1.0 + e);
  });
}

}  // namespace

const Matrix& Value::val() const {
  if (!tape_) throw std::logic_error("tape: use of empty Value");
  return tape_->node(id_).value;
}

Value Tape::emit(Op op, int in0, int in1, Matrix value, double attr,
                 int iattr0, int iattr1) {
  Node n;
  n.op = op;
  n.in0 = in0;
  n.in1 = in1;
  n.attr = attr;
  n.iattr0 = iattr0;
  n.iattr1 = iattr1;
  n.value = std::move(value);
  n.requires_grad = (op == Op::Leaf);
  if (in0 >= 0) n.requires_grad = n.requires_grad || nodes_[in0].requires_grad;
  if (in1 >= 0) n.requires_grad = n.requires_grad || nodes_[in1].requires_grad;
  nodes_.push_back(std::move(n));
  return Value(this, static_cast<int>(nodes_.size()) - 1);
}

Value Tape::leaf(Matrix v) { return emit(Op::Leaf, -1, -1, std::move(v)); }
Value Tape::constant(Matrix v) { return emit(Op::Const, -1, -1, std::move(v)); }
Value Tape::scalar_const(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return constant(std::move(m));
}

Value add(Value a, Value b) {
  check_same_tape(a, b);
  check_same_shape(a.val(), b.val(), "add");
  return a.tape()->emit(Op::Add, a.id(), b.id(), a.val() + b.val());
}

Value sub(Value a, Value b) {
  check_same_tape(a, b);
  check_same_shape(a.val(), b.val(), "sub");
  return a.tape()->emit(Op::Sub, a.id(), b.id(), a.val() - b.val());
}

Value mul(Value a, Value b) {
  check_same_tape(a, b);
  check_same_shape(a.val(), b.val(), "mul");
  return a.tape()->emit(Op::Mul, a.id(), b.id(),
                        a.val().cwiseProduct(b.val()));
}

Value div(Value a, Value b) {
  check_same_tape(a, b);
  check_same_shape(a.val(), b.val(), "div");
  return a.tape()->emit(Op::Div, a.id(), b.id(),
                        a.val().cwiseQuotient(b.val()));
}

Value neg(Value a) { return a.tape()->emit(Op::Neg, a.id(), -1, -a.val()); }

Value matmul(Value a, Value b) {
  check_same_tape(a, b);
  if (a.val().cols() != b.val().rows())
    throw std::invalid_argument("tape: inner dimension mismatch in matmul");
  return a.tape()->emit(Op::MatMul, a.id(), b.id(), a.val() * b.val());
}

Value transpose(Value a) {
  return a.tape()->emit(Op::Transpose, a.id(), -1, a.val().transpose());
}

Value sigmoid(Value a) {
  return a.tape()->emit(Op::Sigmoid, a.id(), -1, sigmoid_mat(a.val()));
}

Value softplus(Value a) {
  return a.tape()->emit(Op::Softplus, a.id(), -1, softplus_mat(a.val()));
}

Value tanh_op(Value a) {
  return a.tape()->emit(Op::Tanh, a.id(), -1,
                        a.val().unaryExpr([](double v) { return std::tanh(v); }));
}

Value tanhshrink(Value a) { return sub(a, tanh_op(a)); }

Value log_op(Value a) {
  return a.tape()->emit(Op::Log, a.id(), -1,
                        a.val().unaryExpr([](double v) { return std::log(v); }));
}

Value sqrt_op(Value a) {
  return a.tape()->emit(Op::Sqrt, a.id(), -1,
                        a.val().unaryExpr([](double v) { return std::sqrt(v); }));
}

Value square(Value a) {
  return a.tape()->emit(Op::Square, a.id(), -1,
                        a.val().cwiseProduct(a.val()));
}

Value sum(Value a) {
  Matrix m(1, 1);
  m(0, 0) = a.val().sum();
  return a.tape()->emit(Op::Sum, a.id(), -1, std::move(m));
}

Value mean(Value a) {
  return scale(sum(a), 1.0 / static_cast<double>(a.val().size()));
}

Value scale(Value a, double c) {
  return a.tape()->emit(Op::Scale, a.id(), -1, a.val() * c, c);
}

Value add_scalar(Value a, double c) {
  return a.tape()->emit(Op::AddScalar, a.id(), -1, a.val().array() + c, c);
}

Value add_rowvec(Value a, Value b) {
  check_same_tape(a, b);
  if (b.val().rows() != 1 || a.val().cols() != b.val().cols())
    throw std::invalid_argument("tape: shape mismatch in add_rowvec");
  Matrix out = a.val();
  out.rowwise() += b.val().row(0);
  return a.tape()->emit(Op::AddRowVec, a.id(), b.id(), std::move(out));
}

Value sum_rows(Value a) {
  Matrix out = a.val().colwise().sum();
  return a.tape()->emit(Op::SumRows, a.id(), -1, std::move(out));
}

Value broadcast_rows(Value a, int rows) {
  if (a.val().rows() != 1)
    throw std::invalid_argument("tape: broadcast_rows expects a row vector");
  Matrix out = a.val().replicate(rows, 1);
  return a.tape()->emit(Op::BroadcastRows, a.id(), -1, std::move(out), 0.0,
                        rows);
}

namespace {
Value broadcast_scalar(Value a, int rows, int cols) {
  Matrix out = Matrix::Constant(rows, cols, a.val()(0, 0));
  return a.tape()->emit(Op::BroadcastScalar, a.id(), -1, std::move(out), 0.0,
                        rows, cols);
}
}  // namespace

Value concat_cols(Value a, Value b) {
  check_same_tape(a, b);
  if (a.val().rows() != b.val().rows())
    throw std::invalid_argument("tape: row mismatch in concat_cols");
  Matrix out(a.val().rows(), a.val().cols() + b.val().cols());
  out << a.val(), b.val();
  return a.tape()->emit(Op::ConcatCols, a.id(), b.id(), std::move(out));
}

Value slice_cols(Value a, int start, int n) {
  if (start < 0 || n < 0 || start + n > a.val().cols())
    throw std::invalid_argument("tape: slice_cols out of range");
  Matrix out = a.val().middleCols(start, n);
  return a.tape()->emit(Op::SliceCols, a.id(), -1, std::move(out), 0.0, start,
                        n);
}

namespace {
Value pad_cols(Value a, int start, int total) {
  Matrix out = Matrix::Zero(a.val().rows(), total);
  out.middleCols(start, a.val().cols()) = a.val();
  return a.tape()->emit(Op::PadCols, a.id(), -1, std::move(out), 0.0, start,
                        total);
}
}  // namespace

Value clamp_min(Value a, double c) {
  return a.tape()->emit(Op::ClampMin, a.id(), -1, a.val().cwiseMax(c), c);
}

Value clamp01_st(Value a) {
  return a.tape()->emit(Op::Clamp01ST, a.id(), -1,
                        a.val().cwiseMax(0.0).cwiseMin(1.0));
}

namespace {

// Accumulates per-node adjoints during a backward sweep.
struct Adjoints {
  std::unordered_map<int, Value> by_id;

  void accumulate(int id, Value v) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      by_id.emplace(id, v);
    else
      it->second = add(it->second, v);
  }
};

}  // namespace

std::vector<Value> grad(Value loss, std::span<const Value> wrt) {
  Tape* tape = loss.tape();
  if (!tape) throw std::logic_error("tape: grad of empty Value");
  if (loss.val().rows() != 1 || loss.val().cols() != 1)
    throw std::invalid_argument("tape: grad expects a 1x1 loss");

  // Creation order is a topological order, so a descending id sweep over
  // nodes reachable from the loss visits every node after all its consumers.
  std::vector<char> reachable(tape->size(), 0);
  {
    std::vector<int> stack{loss.id()};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      if (id < 0 || reachable[id]) continue;
      const auto& n = tape->node(id);
      if (!n.requires_grad) continue;
      reachable[id] = 1;
      stack.push_back(n.in0);
      stack.push_back(n.in1);
    }
  }

  Adjoints adj;
  adj.accumulate(loss.id(), tape->constant(Matrix::Ones(1, 1)));

  const int last = loss.id();
  for (int id = last; id >= 0; --id) {
    if (!reachable[id]) continue;
    auto it = adj.by_id.find(id);
    if (it == adj.by_id.end()) continue;
    Value gy = it->second;
    // copy: emitting backward nodes may reallocate the tape's node storage
    const Tape::Node n = tape->node(id);
    Value x0(tape, n.in0), x1(tape, n.in1);
    auto wants = [&](int in) { return in >= 0 && tape->node(in).requires_grad; };

    switch (n.op) {
      case Op::Leaf:
      case Op::Const:
        break;
      case Op::Add:
        if (wants(n.in0)) adj.accumulate(n.in0, gy);
        if (wants(n.in1)) adj.accumulate(n.in1, gy);
        break;
      case Op::Sub:
        if (wants(n.in0)) adj.accumulate(n.in0, gy);
        if (wants(n.in1)) adj.accumulate(n.in1, neg(gy));
        break;
      case Op::Mul:
        if (wants(n.in0)) adj.accumulate(n.in0, mul(gy, x1));
        if (wants(n.in1)) adj.accumulate(n.in1, mul(gy, x0));
        break;
      case Op::Div:
        if (wants(n.in0)) adj.accumulate(n.in0, div(gy, x1));
        if (wants(n.in1))
          adj.accumulate(n.in1, neg(div(mul(gy, x0), mul(x1, x1))));
        break;
      case Op::Neg:
        if (wants(n.in0)) adj.accumulate(n.in0, neg(gy));
        break;
      case Op::MatMul:
        if (wants(n.in0)) adj.accumulate(n.in0, matmul(gy, transpose(x1)));
        if (wants(n.in1)) adj.accumulate(n.in1, matmul(transpose(x0), gy));
        break;
      case Op::Transpose:
        if (wants(n.in0)) adj.accumulate(n.in0, transpose(gy));
        break;
      case Op::Sigmoid:
        if (wants(n.in0)) {
          Value out(tape, id);
          Value one = tape->constant(Matrix::Ones(n.value.rows(), n.value.cols()));
          adj.accumulate(n.in0, mul(gy, mul(out, sub(one, out))));
        }
        break;
      case Op::Softplus:
        if (wants(n.in0)) adj.accumulate(n.in0, mul(gy, sigmoid(x0)));
        break;
      case Op::Tanh:
        if (wants(n.in0)) {
          Value out(tape, id);
          Value one = tape->constant(Matrix::Ones(n.value.rows(), n.value.cols()));
          adj.accumulate(n.in0, mul(gy, sub(one, mul(out, out))));
        }
        break;
      case Op::Log:
        if (wants(n.in0)) adj.accumulate(n.in0, div(gy, x0));
        break;
      case Op::Sqrt:
        if (wants(n.in0)) {
          Value out(tape, id);
          adj.accumulate(n.in0, div(scale(gy, 0.5), out));
        }
        break;
      case Op::Square:
        if (wants(n.in0)) adj.accumulate(n.in0, mul(scale(gy, 2.0), x0));
        break;
      case Op::Sum:
        if (wants(n.in0)) {
          const auto& in = tape->node(n.in0).value;
          adj.accumulate(n.in0, broadcast_scalar(gy, static_cast<int>(in.rows()),
                                                 static_cast<int>(in.cols())));
        }
        break;
      case Op::Scale:
        if (wants(n.in0)) adj.accumulate(n.in0, scale(gy, n.attr));
        break;
      case Op::AddScalar:
        if (wants(n.in0)) adj.accumulate(n.in0, gy);
        break;
      case Op::AddRowVec:
        if (wants(n.in0)) adj.accumulate(n.in0, gy);
        if (wants(n.in1)) adj.accumulate(n.in1, sum_rows(gy));
        break;
      case Op::SumRows:
        if (wants(n.in0)) {
          const auto& in = tape->node(n.in0).value;
          adj.accumulate(n.in0, broadcast_rows(gy, static_cast<int>(in.rows())));
        }
        break;
      case Op::BroadcastRows:
        if (wants(n.in0)) adj.accumulate(n.in0, sum_rows(gy));
        break;
      case Op::BroadcastScalar:
        if (wants(n.in0)) adj.accumulate(n.in0, sum(gy));
        break;
      case Op::ConcatCols:
        if (wants(n.in0)) {
          int c0 = static_cast<int>(tape->node(n.in0).value.cols());
          adj.accumulate(n.in0, slice_cols(gy, 0, c0));
        }
        if (wants(n.in1)) {
          int c0 = static_cast<int>(tape->node(n.in0).value.cols());
          int c1 = static_cast<int>(tape->node(n.in1).value.cols());
          adj.accumulate(n.in1, slice_cols(gy, c0, c1));
        }
        break;
      case Op::SliceCols:
        if (wants(n.in0)) {
          int total = static_cast<int>(tape->node(n.in0).value.cols());
          adj.accumulate(n.in0, pad_cols(gy, n.iattr0, total));
        }
        break;
      case Op::PadCols:
        if (wants(n.in0)) {
          int width = static_cast<int>(tape->node(n.in0).value.cols());
          adj.accumulate(n.in0, slice_cols(gy, n.iattr0, width));
        }
        break;
      case Op::ClampMin: {
        if (wants(n.in0)) {
          Matrix mask = (tape->node(n.in0).value.array() > n.attr)
                            .cast<double>()
                            .matrix();
          adj.accumulate(n.in0, mul(gy, tape->constant(std::move(mask))));
        }
        break;
      }
      case Op::Clamp01ST:
        if (wants(n.in0)) adj.accumulate(n.in0, gy);  // straight-through
        break;
    }
  }

  std::vector<Value> out;
  out.reserve(wrt.size());
  for (const Value& w : wrt) {
    auto it = adj.by_id.find(w.id());
    if (it != adj.by_id.end() && w.tape() == tape)
      out.push_back(it->second);
    else
      out.push_back(tape->constant(
          Matrix::Zero(w.val().rows(), w.val().cols())));
  }
  return out;
}

}  // namespace gosh::nn
