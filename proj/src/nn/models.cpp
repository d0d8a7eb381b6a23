#include "gosh/nn/models.hpp"

#include "gosh/nn/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace gosh::nn {

namespace {

Matrix kaiming_init(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / rows));
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

// Raw variance parameters start small and positive so initial sigma is on
// the order of 0.1 of the output scale.
Matrix var_raw_init(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.01, 0.05);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng) / std::sqrt(rows);
  return m;
}

void check_input(const Matrix& x, int expected, const char* who) {
  if (x.cols() != expected)
    throw std::invalid_argument(std::string(who) + ": input dimension " +
                                std::to_string(x.cols()) + " != expected " +
                                std::to_string(expected));
}

}  // namespace

std::string act_name(Act a) {
  switch (a) {
    case Act::Softplus: return "softplus";
    case Act::TanhShrink: return "tanhshrink";
    case Act::Sigmoid: return "sigmoid";
    case Act::None: return "none";
  }
  return "none";
}

Act act_from_name(const std::string& name) {
  if (name == "softplus") return Act::Softplus;
  if (name == "tanhshrink") return Act::TanhShrink;
  if (name == "sigmoid") return Act::Sigmoid;
  if (name == "none") return Act::None;
  throw std::invalid_argument("unknown activation: " + name);
}

Value apply_act(Value pre, Act act) {
  switch (act) {
    case Act::Softplus: return softplus(pre);
    case Act::TanhShrink: return tanhshrink(pre);
    case Act::Sigmoid: return sigmoid(pre);
    case Act::None: return pre;
  }
  return pre;
}

Value act_derivative(Value pre, Act act) {
  Tape* tape = pre.tape();
  switch (act) {
    case Act::Softplus:
      return sigmoid(pre);
    case Act::TanhShrink: {
      Value t = tanh_op(pre);
      return mul(t, t);  // 1 - (1 - tanh^2) = tanh^2
    }
    case Act::Sigmoid: {
      Value s = sigmoid(pre);
      Value one = tape->constant(
          Matrix::Ones(pre.val().rows(), pre.val().cols()));
      return mul(s, sub(one, s));
    }
    case Act::None:
      return tape->constant(Matrix::Ones(pre.val().rows(), pre.val().cols()));
  }
  return pre;
}

int ParamLayout::total_size() const {
  int n = 0;
  for (const auto& e : entries) n += e.rows * e.cols;
  return n;
}

ParamLayout layout_of(const std::vector<ParamRef>& params) {
  ParamLayout layout;
  for (const auto& p : params)
    layout.entries.push_back({p.name, static_cast<int>(p.mat->rows()),
                              static_cast<int>(p.mat->cols())});
  return layout;
}

Eigen::VectorXd flatten(const std::vector<ParamRef>& params) {
  int total = 0;
  for (const auto& p : params) total += static_cast<int>(p.mat->size());
  Eigen::VectorXd flat(total);
  int off = 0;
  for (const auto& p : params) {
    flat.segment(off, p.mat->size()) =
        Eigen::Map<const Eigen::VectorXd>(p.mat->data(), p.mat->size());
    off += static_cast<int>(p.mat->size());
  }
  return flat;
}

void unflatten(const Eigen::VectorXd& flat,
               const std::vector<ParamRef>& params) {
  int total = 0;
  for (const auto& p : params) total += static_cast<int>(p.mat->size());
  if (flat.size() != total)
    throw std::invalid_argument("unflatten: size mismatch");
  int off = 0;
  for (const auto& p : params) {
    Eigen::Map<Eigen::VectorXd>(p.mat->data(), p.mat->size()) =
        flat.segment(off, p.mat->size());
    off += static_cast<int>(p.mat->size());
  }
}

BoundParams bind(Tape& tape, const std::vector<ParamRef>& params,
                 bool trainable) {
  BoundParams out;
  out.values.reserve(params.size());
  for (const auto& p : params)
    out.values.push_back(trainable ? tape.leaf(*p.mat)
                                   : tape.constant(*p.mat));
  return out;
}

std::vector<int> default_sizes(int input_dim) {
  return {input_dim, 128, 64, 1};
}

std::vector<Act> default_acts() {
  return {Act::Softplus, Act::TanhShrink, Act::Sigmoid};
}

// --- FCN ---

FcnModel FcnModel::make(int input_dim, double dropout, std::mt19937_64& rng) {
  return make_sized(default_sizes(input_dim), default_acts(), dropout, rng);
}

FcnModel FcnModel::make_sized(std::vector<int> sizes, std::vector<Act> acts,
                              double dropout, std::mt19937_64& rng) {
  if (sizes.size() < 2 || acts.size() != sizes.size() - 1)
    throw std::invalid_argument("FcnModel: bad layer spec");
  FcnModel m;
  m.sizes = std::move(sizes);
  m.acts = std::move(acts);
  m.dropout = dropout;
  for (std::size_t i = 0; i + 1 < m.sizes.size(); ++i) {
    m.weights.push_back(kaiming_init(m.sizes[i], m.sizes[i + 1], rng));
    m.biases.push_back(Matrix::Zero(1, m.sizes[i + 1]));
  }
  return m;
}

std::vector<ParamRef> FcnModel::params() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out.push_back({"w" + std::to_string(i), &weights[i]});
    out.push_back({"b" + std::to_string(i), &biases[i]});
  }
  return out;
}

std::vector<ParamRef> FcnModel::params() const {
  return const_cast<FcnModel*>(this)->params();
}

Value FcnModel::forward(Tape& tape, Value x, const BoundParams& bound,
                        bool dropout_active, std::mt19937_64* rng) const {
  check_input(x.val(), input_dim(), "FcnModel");
  if (dropout_active && (dropout <= 0.0 || rng == nullptr))
    throw std::invalid_argument("FcnModel: dropout requested without rate/rng");
  Value a = x;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    Value w = bound.values[2 * i];
    Value b = bound.values[2 * i + 1];
    Value pre = add_rowvec(matmul(a, w), b);
    a = apply_act(pre, acts[i]);
    bool hidden = i + 1 < weights.size();
    if (hidden && dropout_active) {
      // inverted dropout: survivors scaled by 1/(1-p)
      std::bernoulli_distribution keep(1.0 - dropout);
      Matrix mask(a.val().rows(), a.val().cols());
      for (int r = 0; r < mask.rows(); ++r)
        for (int c = 0; c < mask.cols(); ++c)
          mask(r, c) = keep(*rng) ? 1.0 / (1.0 - dropout) : 0.0;
      a = mul(a, tape.constant(std::move(mask)));
    }
  }
  return a;
}

Matrix FcnModel::infer(const Matrix& x, bool dropout_active,
                       std::mt19937_64* rng) const {
  Tape tape;
  BoundParams bound = gosh::nn::bind(tape, params(), false);
  Value out = forward(tape, tape.constant(x), bound, dropout_active, rng);
  return out.val();
}

// --- NPN ---

NpnModel NpnModel::make(int input_dim, std::mt19937_64& rng) {
  return make_sized(default_sizes(input_dim), default_acts(), rng);
}

NpnModel NpnModel::make_sized(std::vector<int> sizes, std::vector<Act> acts,
                              std::mt19937_64& rng) {
  if (sizes.size() < 2 || acts.size() != sizes.size() - 1)
    throw std::invalid_argument("NpnModel: bad layer spec");
  NpnModel m;
  m.sizes = std::move(sizes);
  m.acts = std::move(acts);
  for (std::size_t i = 0; i + 1 < m.sizes.size(); ++i) {
    m.mean_weights.push_back(kaiming_init(m.sizes[i], m.sizes[i + 1], rng));
    m.mean_biases.push_back(Matrix::Zero(1, m.sizes[i + 1]));
    m.var_weights_raw.push_back(var_raw_init(m.sizes[i], m.sizes[i + 1], rng));
    m.var_biases_raw.push_back(var_raw_init(1, m.sizes[i + 1], rng));
  }
  return m;
}

std::vector<ParamRef> NpnModel::params() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < mean_weights.size(); ++i) {
    out.push_back({"wm" + std::to_string(i), &mean_weights[i]});
    out.push_back({"bm" + std::to_string(i), &mean_biases[i]});
    out.push_back({"wsr" + std::to_string(i), &var_weights_raw[i]});
    out.push_back({"bsr" + std::to_string(i), &var_biases_raw[i]});
  }
  return out;
}

std::vector<ParamRef> NpnModel::params() const {
  return const_cast<NpnModel*>(this)->params();
}

NpnOutput NpnModel::forward(Tape& tape, Value x,
                            const BoundParams& bound) const {
  check_input(x.val(), input_dim(), "NpnModel");
  Value am = x;
  Value as = tape.constant(Matrix::Zero(x.val().rows(), x.val().cols()));
  for (std::size_t i = 0; i < mean_weights.size(); ++i) {
    Value wm = bound.values[4 * i];
    Value bm = bound.values[4 * i + 1];
    Value ws = square(bound.values[4 * i + 2]);  // positivity transform
    Value bs = square(bound.values[4 * i + 3]);

    Value om = add_rowvec(matmul(am, wm), bm);
    // variance of a linear Gaussian layer:
    //   os = as*ws + (am o am)*ws + as*(wm o wm) + bs
    Value os = add_rowvec(
        add(add(matmul(as, ws), matmul(square(am), ws)),
            matmul(as, square(wm))),
        bs);
    // delta method through the activation
    Value deriv = act_derivative(om, acts[i]);
    am = apply_act(om, acts[i]);
    as = mul(square(deriv), os);
  }
  // floor the variance so the sqrt stays differentiable when tuning drives
  // the variance path to zero
  return {am, sqrt_op(clamp_min(as, kSigmaMin * kSigmaMin))};
}

std::pair<Matrix, Matrix> NpnModel::infer(const Matrix& x) const {
  Tape tape;
  BoundParams bound = gosh::nn::bind(tape, params(), false);
  NpnOutput out = forward(tape, tape.constant(x), bound);
  return {out.mu.val(), out.sigma.val()};
}

// --- LSTM ---

LstmModel LstmModel::make(int input_dim, int hidden_dim, int output_dim,
                          std::mt19937_64& rng) {
  LstmModel m;
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  m.output_dim = output_dim;
  m.w_ih = kaiming_init(input_dim, 4 * hidden_dim, rng);
  m.w_hh = kaiming_init(hidden_dim, 4 * hidden_dim, rng);
  m.b = Matrix::Zero(1, 4 * hidden_dim);
  m.w_out = kaiming_init(hidden_dim, output_dim, rng);
  m.b_out = Matrix::Zero(1, output_dim);
  return m;
}

std::vector<ParamRef> LstmModel::params() {
  return {{"w_ih", &w_ih}, {"w_hh", &w_hh}, {"b", &b},
          {"w_out", &w_out}, {"b_out", &b_out}};
}

std::vector<ParamRef> LstmModel::params() const {
  return const_cast<LstmModel*>(this)->params();
}

Value LstmModel::forward(Tape& tape, std::span<const Value> history,
                         const BoundParams& bound) const {
  if (history.empty())
    throw std::invalid_argument("LstmModel: empty history");
  for (const Value& v : history)
    if (v.val().rows() != 1 || v.val().cols() != input_dim)
      throw std::invalid_argument("LstmModel: feature dimension drift");

  Value w_ih_v = bound.values[0], w_hh_v = bound.values[1],
        b_v = bound.values[2], w_out_v = bound.values[3],
        b_out_v = bound.values[4];
  const int hd = hidden_dim;
  Value h = tape.constant(Matrix::Zero(1, hd));
  Value c = tape.constant(Matrix::Zero(1, hd));
  for (const Value& x : history) {
    Value gates = add_rowvec(add(matmul(x, w_ih_v), matmul(h, w_hh_v)), b_v);
    Value i = sigmoid(slice_cols(gates, 0, hd));
    Value f = sigmoid(slice_cols(gates, hd, hd));
    Value g = tanh_op(slice_cols(gates, 2 * hd, hd));
    Value o = sigmoid(slice_cols(gates, 3 * hd, hd));
    c = add(mul(f, c), mul(i, g));
    h = mul(o, tanh_op(c));
  }
  Value out = add_rowvec(matmul(h, w_out_v), b_out_v);
  return clamp01_st(out);
}

Matrix LstmModel::infer(const std::vector<Matrix>& history) const {
  Tape tape;
  BoundParams bound = gosh::nn::bind(tape, params(), false);
  std::vector<Value> hist;
  hist.reserve(history.size());
  for (const auto& m : history) hist.push_back(tape.constant(m));
  return forward(tape, hist, bound).val();
}

}  // namespace gosh::nn
