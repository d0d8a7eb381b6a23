#include "gosh/surrogate/bundle.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "gosh/nn/checkpoint.hpp"

namespace gosh::surrogate {

using nn::Matrix;
using nn::Tape;
using nn::Value;

namespace {

Matrix to_row(const std::vector<double>& x) {
  Matrix m(1, static_cast<int>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) m(0, static_cast<int>(i)) = x[i];
  return m;
}

Matrix batch_matrix(const IntervalRecord& latest,
                    const std::deque<IntervalRecord>& replay, int window,
                    Matrix* targets) {
  std::vector<const IntervalRecord*> rows{&latest};
  int take = std::min<int>(window, static_cast<int>(replay.size()));
  for (int i = 0; i < take; ++i)
    rows.push_back(&replay[replay.size() - 1 - i]);
  Matrix x(static_cast<int>(rows.size()), static_cast<int>(latest.x.size()));
  *targets = Matrix(static_cast<int>(rows.size()), 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r]->x.size() != latest.x.size())
      throw std::invalid_argument("tune: record layout mismatch");
    for (std::size_t c = 0; c < latest.x.size(); ++c)
      x(static_cast<int>(r), static_cast<int>(c)) = rows[r]->x[c];
    (*targets)(static_cast<int>(r), 0) = rows[r]->y;
  }
  return x;
}

}  // namespace

double value_at_risk(double mu, double sigma) {
  if (sigma < 0) throw std::invalid_argument("value_at_risk: sigma < 0");
  return mu + kVarQuantile * sigma;
}

double epistemic_uncertainty(const nn::FcnModel& g,
                             const std::vector<double>& x, int m_samples,
                             std::mt19937_64& rng) {
  if (m_samples < 2)
    throw std::invalid_argument("epistemic_uncertainty: need >= 2 samples");
  Matrix xr = to_row(x);
  std::vector<double> samples(m_samples);
  double mean = 0.0;
  for (int i = 0; i < m_samples; ++i) {
    samples[i] = g.infer(xr, true, &rng)(0, 0);
    mean += samples[i];
  }
  mean /= m_samples;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return std::sqrt(ss / (m_samples - 1));
}

SurrogateBundle SurrogateBundle::make(int input_dim, bool starred,
                                      std::mt19937_64& rng,
                                      nn::AdamWConfig opt_cfg) {
  SurrogateBundle b;
  b.f = nn::NpnModel::make(input_dim, rng);
  b.g = nn::FcnModel::make(input_dim, 0.5, rng);
  b.h = nn::FcnModel::make(input_dim, 0.0, rng);
  b.opt_f = nn::AdamW(opt_cfg);
  b.opt_g = nn::AdamW(opt_cfg);
  b.opt_h = nn::AdamW(opt_cfg);
  b.input_dim = input_dim;
  b.starred = starred;
  return b;
}

Value SurrogateBundle::lcb_node(Tape& tape, Value x, double k) const {
  if (x.val().cols() != input_dim)
    throw std::invalid_argument("lcb_node: input layout mismatch");
  nn::BoundParams bf = nn::bind(tape, f.params(), false);
  nn::NpnOutput out = f.forward(tape, x, bf);
  Value var = nn::add(out.mu, nn::scale(out.sigma, kVarQuantile));
  nn::BoundParams bh = nn::bind(tape, h.params(), false);
  Value xi_hat = h.forward(tape, x, bh, false, nullptr);
  return nn::sub(var, nn::scale(xi_hat, k));
}

LcbComponents SurrogateBundle::lcb(const std::vector<double>& x,
                                   double k) const {
  if (static_cast<int>(x.size()) != input_dim)
    throw std::invalid_argument("lcb: input layout mismatch");
  auto [mu, sigma] = f.infer(to_row(x));
  double xi_hat = h.infer(to_row(x))(0, 0);
  LcbComponents c;
  c.mu = mu(0, 0);
  c.sigma = sigma(0, 0);
  c.xi_hat = xi_hat;
  c.lcb = value_at_risk(c.mu, c.sigma) - k * xi_hat;
  return c;
}

double SurrogateBundle::tune(const IntervalRecord& latest,
                             const std::deque<IntervalRecord>& replay,
                             const std::vector<double>& x_now,
                             std::mt19937_64& rng, const TuneConfig& cfg) {
  if (static_cast<int>(latest.x.size()) != input_dim ||
      static_cast<int>(x_now.size()) != input_dim)
    throw std::invalid_argument("tune: input layout mismatch");

  Matrix targets;
  Matrix x = batch_matrix(latest, replay, cfg.replay_window, &targets);
  opt_f.set_lr(cfg.lr);
  opt_g.set_lr(cfg.lr);
  opt_h.set_lr(cfg.lr);

  {  // f: aleatoric loss
    Tape tape;
    nn::BoundParams bound = nn::bind(tape, f.params(), true);
    nn::NpnOutput out = f.forward(tape, tape.constant(x), bound);
    Value loss = nn::aleatoric_loss(out.mu, out.sigma, tape.constant(targets));
    auto grads = nn::grad(loss, bound.values);
    std::vector<Matrix> gm;
    for (const auto& g : grads) gm.push_back(g.val());
    opt_f.step(f.params(), gm);
  }
  {  // g: MSE with dropout active during training
    Tape tape;
    nn::BoundParams bound = nn::bind(tape, g.params(), true);
    Value pred = g.forward(tape, tape.constant(x), bound, true, &rng);
    Value loss = nn::mse_loss(pred, tape.constant(targets));
    auto grads = nn::grad(loss, bound.values);
    std::vector<Matrix> gm;
    for (const auto& gr : grads) gm.push_back(gr.val());
    opt_g.step(g.params(), gm);
  }

  double xi_t = epistemic_uncertainty(g, x_now, cfg.m_samples, rng);

  {  // h: one step toward the sampled xi at the current input only
    Tape tape;
    nn::BoundParams bound = nn::bind(tape, h.params(), true);
    Value pred = h.forward(tape, tape.constant(to_row(x_now)), bound, false,
                           nullptr);
    Value loss = nn::mse_loss(
        pred, tape.constant(Matrix::Constant(1, 1, xi_t)));
    auto grads = nn::grad(loss, bound.values);
    std::vector<Matrix> gm;
    for (const auto& gr : grads) gm.push_back(gr.val());
    opt_h.step(h.params(), gm);
  }
  return xi_t;
}

nlohmann::json bundle_checkpoint(const SurrogateBundle& b,
                                 const ExplorationState& e) {
  nlohmann::json j;
  j["version"] = nn::kCheckpointVersion;
  j["kind"] = "bundle";
  j["starred"] = b.starred;
  j["input_dim"] = b.input_dim;
  j["f"] = nn::to_checkpoint(b.f);
  j["g"] = nn::to_checkpoint(b.g);
  j["h"] = nn::to_checkpoint(b.h);
  j["exploration"] = {{"k", e.k},
                      {"xi_ma", e.xi_ma},
                      {"psi", e.psi},
                      {"delta", e.delta}};
  return j;
}

std::pair<SurrogateBundle, ExplorationState> bundle_from_checkpoint(
    const nlohmann::json& j) {
  if (!j.contains("kind") || j.at("kind").get<std::string>() != "bundle")
    throw std::runtime_error("bundle checkpoint: wrong kind");
  SurrogateBundle b;
  b.f = nn::npn_from_checkpoint(j.at("f"));
  b.g = nn::fcn_from_checkpoint(j.at("g"));
  b.h = nn::fcn_from_checkpoint(j.at("h"));
  b.input_dim = j.at("input_dim").get<int>();
  b.starred = j.at("starred").get<bool>();
  if (b.f.input_dim() != b.input_dim || b.g.input_dim() != b.input_dim ||
      b.h.input_dim() != b.input_dim)
    throw std::runtime_error("bundle checkpoint: inconsistent input layout");
  ExplorationState e;
  const auto& je = j.at("exploration");
  e.k = je.at("k").get<double>();
  e.xi_ma = je.at("xi_ma").get<double>();
  e.psi = je.at("psi").get<double>();
  e.delta = je.at("delta").get<double>();
  return {std::move(b), e};
}

}  // namespace gosh::surrogate
