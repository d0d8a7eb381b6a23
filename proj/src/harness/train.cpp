#include "gosh/harness/train.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "gosh/nn/adamw.hpp"
#include "gosh/nn/checkpoint.hpp"
#include "gosh/nn/losses.hpp"

namespace gosh::harness {

using nlohmann::json;
using nn::Matrix;
using nn::Tape;
using nn::Value;

namespace {

Matrix rows_of(const Dataset& d, const std::vector<int>& idx) {
  Matrix x(static_cast<int>(idx.size()), d.x_dim());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (int c = 0; c < d.x_dim(); ++c)
      x(static_cast<int>(r), c) = d.records[idx[r]].x[c];
  return x;
}

Matrix targets_of(const Dataset& d, const std::vector<int>& idx) {
  Matrix y(static_cast<int>(idx.size()), 1);
  for (std::size_t r = 0; r < idx.size(); ++r)
    y(static_cast<int>(r), 0) = d.records[idx[r]].y;
  return y;
}

double npn_val_loss(const nn::NpnModel& f, const Matrix& x, const Matrix& y) {
  Tape tape;
  nn::BoundParams bound = nn::bind(tape, f.params(), false);
  nn::NpnOutput out = f.forward(tape, tape.constant(x), bound);
  return nn::aleatoric_loss(out.mu, out.sigma, tape.constant(y)).val()(0, 0);
}

double npn_mean_mse(const nn::NpnModel& f, const Matrix& x, const Matrix& y) {
  auto [mu, sigma] = f.infer(x);
  return (mu - y).array().square().mean();
}

double fcn_val_mse(const nn::FcnModel& g, const Matrix& x, const Matrix& y) {
  return (g.infer(x) - y).array().square().mean();
}

template <typename StepFn, typename ValFn>
void epoch_loop(int epochs, int patience, StepFn train_epoch, ValFn val_loss,
                const std::function<void()>& snapshot,
                const std::function<void()>& restore) {
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int e = 0; e < epochs; ++e) {
    train_epoch(e);
    double v = val_loss();
    if (!std::isfinite(v))
      throw std::runtime_error("training diverged: non-finite loss at epoch " +
                               std::to_string(e));
    if (v < best - 1e-12) {
      best = v;
      since_best = 0;
      snapshot();
    } else if (++since_best >= patience) {
      break;
    }
  }
  restore();
}

struct TrainedPair {
  nn::NpnModel f;
  nn::FcnModel g;
  double f_kld = 0.0, f_mse = 0.0, g_mse = 0.0;
};

TrainedPair train_fg(const Dataset& d, const std::vector<int>& train_idx,
                     const std::vector<int>& val_idx, const TrainConfig& cfg,
                     std::mt19937_64& rng) {
  TrainedPair out;
  out.f = nn::NpnModel::make(d.x_dim(), rng);
  out.g = nn::FcnModel::make(d.x_dim(), 0.5, rng);
  nn::AdamWConfig oc;
  oc.lr = cfg.lr;
  oc.weight_decay = cfg.weight_decay;
  nn::AdamW opt_f(oc), opt_g(oc);

  Matrix xv = rows_of(d, val_idx), yv = targets_of(d, val_idx);
  std::vector<int> order = train_idx;

  auto minibatches = [&](auto&& step) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      std::vector<int> batch(
          order.begin() + start,
          order.begin() + std::min(order.size(),
                                   start + static_cast<std::size_t>(
                                               cfg.batch_size)));
      step(rows_of(d, batch), targets_of(d, batch));
    }
  };

  {  // NPN on the aleatoric loss
    Eigen::VectorXd best_params;
    epoch_loop(
        cfg.epochs, cfg.patience,
        [&](int) {
          minibatches([&](const Matrix& x, const Matrix& y) {
            Tape tape;
            nn::BoundParams bound = nn::bind(tape, out.f.params(), true);
            nn::NpnOutput o = out.f.forward(tape, tape.constant(x), bound);
            Value loss = nn::aleatoric_loss(o.mu, o.sigma, tape.constant(y));
            auto grads = nn::grad(loss, bound.values);
            std::vector<Matrix> gm;
            for (const auto& g : grads) gm.push_back(g.val());
            opt_f.step(out.f.params(), gm);
          });
        },
        [&] { return npn_val_loss(out.f, xv, yv); },
        [&] { best_params = nn::flatten(out.f.params()); },
        [&] { if (best_params.size()) nn::unflatten(best_params, out.f.params()); });
  }
  {  // teacher on MSE, dropout active
    Eigen::VectorXd best_params;
    epoch_loop(
        cfg.epochs, cfg.patience,
        [&](int) {
          minibatches([&](const Matrix& x, const Matrix& y) {
            Tape tape;
            nn::BoundParams bound = nn::bind(tape, out.g.params(), true);
            Value pred =
                out.g.forward(tape, tape.constant(x), bound, true, &rng);
            Value loss = nn::mse_loss(pred, tape.constant(y));
            auto grads = nn::grad(loss, bound.values);
            std::vector<Matrix> gm;
            for (const auto& g : grads) gm.push_back(g.val());
            opt_g.step(out.g.params(), gm);
          });
        },
        [&] { return fcn_val_mse(out.g, xv, yv); },
        [&] { best_params = nn::flatten(out.g.params()); },
        [&] { if (best_params.size()) nn::unflatten(best_params, out.g.params()); });
  }

  out.f_kld = npn_val_loss(out.f, xv, yv);
  out.f_mse = npn_mean_mse(out.f, xv, yv);
  out.g_mse = fcn_val_mse(out.g, xv, yv);
  return out;
}

}  // namespace

TrainResult train_models(const Dataset& d, const TrainConfig& cfg) {
  if (d.records.empty()) throw std::invalid_argument("train: empty dataset");
  const int n = static_cast<int>(d.records.size());
  TrainResult res;
  std::mt19937_64 rng(cfg.seed);

  // cross-validation folds: fresh shuffle per fold, 80/20 split
  for (int fold = 0; fold < cfg.folds; ++fold) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    int cut = std::max(1, static_cast<int>(0.8 * n));
    if (cut >= n) cut = n - 1;
    std::vector<int> train_idx(idx.begin(), idx.begin() + cut);
    std::vector<int> val_idx(idx.begin() + cut, idx.end());
    TrainedPair p = train_fg(d, train_idx, val_idx, cfg, rng);
    res.folds.push_back({fold, p.f_kld, p.f_mse, p.g_mse});
  }

  // final models on a 90/10 split of the full data
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  int cut = std::max(1, static_cast<int>(0.9 * n));
  if (cut >= n) cut = n - 1;
  std::vector<int> train_idx(idx.begin(), idx.begin() + cut);
  std::vector<int> val_idx(idx.begin() + cut, idx.end());
  TrainedPair fin = train_fg(d, train_idx, val_idx, cfg, rng);

  res.bundle = surrogate::SurrogateBundle::make(d.x_dim(), d.starred, rng);
  res.bundle.f = std::move(fin.f);
  res.bundle.g = std::move(fin.g);

  {  // student h: fit the sampled epistemic uncertainty of the teacher
    Matrix xi(n, 1);
    for (int i = 0; i < n; ++i)
      xi(i, 0) = surrogate::epistemic_uncertainty(
          res.bundle.g, d.records[i].x, cfg.xi_samples, rng);
    nn::AdamWConfig oc;
    oc.lr = cfg.lr;
    oc.weight_decay = cfg.weight_decay;
    nn::AdamW opt_h(oc);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto val_mse = [&] {
      Matrix pred = res.bundle.h.infer(rows_of(d, order));
      double s = 0;
      for (int i = 0; i < n; ++i)
        s += (pred(i, 0) - xi(i, 0)) * (pred(i, 0) - xi(i, 0));
      return s / n;
    };
    Eigen::VectorXd best;
    epoch_loop(
        cfg.epochs, cfg.patience,
        [&](int) {
          std::shuffle(order.begin(), order.end(), rng);
          for (int start = 0; start < n; start += cfg.batch_size) {
            std::vector<int> batch(
                order.begin() + start,
                order.begin() + std::min(n, start + cfg.batch_size));
            Matrix xb = rows_of(d, batch);
            Matrix yb(static_cast<int>(batch.size()), 1);
            for (std::size_t r = 0; r < batch.size(); ++r)
              yb(static_cast<int>(r), 0) = xi(batch[r], 0);
            Tape tape;
            nn::BoundParams bound =
                nn::bind(tape, res.bundle.h.params(), true);
            Value pred = res.bundle.h.forward(tape, tape.constant(xb), bound,
                                              false, nullptr);
            Value loss = nn::mse_loss(pred, tape.constant(yb));
            auto grads = nn::grad(loss, bound.values);
            std::vector<Matrix> gm;
            for (const auto& g : grads) gm.push_back(g.val());
            opt_h.step(res.bundle.h.params(), gm);
          }
        },
        val_mse, [&] { best = nn::flatten(res.bundle.h.params()); },
        [&] { if (best.size()) nn::unflatten(best, res.bundle.h.params()); });
    res.h_mse = val_mse();
  }

  if (cfg.train_lstm && n > 2) {
    const int flat = sim::ClusterState::flat_dim(d.num_hosts, d.num_slots);
    res.lstm = nn::LstmModel::make(flat, cfg.lstm_hidden, flat, rng);
    nn::AdamWConfig oc;
    oc.lr = std::max(cfg.lr, 1e-3);  // sequence model needs a workable rate
    oc.weight_decay = cfg.weight_decay;
    nn::AdamW opt(oc);
    auto state_row = [&](int t) {
      Matrix m(1, flat);
      for (int c = 0; c < flat; ++c) m(0, c) = d.records[t].x[c];
      return m;
    };
    std::uniform_int_distribution<int> pick(0, n - 2);
    const int batches_per_epoch = 8, windows_per_batch = 8;
    double last_mse = 0.0;
    for (int e = 0; e < cfg.lstm_epochs; ++e) {
      for (int b = 0; b < batches_per_epoch; ++b) {
        Tape tape;
        nn::BoundParams bound = nn::bind(tape, res.lstm->params(), true);
        Value total;
        for (int w = 0; w < windows_per_batch; ++w) {
          int end = pick(rng);  // predict state end+1 from [start, end]
          int start = std::max(0, end - cfg.lstm_window + 1);
          std::vector<Value> hist;
          for (int t = start; t <= end; ++t)
            hist.push_back(tape.constant(state_row(t)));
          Value pred = res.lstm->forward(tape, hist, bound);
          Value err = nn::mse_loss(pred, tape.constant(state_row(end + 1)));
          total = total.valid() ? nn::add(total, err) : err;
        }
        total = nn::scale(total, 1.0 / windows_per_batch);
        last_mse = total.val()(0, 0);
        auto grads = nn::grad(total, bound.values);
        std::vector<Matrix> gm;
        for (const auto& g : grads) gm.push_back(g.val());
        opt.step(res.lstm->params(), gm);
      }
    }
    res.lstm_mse = last_mse;
  }
  return res;
}

json train_checkpoint(const TrainResult& r) {
  json j;
  j["version"] = nn::kCheckpointVersion;
  j["kind"] = r.bundle.starred ? "gosh-star" : "gosh";
  surrogate::ExplorationState e;
  j["bundle"] = surrogate::bundle_checkpoint(r.bundle, e);
  if (r.lstm) j["lstm"] = nn::to_checkpoint(*r.lstm);
  j["exploration"] = {{"k", e.k}, {"xi_ma", e.xi_ma}, {"psi", e.psi},
                      {"delta", e.delta}};
  return j;
}

json train_report(const TrainResult& r) {
  json folds = json::array();
  for (const auto& f : r.folds)
    folds.push_back({{"fold", f.fold},
                     {"npn_kld", f.f_kld},
                     {"npn_mse", f.f_mse},
                     {"fcn_mse", f.g_mse}});
  return {{"folds", folds}, {"h_mse", r.h_mse}, {"lstm_mse", r.lstm_mse}};
}

}  // namespace gosh::harness
