#include "gosh/sched/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gosh/opt/discretize.hpp"

namespace gosh::sched {

using nn::Matrix;
using nn::Tape;
using nn::Value;

std::string scheduler_name(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::Gosh: return "gosh";
    case SchedulerKind::GoshStar: return "gosh-star";
    case SchedulerKind::Gobi: return "gobi";
    case SchedulerKind::Sgobi: return "sgobi";
    case SchedulerKind::Hgobi: return "hgobi";
    case SchedulerKind::HgobiStar: return "hgobi-star";
    case SchedulerKind::SgobiStar: return "sgobi-star";
    case SchedulerKind::Random: return "random";
  }
  throw std::invalid_argument("scheduler_name: unknown kind");
}

SchedulerKind scheduler_from_name(const std::string& name) {
  for (SchedulerKind k :
       {SchedulerKind::Gosh, SchedulerKind::GoshStar, SchedulerKind::Gobi,
        SchedulerKind::Sgobi, SchedulerKind::Hgobi, SchedulerKind::HgobiStar,
        SchedulerKind::SgobiStar, SchedulerKind::Random})
    if (scheduler_name(k) == name) return k;
  throw std::invalid_argument("unknown scheduler: " + name);
}

bool is_starred(SchedulerKind kind) {
  return kind == SchedulerKind::GoshStar || kind == SchedulerKind::HgobiStar ||
         kind == SchedulerKind::SgobiStar;
}

bool uses_lcb(SchedulerKind kind) {
  return kind == SchedulerKind::Gosh || kind == SchedulerKind::GoshStar ||
         kind == SchedulerKind::Hgobi || kind == SchedulerKind::HgobiStar;
}

bool second_order(SchedulerKind kind) {
  return kind == SchedulerKind::Gosh || kind == SchedulerKind::GoshStar ||
         kind == SchedulerKind::Sgobi || kind == SchedulerKind::SgobiStar;
}

bool is_learned(SchedulerKind kind) { return kind != SchedulerKind::Random; }

double objective_score(const sim::IntervalMetrics& m,
                       const ObjectiveSpec& spec) {
  if (spec.alpha < 0 || spec.alpha > 1 || spec.beta < 0 || spec.beta > 1 ||
      std::abs(spec.alpha + spec.beta - 1.0) > 1e-12)
    throw std::invalid_argument("objective_score: need alpha + beta = 1");
  return spec.alpha * m.aec + spec.beta * m.art_norm;
}

sim::DecisionMatrix initialize_decision(int t,
                                        const sim::DecisionMatrix& previous,
                                        const std::vector<char>& active_now,
                                        const std::vector<char>& active_prev,
                                        std::mt19937_64& rng) {
  const int rows = static_cast<int>(active_now.size());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  if (t == 0 || previous.rows == 0) {
    sim::DecisionMatrix d = previous;
    if (d.rows != rows)
      throw std::invalid_argument("initialize_decision: row count mismatch");
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < d.cols; ++c)
        d.at(r, c) = active_now[r] ? uni(rng) : 0.0;
    return d;
  }
  if (previous.rows != rows ||
      active_prev.size() != static_cast<std::size_t>(rows))
    throw std::invalid_argument("initialize_decision: row count mismatch");
  sim::DecisionMatrix d = previous;
  for (int r = 0; r < rows; ++r) {
    if (!active_now[r]) {
      for (int c = 0; c < d.cols; ++c) d.at(r, c) = 0.0;  // departed / empty
    } else if (!active_prev[r]) {
      for (int c = 0; c < d.cols; ++c) d.at(r, c) = uni(rng);  // new arrival
    }
  }
  return d;
}

Scheduler Scheduler::make_cold(SchedulerConfig cfg, int num_hosts,
                               int num_slots, std::uint64_t seed) {
  Scheduler s;
  s.cfg_ = cfg;
  s.rng_.seed(seed);
  s.num_hosts_ = num_hosts;
  s.num_slots_ = num_slots;
  s.exploration_ = cfg.exploration;
  s.previous_ = sim::DecisionMatrix::zeros(num_slots, num_hosts);
  s.previous_active_.assign(num_slots, 0);

  const int flat = sim::ClusterState::flat_dim(num_hosts, num_slots);
  const int phi = num_slots * num_hosts;
  const SchedulerKind k = cfg.kind;
  if (k == SchedulerKind::Random) return s;

  const int in = flat + phi + (is_starred(k) ? 1 : 0);
  if (uses_lcb(k)) {
    s.bundle_ = surrogate::SurrogateBundle::make(in, is_starred(k), s.rng_);
  } else {
    s.fcn_ = nn::FcnModel::make(in, 0.0, s.rng_);
    s.opt_fcn_ = nn::AdamW(nn::AdamWConfig{});
  }
  if (is_starred(k)) {
    const int inner_in = flat + phi;
    if (uses_lcb(k))
      s.inner_bundle_ =
          surrogate::SurrogateBundle::make(inner_in, false, s.rng_);
    else
      s.inner_fcn_ = nn::FcnModel::make(inner_in, 0.0, s.rng_);
    s.lstm_ = nn::LstmModel::make(flat, cfg.lstm_hidden, flat, s.rng_);
  }
  return s;
}

sim::DecisionMatrix Scheduler::random_decision(const sim::Simulator& sim,
                                               const std::vector<char>& active) {
  const auto& hosts = sim.hosts();
  std::vector<double> free_ram(hosts.size());
  for (std::size_t h = 0; h < hosts.size(); ++h)
    free_ram[h] = hosts[h].ram_capacity;
  sim::DecisionMatrix d =
      sim::DecisionMatrix::zeros(num_slots_, num_hosts_);
  for (int r = 0; r < num_slots_; ++r) {
    if (!active[r]) continue;
    double need = sim.slot_task(r).ram_reservation();
    std::vector<int> feasible;
    for (int c = 0; c < num_hosts_; ++c)
      if (need <= free_ram[c]) feasible.push_back(c);
    if (feasible.empty()) continue;  // WAITING
    std::uniform_int_distribution<int> pick(
        0, static_cast<int>(feasible.size()) - 1);
    int c = feasible[pick(rng_)];
    d.at(r, c) = 1.0;
    free_ram[c] -= need;
  }
  return d;
}

sim::DecisionMatrix Scheduler::optimize_decision(
    const std::vector<double>& context, const surrogate::SurrogateBundle* lcb,
    const nn::FcnModel* plain, const sim::Simulator& sim,
    const std::vector<char>& active, int* iterations,
    sim::DecisionMatrix* init_hint, bool inner_pass) {
  const int phi_dim = num_slots_ * num_hosts_;
  Matrix ctx(1, static_cast<int>(context.size()));
  for (std::size_t i = 0; i < context.size(); ++i)
    ctx(0, static_cast<int>(i)) = context[i];
  const double k_now = exploration_.k;

  opt::ObjectiveFn objective = [&](Tape& tape, Value phi) -> Value {
    Value x = nn::concat_cols(tape.constant(ctx), phi);
    if (lcb) return lcb->lcb_node(tape, x, k_now);
    nn::BoundParams bound = nn::bind(tape, plain->params(), false);
    return plain->forward(tape, x, bound, false, nullptr);
  };

  Eigen::VectorXd init(phi_dim);
  for (int i = 0; i < phi_dim; ++i) init[i] = init_hint->data[i];

  opt::MinimizeResult res;
  opt::HessianState& hess = inner_pass ? inner_hessian_ : hessian_;
  if (second_order(cfg_.kind))
    res = opt::second_order_minimize(objective, init, cfg_.optimizer, hess,
                                     rng_);
  else
    res = opt::first_order_minimize(objective, init, cfg_.optimizer);
  *iterations = res.iterations;

  std::vector<double> phi_flat(res.x.data(), res.x.data() + phi_dim);
  std::vector<double> task_ram(num_slots_, 0.0);
  std::vector<double> host_free(num_hosts_);
  for (int r = 0; r < num_slots_; ++r)
    if (active[r]) task_ram[r] = sim.slot_task(r).ram_reservation();
  for (int c = 0; c < num_hosts_; ++c)
    host_free[c] = sim.hosts()[c].ram_capacity;
  return opt::discretize(phi_flat, task_ram, active, host_free);
}

std::vector<double> Scheduler::context_row(
    const sim::Simulator& sim, const std::vector<double>& state_flat,
    double* cosim_score, int* inner_iterations) {
  if (!is_starred(cfg_.kind)) return state_flat;

  history_.push_back(state_flat);
  while (static_cast<int>(history_.size()) > cfg_.history_window)
    history_.pop_front();
  std::vector<Matrix> hist;
  hist.reserve(history_.size());
  for (const auto& row : history_) {
    Matrix m(1, static_cast<int>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i)
      m(0, static_cast<int>(i)) = row[i];
    hist.push_back(std::move(m));
  }
  Matrix pred = lstm_->infer(hist);
  std::vector<double> pred_flat(pred.data(), pred.data() + pred.size());

  // candidate decision from the inner (non-starred) models on the predicted
  // state, then one co-simulated interval to score it
  sim::Simulator cosim = sim;
  cosim.override_state(
      sim::unflatten_state(pred_flat, sim.hosts(), num_slots_));
  std::vector<char> active(num_slots_, 0);
  for (int s = 0; s < num_slots_; ++s) active[s] = sim.slot_active(s) ? 1 : 0;
  sim::DecisionMatrix init = initialize_decision(
      t_, previous_, active, previous_active_, rng_);
  sim::DecisionMatrix candidate = optimize_decision(
      pred_flat, inner_bundle_ ? &*inner_bundle_ : nullptr,
      inner_fcn_ ? &*inner_fcn_ : nullptr, sim, active, inner_iterations,
      &init, true);
  sim::IntervalMetrics m = cosim.step(candidate);
  double o_bar = objective_score(m, cfg_.objective);
  *cosim_score = o_bar;

  std::vector<double> ctx = state_flat;
  ctx.push_back(o_bar);
  return ctx;
}

void Scheduler::tune_pending(double* xi_out) {
  if (!pending_ || !cfg_.online_tuning) return;
  if (bundle_) {
    double xi = bundle_->tune(*pending_, replay_, last_x_, rng_, cfg_.tune);
    exploration_ = surrogate::update_exploration(exploration_, xi);
    *xi_out = xi;
  } else if (fcn_) {
    // one MSE step on the latest record plus the replay window
    Tape tape;
    int take = std::min<int>(cfg_.tune.replay_window,
                             static_cast<int>(replay_.size()));
    Matrix x(take + 1, static_cast<int>(pending_->x.size()));
    Matrix y(take + 1, 1);
    for (std::size_t c = 0; c < pending_->x.size(); ++c)
      x(0, static_cast<int>(c)) = pending_->x[c];
    y(0, 0) = pending_->y;
    for (int i = 0; i < take; ++i) {
      const auto& rec = replay_[replay_.size() - 1 - i];
      for (std::size_t c = 0; c < rec.x.size(); ++c)
        x(i + 1, static_cast<int>(c)) = rec.x[c];
      y(i + 1, 0) = rec.y;
    }
    opt_fcn_->set_lr(cfg_.tune.lr);
    nn::BoundParams bound = nn::bind(tape, fcn_->params(), true);
    Value pred = fcn_->forward(tape, tape.constant(x), bound, false, nullptr);
    Value loss = nn::mse_loss(pred, tape.constant(y));
    auto grads = nn::grad(loss, bound.values);
    std::vector<Matrix> gm;
    for (const auto& g : grads) gm.push_back(g.val());
    opt_fcn_->step(fcn_->params(), gm);
  }
  replay_.push_back(std::move(*pending_));
  while (static_cast<int>(replay_.size()) > cfg_.replay_capacity)
    replay_.pop_front();
  pending_.reset();
}

ScheduleOutcome Scheduler::schedule(const sim::Simulator& sim) {
  auto start = std::chrono::steady_clock::now();
  if (static_cast<int>(sim.hosts().size()) != num_hosts_ ||
      sim.num_slots() != num_slots_)
    throw std::invalid_argument("schedule: cluster layout mismatch");

  ScheduleOutcome out;
  out.k = exploration_.k;

  std::vector<char> active(num_slots_, 0);
  for (int s = 0; s < num_slots_; ++s) active[s] = sim.slot_active(s) ? 1 : 0;
  std::vector<double> state_flat = sim.state().flatten(sim.hosts());

  if (cfg_.kind == SchedulerKind::Random) {
    out.decision = random_decision(sim, active);
  } else if (sim.active_task_count() == 0) {
    tune_pending(&out.xi);
    out.decision = sim::DecisionMatrix::zeros(num_slots_, num_hosts_);
    if (is_starred(cfg_.kind)) {
      history_.push_back(state_flat);
      while (static_cast<int>(history_.size()) > cfg_.history_window)
        history_.pop_front();
    }
  } else {
    tune_pending(&out.xi);
    out.k = exploration_.k;
    int inner_iters = 0;
    std::vector<double> ctx =
        context_row(sim, state_flat, &out.cosim_score, &inner_iters);
    sim::DecisionMatrix init = initialize_decision(
        t_, previous_, active, previous_active_, rng_);
    out.decision = optimize_decision(
        ctx, bundle_ ? &*bundle_ : nullptr, fcn_ ? &*fcn_ : nullptr, sim,
        active, &out.iterations, &init, false);
    last_x_ = ctx;
    for (double v : out.decision.data) last_x_.push_back(v);
    pending_ = surrogate::IntervalRecord{last_x_, 0.0};
  }

  previous_ = out.decision;
  previous_active_ = active;
  ++t_;
  out.scheduling_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  return out;
}

void Scheduler::observe(double realized_objective) {
  if (pending_) pending_->y = realized_objective;
}

}  // namespace gosh::sched
