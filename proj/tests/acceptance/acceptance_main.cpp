// Acceptance gate: runs the ten release criteria end to end and prints one
// pass/fail line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gosh/harness/compare.hpp"
#include "gosh/harness/dataset.hpp"
#include "gosh/harness/experiment.hpp"
#include "gosh/harness/train.hpp"
#include "gosh/nn/adamw.hpp"
#include "gosh/nn/checkpoint.hpp"
#include "gosh/nn/losses.hpp"
#include "gosh/opt/minimize.hpp"
#include "gosh/sim/metrics.hpp"
#include "gosh/surrogate/bundle.hpp"

using namespace gosh;
using nlohmann::json;
using nn::Matrix;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kGradTol = 1e-4;        // relative gradient agreement
constexpr double kHutchRelTol = 0.05;    // Hutchinson vs exact diagonal
constexpr double kNewtonTol = 1e-6;      // max-norm distance to the optimum
constexpr int kNewtonIters = 2;          // Newton budget
constexpr int kFirstOrderIters = 10;     // first-order must exceed this
constexpr double kPearsonMin = 0.8;      // sigma calibration
constexpr double kNpnGain = 0.30;        // NPN loss at least 30% below FCN
constexpr double kSweepSlack = 1.05;     // dynamic-k response-time slack
constexpr double kAgilityFactor = 0.5;   // recovery-interval ratio
constexpr double kAgilitySlack = 5.0;    // recovery-interval additive slack
constexpr double kExactTol = 1e-12;      // closed-form identities

int g_failures = 0;

void report(int idx, const std::string& name, bool ok,
            const std::string& detail = "") {
  std::printf("criterion %2d %-28s: %s%s%s\n", idx, name.c_str(),
              ok ? "PASS" : "FAIL", detail.empty() ? "" : " — ",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void run_criterion(int idx, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& fn) {
  auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    auto [r, d] = fn();
    ok = r;
    detail = d;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  std::fprintf(stderr, "[acceptance] criterion %d finished in %.1fs\n", idx,
               secs);
  report(idx, name, ok, detail);
}

Matrix row_of(const Eigen::VectorXd& v) {
  Matrix m(1, v.size());
  for (int i = 0; i < v.size(); ++i) m(0, i) = v[i];
  return m;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Shared fixtures: host profiles, a trained checkpoint and an SLA reference.

json host_entry(int id, double ips, double ram, double idle_w, double peak_w,
                const char* lat) {
  json h;
  h["id"] = id;
  h["ips"] = ips;
  h["ram"] = ram;
  h["disk"] = 1e5;
  h["bw"] = 100.0;
  h["latency_class"] = lat;
  h["power_profile"] =
      json::array({{{"utilization", 0.0}, {"watts", idle_w}},
                   {{"utilization", 0.5}, {"watts", (idle_w + peak_w) / 2}},
                   {{"utilization", 1.0}, {"watts", peak_w}}});
  return h;
}

fs::path write_desk_hosts(const fs::path& dir, int scale) {
  json j;
  j["hosts"] = json::array();
  int id = 0;
  for (int rep = 0; rep < scale; ++rep) {
    for (int i = 0; i < 4; ++i)  // small edge boxes
      j["hosts"].push_back(host_entry(id++, 2000, 4096, 60, 140, "edge"));
    for (int i = 0; i < 4; ++i)  // mid-tier
      j["hosts"].push_back(host_entry(id++, 4000, 8192, 90, 220, "edge"));
    for (int i = 0; i < 2; ++i)  // large cloud nodes
      j["hosts"].push_back(host_entry(id++, 8000, 16384, 150, 400, "cloud"));
  }
  auto path = dir / (scale == 1 ? "hosts_desk10.json" : "hosts_sim50.json");
  std::ofstream(path) << j.dump(2);
  return path;
}

struct Artifacts {
  fs::path dir;
  fs::path hosts10, hosts50;
  fs::path checkpoint;
  fs::path sla;
  harness::ExperimentConfig base;  // desk profile, gosh, checkpointed
  bool ready = false;
  std::string error;
};

Artifacts prepare_artifacts() {
  Artifacts a;
  a.dir = fs::temp_directory_path() / "gosh_acceptance";
  fs::remove_all(a.dir);
  fs::create_directories(a.dir);
  a.hosts10 = write_desk_hosts(a.dir, 1);
  a.hosts50 = write_desk_hosts(a.dir, 5);

  a.base.hosts_file = a.hosts10.string();
  a.base.scheduler = "gosh";
  a.base.intervals = 100;
  a.base.lambda = 1.2;
  a.base.max_task_slots = 12;
  a.base.seeds = {1, 2, 3, 4, 5};
  // low-noise epistemic sampling keeps the dynamic exploration weight from
  // random-walking on sampling error
  a.base.tune.m_samples = 50;

  try {
    std::fprintf(stderr, "[acceptance] generating training dataset...\n");
    harness::ExperimentConfig gen_cfg = a.base;
    gen_cfg.scheduler = "random";
    harness::Dataset data = harness::gen_dataset(gen_cfg, 1500, 42);

    std::fprintf(stderr, "[acceptance] training surrogate models...\n");
    harness::TrainConfig tc;
    tc.folds = 3;
    tc.epochs = 150;
    tc.patience = 15;
    tc.lr = 1e-3;
    tc.seed = 42;
    tc.train_lstm = false;
    harness::TrainResult tr = harness::train_models(data, tc);
    a.checkpoint = a.dir / "checkpoint.json";
    nn::save_json(harness::train_checkpoint(tr), a.checkpoint.string());
    a.base.checkpoint = a.checkpoint.string();

    // SLA deadlines from a random-scheduler reference run so both policies
    // are graded against the same bar
    std::fprintf(stderr, "[acceptance] running SLA reference...\n");
    harness::ExperimentConfig ref = a.base;
    ref.scheduler = "random";
    ref.checkpoint.clear();
    harness::run_experiment(ref, 1, (a.dir / "ref").string());
    a.sla = a.dir / "ref" / "sla.json";
    a.base.sla_file = a.sla.string();
    a.ready = true;
  } catch (const std::exception& e) {
    a.error = e.what();
  }
  return a;
}

// Objective from a frozen network, used by the optimizer criteria.
opt::ObjectiveFn network_objective(const nn::FcnModel& net) {
  return [&net](nn::Tape& tape, nn::Value x) {
    nn::BoundParams bound = nn::bind(tape, net.params(), false);
    return net.forward(tape, x, bound, false, nullptr);
  };
}

// Exact Hessian-vector product by differentiating the directional derivative.
Eigen::VectorXd exact_hvp(const opt::ObjectiveFn& obj, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& v) {
  nn::Tape tape;
  nn::Value xv = tape.leaf(row_of(x));
  nn::Value o = obj(tape, xv);
  nn::Value g = nn::grad(o, std::vector<nn::Value>{xv})[0];
  nn::Value gv = nn::sum(nn::mul(g, tape.constant(row_of(v))));
  nn::Value h = nn::grad(gv, std::vector<nn::Value>{xv})[0];
  Eigen::VectorXd out(x.size());
  for (int i = 0; i < x.size(); ++i) out[i] = h.val()(0, i);
  return out;
}

// Number of intervals after the regime switch until the 5-interval moving
// average of the objective returns within 10% of the pre-switch mean.
int recovery_intervals(const std::vector<harness::IntervalRow>& rows,
                       int switch_t) {
  const int lo = std::max(0, switch_t - 20);
  double pre = 0;
  for (int t = lo; t < switch_t; ++t) pre += rows[t].objective;
  pre /= (switch_t - lo);
  const double threshold = pre * 1.10 + 0.01;
  const int w = 5;
  for (int t = switch_t; t + w <= static_cast<int>(rows.size()); ++t) {
    double ma = 0;
    for (int i = t; i < t + w; ++i) ma += rows[i].objective;
    ma /= w;
    if (ma <= threshold) return t - switch_t;
  }
  return static_cast<int>(rows.size()) - switch_t;
}

std::vector<harness::IntervalRow> load_rows(const fs::path& run_dir) {
  return harness::parse_metrics_csv(read_file(run_dir / "metrics.csv"));
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients vs central finite differences.

double aleatoric_value(const nn::NpnModel& m, const Matrix& x,
                       const Matrix& y) {
  auto [mu, sigma] = m.infer(x);
  double total = 0;
  for (int i = 0; i < mu.rows(); ++i) {
    double s = std::max(sigma(i, 0), nn::kSigmaMin);
    double d = mu(i, 0) - y(i, 0);
    total += d * d / (2 * s * s) + 0.5 * std::log(s * s);
  }
  return total / mu.rows();
}

double mse_value(const Matrix& pred, const Matrix& y) {
  return (pred - y).squaredNorm() / pred.size();
}

bool grads_match(const std::vector<Matrix>& analytic,
                 const std::vector<nn::ParamRef>& params,
                 const std::function<double()>& value, double* worst) {
  bool ok = true;
  for (std::size_t p = 0; p < params.size(); ++p) {
    Matrix& m = *params[p].mat;
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) {
        const double orig = m(i, j);
        const double h = 1e-5 * std::max(1.0, std::abs(orig));
        m(i, j) = orig + h;
        const double fp = value();
        m(i, j) = orig - h;
        const double fm = value();
        m(i, j) = orig;
        const double num = (fp - fm) / (2 * h);
        const double ana = analytic[p](i, j);
        const double err =
            std::abs(ana - num) / std::max(1.0, std::abs(num));
        *worst = std::max(*worst, err);
        if (err > kGradTol) ok = false;
      }
  }
  return ok;
}

std::pair<bool, std::string> criterion_gradients() {
  double worst = 0;
  int models = 0;
  for (int i = 0; i < 52; ++i) {
    std::mt19937_64 rng(100 + i);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int d = 2 + static_cast<int>(rng() % 4);
    const int n = 3;
    Matrix x(n, d), y(n, 1);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < d; ++c) x(r, c) = u(rng);
      y(r, 0) = u(rng);
    }
    bool ok = true;
    switch (i % 4) {
      case 0: {  // heteroscedastic NPN loss
        auto m = nn::NpnModel::make_sized({d, 6, 1},
                                          {nn::Act::Softplus, nn::Act::Sigmoid},
                                          rng);
        for (auto& vb : m.var_biases_raw) vb.array() += 0.7;
        nn::Tape tape;
        nn::BoundParams bound = nn::bind(tape, m.params(), true);
        nn::NpnOutput out = m.forward(tape, tape.constant(x), bound);
        nn::Value loss =
            nn::aleatoric_loss(out.mu, out.sigma, tape.constant(y));
        auto gs = nn::grad(loss, bound.values);
        std::vector<Matrix> gm;
        for (auto& g : gs) gm.push_back(g.val());
        ok = grads_match(gm, m.params(),
                         [&] { return aleatoric_value(m, x, y); }, &worst);
        break;
      }
      case 1: {  // plain FCN MSE loss
        auto m = nn::FcnModel::make_sized(
            {d, 5, 1}, {nn::Act::TanhShrink, nn::Act::Sigmoid}, 0.0, rng);
        nn::Tape tape;
        nn::BoundParams bound = nn::bind(tape, m.params(), true);
        nn::Value pred =
            m.forward(tape, tape.constant(x), bound, false, nullptr);
        nn::Value loss = nn::mse_loss(pred, tape.constant(y));
        auto gs = nn::grad(loss, bound.values);
        std::vector<Matrix> gm;
        for (auto& g : gs) gm.push_back(g.val());
        ok = grads_match(gm, m.params(),
                         [&] { return mse_value(m.infer(x), y); }, &worst);
        break;
      }
      case 2: {  // LCB gradient w.r.t. the input row
        auto b = surrogate::SurrogateBundle::make(d, false, rng);
        std::vector<double> xv(d);
        for (int c = 0; c < d; ++c) xv[c] = u(rng);
        nn::Tape tape;
        Matrix xr(1, d);
        for (int c = 0; c < d; ++c) xr(0, c) = xv[c];
        nn::Value xin = tape.leaf(xr);
        nn::Value node = b.lcb_node(tape, xin, 2.0);
        Matrix ana = nn::grad(node, std::vector<nn::Value>{xin})[0].val();
        for (int c = 0; c < d; ++c) {
          const double h = 1e-5;
          auto probe = xv;
          probe[c] = xv[c] + h;
          double fp = b.lcb(probe, 2.0).lcb;
          probe[c] = xv[c] - h;
          double fm = b.lcb(probe, 2.0).lcb;
          const double num = (fp - fm) / (2 * h);
          const double err =
              std::abs(ana(0, c) - num) / std::max(1.0, std::abs(num));
          worst = std::max(worst, err);
          if (err > kGradTol) ok = false;
        }
        break;
      }
      case 3: {  // LSTM parameter gradients through the sequence
        auto m = nn::LstmModel::make(d, 4, 2, rng);
        m.b_out.setConstant(0.5);  // keep outputs off the output clamp
        std::vector<Matrix> hist;
        for (int t = 0; t < 4; ++t) {
          Matrix step(1, d);
          for (int c = 0; c < d; ++c) step(0, c) = u(rng);
          hist.push_back(step);
        }
        Matrix target(1, 2);
        target << u(rng), u(rng);
        Matrix probe = m.infer(hist);
        bool clamped = false;  // skip models sitting on the output clamp
        for (int c = 0; c < probe.cols(); ++c)
          if (probe(0, c) <= 0.0 || probe(0, c) >= 1.0) clamped = true;
        if (clamped) break;
        nn::Tape tape;
        nn::BoundParams bound = nn::bind(tape, m.params(), true);
        std::vector<nn::Value> seq;
        for (const auto& s : hist) seq.push_back(tape.constant(s));
        nn::Value pred = m.forward(tape, seq, bound);
        nn::Value loss = nn::mse_loss(pred, tape.constant(target));
        auto gs = nn::grad(loss, bound.values);
        std::vector<Matrix> gm;
        for (auto& g : gs) gm.push_back(g.val());
        ok = grads_match(gm, m.params(),
                         [&] { return mse_value(m.infer(hist), target); },
                         &worst);
        break;
      }
    }
    ++models;
    if (!ok) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "model %d worst rel err %.3g", i, worst);
      return {false, buf};
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d models, worst rel err %.3g", models,
                worst);
  return {true, buf};
}

// ---------------------------------------------------------------------------
// Criterion 2: Hutchinson diagonal estimator.

std::pair<bool, std::string> criterion_hutchinson() {
  {  // exact on a diagonal quadratic with a single sample
    Eigen::VectorXd a(4), x(4);
    a << 1.0, -2.5, 7.0, 0.3;
    x << 0.4, -0.1, 0.9, 2.0;
    opt::ObjectiveFn obj = [&a](nn::Tape& tape, nn::Value xv) {
      return nn::sum(nn::mul(tape.constant(row_of(a)), nn::square(xv)));
    };
    std::mt19937_64 rng(1);
    Eigen::VectorXd est = opt::hutchinson_diag(obj, x, 1, rng);
    for (int i = 0; i < 4; ++i)
      if (std::abs(est[i] - 2 * a[i]) > 1e-10 * std::max(1.0, 2 * std::abs(a[i])))
        return {false, "single-sample estimate not exact on a diagonal"};
  }

  // random network: m = 1000 mean vs the exact basis-vector HVP diagonal
  std::mt19937_64 rng(10);
  auto net = nn::FcnModel::make_sized({4, 4, 1},
                                      {nn::Act::Softplus, nn::Act::None}, 0.0,
                                      rng);
  opt::ObjectiveFn obj = network_objective(net);
  Eigen::VectorXd x(4);
  x << 0.3, -0.2, 0.5, 0.1;
  Eigen::VectorXd truth(4);
  for (int i = 0; i < 4; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(4);
    e[i] = 1.0;
    truth[i] = exact_hvp(obj, x, e)[i];
  }
  std::mt19937_64 sampler(11);
  Eigen::VectorXd est = opt::hutchinson_diag(obj, x, 1000, sampler);
  double worst = 0;
  for (int i = 0; i < 4; ++i) {
    double rel = std::abs(est[i] - truth[i]) /
                 std::max(std::abs(truth[i]), 0.05);
    worst = std::max(worst, rel);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "worst relative error %.3g", worst);
  return {worst <= kHutchRelTol, buf};
}

// ---------------------------------------------------------------------------
// Criterion 3: Newton reaches the minimum in <= 2 iterations where matched
// first-order descent cannot.

std::pair<bool, std::string> criterion_newton() {
  Eigen::VectorXd a(4), c(4);
  a << 1.0, 5.0, 20.0, 100.0;  // condition number 100
  c << 0.3, -1.2, 0.8, 2.0;
  opt::ObjectiveFn obj = [&](nn::Tape& tape, nn::Value xv) {
    nn::Value d = nn::sub(xv, tape.constant(row_of(c)));
    return nn::sum(nn::mul(tape.constant(row_of(a)), nn::square(d)));
  };
  Eigen::VectorXd x0 = c.array() + 2.0;

  opt::OptimizerConfig newton;
  newton.gamma = 1.0;
  newton.omega = 0.0;
  newton.igr_coefficient = 0.0;
  newton.epsilon = 1e-9;
  newton.max_iterations = kNewtonIters;
  opt::HessianState hs;
  hs.omega = 0.0;
  std::mt19937_64 rng(3);
  auto res = opt::second_order_minimize(obj, x0, newton, hs, rng);
  double newton_err = (res.x - c).cwiseAbs().maxCoeff();

  opt::OptimizerConfig first;
  first.gamma = 1.0 / (2.0 * a.maxCoeff());  // matched stable step size
  first.epsilon = 1e-12;
  first.max_iterations = kFirstOrderIters;
  first.igr_coefficient = 0.0;
  auto res1 = opt::first_order_minimize(obj, x0, first);
  double first_err = (res1.x - c).cwiseAbs().maxCoeff();

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "newton err %.2e in %d iters; first-order err %.2e after %d",
                newton_err, res.iterations, first_err, res1.iterations);
  return {newton_err < kNewtonTol && res.iterations <= kNewtonIters &&
              first_err >= kNewtonTol,
          buf};
}

// ---------------------------------------------------------------------------
// Criterion 4: mean optimizer iterations, second order < first order.

std::pair<bool, std::string> criterion_iterations(const Artifacts& art) {
  if (!art.ready) return {false, "fixtures unavailable: " + art.error};
  json ckpt = nn::load_json(art.checkpoint.string());

  auto hosts = harness::load_hosts(art.hosts10.string());
  const int slots = 12;
  const int intervals = 6;
  auto mean_iters = [&](const std::string& kind) {
    sched::SchedulerConfig sc;
    sc.kind = sched::scheduler_from_name(kind);
    sc.online_tuning = false;
    // undamped Newton so convergence speed reflects curvature use
    sc.optimizer.h_min = 1e-4;
    double total = 0;
    int problems = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      sched::Scheduler s = sched::Scheduler::make_cold(
          sc, static_cast<int>(hosts.size()), slots, seed);
      harness::load_into_scheduler(s, ckpt);
      sim::Simulator simulator(hosts, {300.0, slots, 3000.0});
      sim::WorkloadConfig wl;
      wl.lambda = 1.2;
      sim::WorkloadGenerator gen(wl, seed);
      for (int t = 0; t < intervals; ++t) {
        simulator.admit(gen.arrivals(t));
        sched::ScheduleOutcome out = s.schedule(simulator);
        simulator.step(out.decision);
        // count warm problems only: interval 0 starts from a random
        // placement instead of the incumbent decision
        if (t == 0 || simulator.active_task_count() == 0) continue;
        total += out.iterations;
        ++problems;
      }
    }
    return total / std::max(problems, 1);
  };

  double gobi = mean_iters("gobi");
  double sgobi = mean_iters("sgobi");
  double hgobi = mean_iters("hgobi");
  double gosh = mean_iters("gosh");
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "mean iters gobi %.1f sgobi %.1f hgobi %.1f gosh %.1f", gobi,
                sgobi, hgobi, gosh);
  return {sgobi < gobi && gosh < hgobi, buf};
}

// ---------------------------------------------------------------------------
// Criterion 5: NPN calibration on synthetic heteroscedastic data.

std::pair<bool, std::string> criterion_npn() {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n_train = 1500, n_val = 500, d = 4;
  Matrix xs(n_train + n_val, d), ys(n_train + n_val, 1);
  std::vector<double> sigma_true(n_train + n_val);
  for (int i = 0; i < n_train + n_val; ++i) {
    for (int c = 0; c < d; ++c) xs(i, c) = u(rng);
    sigma_true[i] = xs(i, 0) < 0.5 ? 0.2 : 1.4;
    ys(i, 0) = 0.3 + 0.4 * xs(i, 1) + sigma_true[i] * gauss(rng);
  }

  // unbounded output head: the targets are not confined to (0, 1)
  const std::vector<int> sizes{d, 32, 16, 1};
  const std::vector<nn::Act> acts{nn::Act::Softplus, nn::Act::TanhShrink,
                                  nn::Act::None};
  auto npn = nn::NpnModel::make_sized(sizes, acts, rng);
  auto fcn = nn::FcnModel::make_sized(sizes, acts, 0.0, rng);
  nn::AdamWConfig oc;
  oc.lr = 1e-3;
  nn::AdamW opt_npn(oc), opt_fcn(oc);
  std::uniform_int_distribution<int> pick(0, n_train - 1);
  const int batch = 64;
  for (int step = 0; step < 3000; ++step) {
    Matrix bx(batch, d), by(batch, 1);
    for (int r = 0; r < batch; ++r) {
      int i = pick(rng);
      bx.row(r) = xs.row(i);
      by(r, 0) = ys(i, 0);
    }
    {
      nn::Tape tape;
      nn::BoundParams bound = nn::bind(tape, npn.params(), true);
      nn::NpnOutput out = npn.forward(tape, tape.constant(bx), bound);
      nn::Value loss = nn::aleatoric_loss(out.mu, out.sigma,
                                          tape.constant(by));
      auto gs = nn::grad(loss, bound.values);
      std::vector<Matrix> gm;
      for (auto& g : gs) gm.push_back(g.val());
      opt_npn.step(npn.params(), gm);
    }
    {
      nn::Tape tape;
      nn::BoundParams bound = nn::bind(tape, fcn.params(), true);
      nn::Value pred =
          fcn.forward(tape, tape.constant(bx), bound, false, nullptr);
      nn::Value loss = nn::mse_loss(pred, tape.constant(by));
      auto gs = nn::grad(loss, bound.values);
      std::vector<Matrix> gm;
      for (auto& g : gs) gm.push_back(g.val());
      opt_fcn.step(fcn.params(), gm);
    }
  }

  // homoscedastic counterpart: FCN mean with the MLE constant variance
  Matrix train_x = xs.topRows(n_train);
  Matrix fcn_train = fcn.infer(train_x);
  double s2 = 0;
  for (int i = 0; i < n_train; ++i) {
    double r = fcn_train(i, 0) - ys(i, 0);
    s2 += r * r;
  }
  s2 /= n_train;

  Matrix val_x = xs.bottomRows(n_val);
  auto [mu_v, sig_v] = npn.infer(val_x);
  Matrix fcn_v = fcn.infer(val_x);
  double npn_loss = 0, fcn_loss = 0;
  std::vector<double> sig_pred, sig_ref;
  for (int i = 0; i < n_val; ++i) {
    double y = ys(n_train + i, 0);
    double s = std::max(sig_v(i, 0), nn::kSigmaMin);
    double dm = mu_v(i, 0) - y;
    npn_loss += dm * dm / (2 * s * s) + 0.5 * std::log(s * s);
    double df = fcn_v(i, 0) - y;
    fcn_loss += df * df / (2 * s2) + 0.5 * std::log(s2);
    sig_pred.push_back(sig_v(i, 0));
    sig_ref.push_back(sigma_true[n_train + i]);
  }
  npn_loss /= n_val;
  fcn_loss /= n_val;
  double rho = pearson(sig_pred, sig_ref);

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "pearson %.3f, npn loss %.4f vs homoscedastic %.4f", rho,
                npn_loss, fcn_loss);
  return {rho >= kPearsonMin && npn_loss <= (1.0 - kNpnGain) * fcn_loss, buf};
}

// ---------------------------------------------------------------------------
// Criterion 6: end-to-end ordering on the desk profile plus a 50-host smoke.

std::pair<bool, std::string> criterion_end_to_end(const Artifacts& art) {
  if (!art.ready) return {false, "fixtures unavailable: " + art.error};

  harness::ExperimentConfig gosh_cfg = art.base;
  harness::ExperimentConfig gobi_cfg = art.base;
  gobi_cfg.scheduler = "gobi";
  std::fprintf(stderr, "[acceptance] running gosh x5 seeds...\n");
  json g = harness::run_all_seeds(gosh_cfg, (art.dir / "e2e-gosh").string());
  std::fprintf(stderr, "[acceptance] running gobi x5 seeds...\n");
  json b = harness::run_all_seeds(gobi_cfg, (art.dir / "e2e-gobi").string());

  double g_obj = g["objective_mean"], b_obj = b["objective_mean"];
  double g_sla = g["sla_fraction_mean"], b_sla = b["sla_fraction_mean"];

  // 50-host smoke run (cold models; only completion is asserted)
  std::fprintf(stderr, "[acceptance] 50-host smoke run...\n");
  harness::ExperimentConfig smoke = art.base;
  smoke.hosts_file = art.hosts50.string();
  smoke.checkpoint.clear();
  smoke.allow_cold_start = true;
  smoke.sla_file.clear();
  smoke.intervals = 5;
  smoke.seeds = {1};
  harness::run_experiment(smoke, 1, (art.dir / "smoke50").string());

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "objective gosh %.4f vs gobi %.4f; sla %.4f vs %.4f", g_obj,
                b_obj, g_sla, b_sla);
  return {g_obj <= b_obj && g_sla <= b_sla, buf};
}

// ---------------------------------------------------------------------------
// Criterion 7: dynamic exploration weight vs static k under a regime switch.

std::pair<bool, std::string> criterion_sweep(const Artifacts& art) {
  if (!art.ready) return {false, "fixtures unavailable: " + art.error};

  harness::ExperimentConfig cfg = art.base;
  cfg.intervals = 200;
  cfg.switch_interval = 100;
  cfg.switch_mode = "sequential";
  cfg.seeds = {1, 2, 3, 4, 5};
  fs::path out = art.dir / "sweep";
  json sweep = harness::sweep_k(cfg, {0.5, 2.0, 5.0, 10.0}, out.string());

  double dynamic_art = 0, min_static = 1e18;
  for (const auto& e : sweep["series"]) {
    double art_mean = e["art_seconds_mean"];
    if (e["dynamic"].get<bool>())
      dynamic_art = art_mean;
    else
      min_static = std::min(min_static, art_mean);
  }

  auto mean_recovery = [&](const std::string& label) {
    double total = 0;
    for (std::uint64_t seed : cfg.seeds)
      total += recovery_intervals(
          load_rows(out / label / ("seed-" + std::to_string(seed))),
          cfg.switch_interval);
    return total / cfg.seeds.size();
  };
  double rec_low = mean_recovery("k-0.5");
  double rec_high = mean_recovery("k-10");

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "art dynamic %.1f vs best static %.1f; recovery k=10 %.1f vs "
                "k=0.5 %.1f",
                dynamic_art, min_static, rec_high, rec_low);
  return {dynamic_art <= kSweepSlack * min_static && rec_high <= rec_low, buf};
}

// ---------------------------------------------------------------------------
// Criterion 8: agility — recovery after a workload switch.

std::pair<bool, std::string> criterion_agility(const Artifacts& art) {
  if (!art.ready) return {false, "fixtures unavailable: " + art.error};

  harness::ExperimentConfig cfg = art.base;
  cfg.intervals = 120;
  cfg.switch_interval = 60;
  cfg.switch_mode = "sequential";
  cfg.seeds = {1, 2, 3, 4, 5};

  auto mean_recovery = [&](const std::string& kind, const fs::path& out) {
    harness::ExperimentConfig c = cfg;
    c.scheduler = kind;
    double total = 0;
    for (std::uint64_t seed : c.seeds) {
      auto r = harness::run_experiment(c, seed,
                                       (out / std::to_string(seed)).string());
      total += recovery_intervals(r.rows, c.switch_interval);
    }
    return total / c.seeds.size();
  };

  std::fprintf(stderr, "[acceptance] agility: gosh runs...\n");
  double gosh = mean_recovery("gosh", art.dir / "agility-gosh");
  std::fprintf(stderr, "[acceptance] agility: gobi runs...\n");
  double gobi = mean_recovery("gobi", art.dir / "agility-gobi");

  char buf[128];
  std::snprintf(buf, sizeof(buf), "recovery gosh %.1f vs gobi %.1f intervals",
                gosh, gobi);
  return {gosh <= kAgilityFactor * gobi + kAgilitySlack, buf};
}

// ---------------------------------------------------------------------------
// Criterion 9: closed-form identities.

std::pair<bool, std::string> criterion_exactness() {
  bool ok = true;
  ok &= std::abs(surrogate::value_at_risk(10.0, 2.0) - 13.3) < kExactTol;

  sim::IntervalMetrics m;
  m.aec = 0.4;
  m.art_norm = 0.2;
  ok &= std::abs(sched::objective_score(m, {0.5, 0.5, 3000.0}) - 0.3) <
        kExactTol;

  surrogate::ExplorationState e;  // k=5, xi_ma=0, psi=0.9, delta=0.1
  auto e1 = surrogate::update_exploration(e, 1.0);
  ok &= std::abs(e1.xi_ma - 0.1) < kExactTol;
  ok &= std::abs(e1.k - 5.5) < kExactTol;

  ok &= std::abs(sim::jain_index({1.0, 2.0, 3.0}) - 36.0 / 42.0) < kExactTol;

  std::vector<double> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(i);
  ok &= std::abs(sim::nearest_rank_percentile(xs, 95) - 95.0) < kExactTol;

  return {ok, "VaR, objective, exploration, Jain, percentile"};
}

// ---------------------------------------------------------------------------
// Criterion 10: byte-identical CSV artifacts on re-run.

std::pair<bool, std::string> criterion_determinism(const Artifacts& art) {
  if (!art.ready) return {false, "fixtures unavailable: " + art.error};

  harness::ExperimentConfig cfg = art.base;
  cfg.intervals = 15;
  cfg.seeds = {3};
  fs::path a = art.dir / "det-a", b = art.dir / "det-b";
  harness::run_experiment(cfg, 3, a.string());
  harness::run_experiment(cfg, 3, b.string());
  bool runs_equal =
      read_file(a / "metrics.csv") == read_file(b / "metrics.csv");

  harness::ExperimentConfig gen_cfg = art.base;
  gen_cfg.scheduler = "random";
  gen_cfg.checkpoint.clear();
  fs::path d1 = art.dir / "det-d1.jsonl", d2 = art.dir / "det-d2.jsonl";
  harness::save_dataset(harness::gen_dataset(gen_cfg, 25, 9), d1.string());
  harness::save_dataset(harness::gen_dataset(gen_cfg, 25, 9), d2.string());
  bool data_equal = read_file(d1) == read_file(d2);

  fs::path c1 = art.dir / "det-c1", c2 = art.dir / "det-c2";
  harness::compare_runs({a.string(), b.string()}, c1.string());
  harness::compare_runs({a.string(), b.string()}, c2.string());
  bool cmp_equal = read_file(c1 / "objective_vs_interval.csv") ==
                       read_file(c2 / "objective_vs_interval.csv") &&
                   read_file(c1 / "iterations.csv") ==
                       read_file(c2 / "iterations.csv");

  std::string detail = std::string("run ") + (runs_equal ? "ok" : "DIFFERS") +
                       ", dataset " + (data_equal ? "ok" : "DIFFERS") +
                       ", compare " + (cmp_equal ? "ok" : "DIFFERS");
  return {runs_equal && data_equal && cmp_equal, detail};
}

}  // namespace

int main() {
  run_criterion(1, "gradient correctness", criterion_gradients);
  run_criterion(2, "hutchinson accuracy", criterion_hutchinson);
  run_criterion(3, "newton convergence", criterion_newton);
  run_criterion(9, "closed-form exactness", criterion_exactness);
  run_criterion(5, "npn calibration", criterion_npn);

  std::fprintf(stderr, "[acceptance] preparing shared fixtures...\n");
  Artifacts art = prepare_artifacts();

  run_criterion(4, "iteration-count ordering",
                [&] { return criterion_iterations(art); });
  run_criterion(6, "end-to-end ordering",
                [&] { return criterion_end_to_end(art); });
  run_criterion(7, "dynamic-k sensitivity",
                [&] { return criterion_sweep(art); });
  run_criterion(8, "agility", [&] { return criterion_agility(art); });
  run_criterion(10, "determinism", [&] { return criterion_determinism(art); });

  if (g_failures)
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  else
    std::printf("acceptance: all criteria passed\n");
  return g_failures;
}
