#include "gosh/harness/dataset.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "gosh/nn/checkpoint.hpp"
#include "gosh/sim/simulator.hpp"

namespace gosh::harness {

using nlohmann::json;

Dataset gen_dataset(const ExperimentConfig& cfg, int intervals,
                    std::uint64_t seed, const std::string& gosh_checkpoint) {
  auto hosts = load_hosts(cfg.hosts_file);
  sim::SimConfig sim_cfg{cfg.interval_seconds, cfg.max_task_slots, cfg.r_ref};
  sim::Simulator simulator(hosts, sim_cfg);

  sim::WorkloadConfig wl;
  wl.lambda = cfg.lambda;
  wl.mode = sim::trace_mode_from_name(cfg.trace_mode);
  wl.csv_dir = cfg.csv_dir;
  wl.interval_seconds = cfg.interval_seconds;
  sim::WorkloadGenerator workload(wl, seed);

  sched::SchedulerConfig rnd_cfg;
  rnd_cfg.kind = sched::SchedulerKind::Random;
  sched::Scheduler random_sched = sched::Scheduler::make_cold(
      rnd_cfg, static_cast<int>(hosts.size()), cfg.max_task_slots, seed + 1);

  sched::ObjectiveSpec objective{cfg.alpha, cfg.beta, cfg.r_ref};

  const bool starred = !gosh_checkpoint.empty();
  std::optional<sched::Scheduler> inner;
  std::optional<nn::LstmModel> lstm;
  std::deque<std::vector<double>> history;
  const int history_window = 16;
  if (starred) {
    json ck = nn::load_json(gosh_checkpoint);
    if (!ck.contains("bundle") || !ck.contains("lstm"))
      throw std::runtime_error(
          "starred dataset needs a checkpoint with both bundle and lstm");
    sched::SchedulerConfig ic;
    ic.kind = sched::SchedulerKind::Gosh;
    ic.objective = objective;
    ic.optimizer = cfg.optimizer;
    ic.online_tuning = false;  // frozen pre-trained models
    inner = sched::Scheduler::make_cold(
        ic, static_cast<int>(hosts.size()), cfg.max_task_slots, seed + 2);
    auto [b, e] = surrogate::bundle_from_checkpoint(ck.at("bundle"));
    inner->bundle() = std::move(b);
    inner->set_exploration(e);
    lstm = nn::lstm_from_checkpoint(ck.at("lstm"));
  }

  Dataset d;
  d.num_hosts = static_cast<int>(hosts.size());
  d.num_slots = cfg.max_task_slots;
  d.starred = starred;
  d.seed = seed;
  d.config_hash = config_hash(config_to_json(cfg));
  d.records.reserve(intervals);

  for (int t = 0; t < intervals; ++t) {
    simulator.admit(workload.arrivals(t));
    std::vector<double> state_flat =
        simulator.state().flatten(simulator.hosts());

    double o_bar = 0.0;
    if (starred) {
      history.push_back(state_flat);
      while (static_cast<int>(history.size()) > history_window)
        history.pop_front();
      std::vector<nn::Matrix> hist;
      for (const auto& row : history)
        hist.push_back(Eigen::Map<const nn::Matrix>(
            row.data(), 1, static_cast<Eigen::Index>(row.size())));
      nn::Matrix pred = lstm->infer(hist);
      std::vector<double> pred_flat(pred.data(), pred.data() + pred.size());
      sim::Simulator cosim = simulator;
      cosim.override_state(
          sim::unflatten_state(pred_flat, simulator.hosts(), d.num_slots));
      sched::ScheduleOutcome cand = inner->schedule(cosim);
      o_bar = sched::objective_score(cosim.step(cand.decision), objective);
    }

    sched::ScheduleOutcome out = random_sched.schedule(simulator);
    surrogate::IntervalRecord rec;
    rec.x = state_flat;
    if (starred) rec.x.push_back(o_bar);
    rec.x.insert(rec.x.end(), out.decision.data.begin(),
                 out.decision.data.end());
    rec.y = sched::objective_score(simulator.step(out.decision), objective);
    d.records.push_back(std::move(rec));
  }
  return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  json header = {{"kind", "dataset"},   {"num_hosts", d.num_hosts},
                 {"num_slots", d.num_slots}, {"starred", d.starred},
                 {"config_hash", d.config_hash}, {"seed", d.seed},
                 {"x_dim", d.x_dim()}};
  out << header.dump() << "\n";
  for (const auto& rec : d.records) {
    json line = {{"x", rec.x}, {"y", rec.y}};
    out << line.dump() << "\n";
  }
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty dataset file");
  json header = json::parse(line);
  if (header.value("kind", "") != "dataset")
    throw std::runtime_error(path + ": not a dataset file");
  Dataset d;
  d.num_hosts = header.at("num_hosts").get<int>();
  d.num_slots = header.at("num_slots").get<int>();
  d.starred = header.at("starred").get<bool>();
  d.config_hash = header.value("config_hash", "");
  d.seed = header.value("seed", 0ull);
  const int x_dim = header.at("x_dim").get<int>();
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec = json::parse(line);
    surrogate::IntervalRecord r;
    r.x = rec.at("x").get<std::vector<double>>();
    r.y = rec.at("y").get<double>();
    if (static_cast<int>(r.x.size()) != x_dim)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": record layout mismatch");
    d.records.push_back(std::move(r));
  }
  return d;
}

}  // namespace gosh::harness
