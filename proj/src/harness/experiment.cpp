#include "gosh/harness/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gosh/nn/checkpoint.hpp"
#include "gosh/sim/metrics.hpp"

namespace gosh::harness {

using nlohmann::json;

namespace {

const char* kCsvHeader =
    "interval,energy_kwh,aec,art_seconds,art_norm,objective,completed,"
    "sla_violations,migration_time,wait_time,fairness,active_tasks,"
    "waiting_tasks,optimizer_iterations,k,xi";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

json stats_of(std::vector<double> xs) {
  double total = 0.0;
  for (double x : xs) total += x;
  json j;
  j["mean"] = xs.empty() ? 0.0 : total / xs.size();
  j["total"] = total;
  j["p50"] = xs.empty() ? 0.0 : sim::nearest_rank_percentile(xs, 50);
  j["p95"] = xs.empty() ? 0.0 : sim::nearest_rank_percentile(xs, 95);
  return j;
}

}  // namespace

std::string metrics_csv(const std::vector<IntervalRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << m.interval << ',' << fmt(m.energy_kwh) << ',' << fmt(m.aec) << ','
        << fmt(m.art_seconds) << ',' << fmt(m.art_norm) << ','
        << fmt(r.objective) << ',' << m.completed.size() << ','
        << m.sla_violations << ',' << fmt(m.migration_time) << ','
        << fmt(m.wait_time) << ',' << fmt(m.fairness) << ',' << m.active_tasks
        << ',' << m.waiting_tasks << ',' << m.optimizer_iterations << ','
        << fmt(r.k) << ',' << fmt(r.xi) << "\n";
  }
  return out.str();
}

std::vector<IntervalRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("metrics csv: empty input");
  if (line != kCsvHeader)
    throw std::runtime_error("metrics csv: header mismatch; expected '" +
                             std::string(kCsvHeader) + "'");
  std::vector<IntervalRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != 16)
      throw std::runtime_error("metrics csv: bad column count on row " +
                               std::to_string(rows.size() + 1));
    IntervalRow r;
    r.metrics.interval = static_cast<int>(vals[0]);
    r.metrics.energy_kwh = vals[1];
    r.metrics.aec = vals[2];
    r.metrics.art_seconds = vals[3];
    r.metrics.art_norm = vals[4];
    r.objective = vals[5];
    r.metrics.completed.resize(static_cast<std::size_t>(vals[6]));
    r.metrics.sla_violations = static_cast<int>(vals[7]);
    r.metrics.migration_time = vals[8];
    r.metrics.wait_time = vals[9];
    r.metrics.fairness = vals[10];
    r.metrics.active_tasks = static_cast<int>(vals[11]);
    r.metrics.waiting_tasks = static_cast<int>(vals[12]);
    r.metrics.optimizer_iterations = static_cast<int>(vals[13]);
    r.k = vals[14];
    r.xi = vals[15];
    rows.push_back(std::move(r));
  }
  return rows;
}

json summarize(const std::vector<IntervalRow>& rows, double truncation) {
  const int skip = static_cast<int>(truncation * rows.size());
  std::vector<const IntervalRow*> kept;
  for (std::size_t i = skip; i < rows.size(); ++i) kept.push_back(&rows[i]);

  auto collect = [&](auto&& get) {
    std::vector<double> xs;
    xs.reserve(kept.size());
    for (const auto* r : kept) xs.push_back(get(*r));
    return xs;
  };

  json m;
  m["energy_kwh"] = stats_of(collect([](const IntervalRow& r) {
    return r.metrics.energy_kwh;
  }));
  m["aec"] = stats_of(collect([](const IntervalRow& r) { return r.metrics.aec; }));
  m["art_seconds"] = stats_of(
      collect([](const IntervalRow& r) { return r.metrics.art_seconds; }));
  m["art_norm"] = stats_of(
      collect([](const IntervalRow& r) { return r.metrics.art_norm; }));
  m["objective"] =
      stats_of(collect([](const IntervalRow& r) { return r.objective; }));
  m["fairness"] = stats_of(
      collect([](const IntervalRow& r) { return r.metrics.fairness; }));
  m["migration_time"] = stats_of(
      collect([](const IntervalRow& r) { return r.metrics.migration_time; }));
  m["wait_time"] = stats_of(
      collect([](const IntervalRow& r) { return r.metrics.wait_time; }));
  m["optimizer_iterations"] = stats_of(collect([](const IntervalRow& r) {
    return static_cast<double>(r.metrics.optimizer_iterations);
  }));
  m["k"] = stats_of(collect([](const IntervalRow& r) { return r.k; }));
  m["xi"] = stats_of(collect([](const IntervalRow& r) { return r.xi; }));

  int violations = 0, completed = 0;
  for (const auto* r : kept) {
    violations += r->metrics.sla_violations;
    completed += static_cast<int>(r->metrics.completed.size());
  }
  json j;
  j["intervals"] = rows.size();
  j["kept_intervals"] = kept.size();
  j["truncation"] = truncation;
  j["metrics"] = m;
  j["sla"] = {{"violations", violations},
              {"completed", completed},
              {"fraction",
               completed ? static_cast<double>(violations) / completed : 0.0}};
  return j;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         const std::string& out_dir) {
  cfg.validate();
  auto hosts = load_hosts(cfg.hosts_file);
  sim::SimConfig sim_cfg{cfg.interval_seconds, cfg.max_task_slots, cfg.r_ref};
  sim::Simulator simulator(hosts, sim_cfg);

  sim::WorkloadConfig wl;
  wl.lambda = cfg.lambda;
  wl.mode = sim::trace_mode_from_name(cfg.trace_mode);
  wl.csv_dir = cfg.csv_dir;
  wl.interval_seconds = cfg.interval_seconds;
  sim::WorkloadGenerator workload(wl, seed);

  sched::Scheduler scheduler = make_scheduler(
      cfg, static_cast<int>(hosts.size()), cfg.max_task_slots, seed);
  sched::ObjectiveSpec objective{cfg.alpha, cfg.beta, cfg.r_ref};

  RunResult res;
  std::ostringstream decision_log;
  std::vector<double> sched_ms;
  for (int t = 0; t < cfg.intervals; ++t) {
    if (t == cfg.switch_interval)
      workload.set_mode(sim::trace_mode_from_name(cfg.switch_mode));
    simulator.admit(workload.arrivals(t));
    sched::ScheduleOutcome out = scheduler.schedule(simulator);
    IntervalRow row;
    row.metrics = simulator.step(out.decision);
    row.metrics.scheduling_time_ms = out.scheduling_ms;
    row.metrics.optimizer_iterations = out.iterations;
    row.objective = sched::objective_score(row.metrics, objective);
    row.k = out.k;
    row.xi = out.xi;
    scheduler.observe(row.objective);

    json dl;
    dl["interval"] = t;
    json drows = json::array();
    for (int r = 0; r < out.decision.rows; ++r)
      drows.push_back(out.decision.one_hot_column(r));
    dl["decision"] = drows;
    dl["iterations"] = out.iterations;
    dl["scheduling_ms"] = out.scheduling_ms;
    decision_log << dl.dump() << "\n";
    sched_ms.push_back(out.scheduling_ms);
    res.rows.push_back(std::move(row));
  }

  // SLA deadlines: external reference when configured, else this run's own
  // empirical 95th percentiles.
  std::vector<sim::CompletedTask> all_completed;
  for (const auto& r : res.rows)
    all_completed.insert(all_completed.end(), r.metrics.completed.begin(),
                         r.metrics.completed.end());
  if (!cfg.sla_file.empty()) {
    json sj = nn::load_json(cfg.sla_file);
    for (auto it = sj.begin(); it != sj.end(); ++it)
      res.sla_deadlines[it.key()] = it.value().get<double>();
  } else {
    try {
      res.sla_deadlines = sim::compute_sla_deadlines(all_completed);
    } catch (const std::exception&) {
      // too few completions for a reference; leave deadlines empty
    }
  }
  for (auto& r : res.rows)
    r.metrics.sla_violations =
        sim::count_sla_violations(r.metrics.completed, res.sla_deadlines);

  res.summary = summarize(res.rows, cfg.truncation);
  res.summary["scheduler"] = cfg.scheduler;
  res.summary["seed"] = seed;
  res.summary["timing"] = stats_of(sched_ms);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/metrics.csv", metrics_csv(res.rows));
    write_text(out_dir + "/decisions.jsonl", decision_log.str());
    nn::save_json(res.summary, out_dir + "/summary.json");
    json sla = json::object();
    for (const auto& [cls, dl] : res.sla_deadlines) sla[cls] = dl;
    nn::save_json(sla, out_dir + "/sla.json");
    nn::save_json(config_to_json(cfg), out_dir + "/config.json");
  }
  return res;
}

json run_all_seeds(const ExperimentConfig& cfg, const std::string& out_dir) {
  json per_seed = json::array();
  std::vector<double> obj_means, energy_means, art_means, sla_fracs;
  for (std::uint64_t seed : cfg.seeds) {
    std::string dir =
        out_dir.empty() ? "" : out_dir + "/seed-" + std::to_string(seed);
    RunResult r = run_experiment(cfg, seed, dir);
    per_seed.push_back(r.summary);
    obj_means.push_back(r.summary["metrics"]["objective"]["mean"]);
    energy_means.push_back(r.summary["metrics"]["energy_kwh"]["mean"]);
    art_means.push_back(r.summary["metrics"]["art_seconds"]["mean"]);
    sla_fracs.push_back(r.summary["sla"]["fraction"]);
  }
  auto mean_of = [](const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / xs.size();
  };
  json combined;
  combined["scheduler"] = cfg.scheduler;
  combined["seeds"] = cfg.seeds;
  combined["objective_mean"] = mean_of(obj_means);
  combined["energy_kwh_mean"] = mean_of(energy_means);
  combined["art_seconds_mean"] = mean_of(art_means);
  combined["sla_fraction_mean"] = mean_of(sla_fracs);
  combined["runs"] = per_seed;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    nn::save_json(combined, out_dir + "/summary.json");
  }
  return combined;
}

}  // namespace gosh::harness
