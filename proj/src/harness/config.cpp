#include "gosh/harness/config.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "gosh/nn/checkpoint.hpp"

namespace gosh::harness {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (intervals < 1)
    throw std::invalid_argument("config: intervals must be >= 1");
  if (truncation < 0.0 || truncation >= 1.0)
    throw std::invalid_argument("config: truncation must be in [0,1)");
  if (interval_seconds <= 0)
    throw std::invalid_argument("config: interval_seconds must be > 0");
  if (lambda <= 0) throw std::invalid_argument("config: lambda must be > 0");
  if (max_task_slots < 1)
    throw std::invalid_argument("config: max_task_slots must be >= 1");
  if (std::abs(alpha + beta - 1.0) > 1e-12 || alpha < 0 || beta < 0)
    throw std::invalid_argument("config: need alpha + beta = 1 in [0,1]");
  if (seeds.empty()) throw std::invalid_argument("config: seeds empty");
  sched::scheduler_from_name(scheduler);  // throws on unknown kind
  sim::trace_mode_from_name(trace_mode);
}

std::vector<sim::HostSpec> load_hosts(const std::string& path) {
  json j = nn::load_json(path);
  if (!j.contains("hosts") || !j["hosts"].is_array() || j["hosts"].empty())
    throw std::runtime_error(path + ": expected a non-empty hosts array");
  std::vector<sim::HostSpec> hosts;
  int next_id = 0;
  for (const auto& h : j["hosts"]) {
    sim::HostSpec s;
    s.id = h.value("id", next_id);
    s.ips_capacity = h.at("ips").get<double>();
    s.ram_capacity = h.at("ram").get<double>();
    s.disk_capacity = h.at("disk").get<double>();
    s.bw_capacity = h.at("bw").get<double>();
    std::string lat = h.value("latency_class", "edge");
    if (lat == "edge")
      s.latency_class = sim::LatencyClass::Edge;
    else if (lat == "cloud")
      s.latency_class = sim::LatencyClass::Cloud;
    else
      throw std::runtime_error(path + ": unknown latency_class " + lat);
    for (const auto& p : h.at("power_profile"))
      s.power_profile.push_back(
          {p.at("utilization").get<double>(), p.at("watts").get<double>()});
    s.validate();
    hosts.push_back(std::move(s));
    ++next_id;
  }
  return hosts;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.hosts_file = j.value("hosts_file", c.hosts_file);
  c.scheduler = j.value("scheduler", c.scheduler);
  c.intervals = j.value("intervals", c.intervals);
  c.interval_seconds = j.value("interval_seconds", c.interval_seconds);
  c.max_task_slots = j.value("max_task_slots", c.max_task_slots);
  c.lambda = j.value("lambda", c.lambda);
  c.trace_mode = j.value("trace_mode", c.trace_mode);
  c.csv_dir = j.value("csv_dir", c.csv_dir);
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  c.truncation = j.value("truncation", c.truncation);
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.r_ref = j.value("r_ref", c.r_ref);
  c.k0 = j.value("k0", c.k0);
  c.psi = j.value("psi", c.psi);
  c.delta = j.value("delta", c.delta);
  c.dynamic_k = j.value("dynamic_k", c.dynamic_k);
  if (j.contains("optimizer")) {
    const auto& o = j["optimizer"];
    c.optimizer.gamma = o.value("gamma", c.optimizer.gamma);
    c.optimizer.epsilon = o.value("epsilon", c.optimizer.epsilon);
    c.optimizer.max_iterations =
        o.value("max_iterations", c.optimizer.max_iterations);
    c.optimizer.omega = o.value("omega", c.optimizer.omega);
    c.optimizer.hutchinson_samples =
        o.value("hutchinson_samples", c.optimizer.hutchinson_samples);
    c.optimizer.igr_coefficient =
        o.value("igr_coefficient", c.optimizer.igr_coefficient);
    c.optimizer.h_min = o.value("h_min", c.optimizer.h_min);
  }
  c.tune.m_samples = j.value("tune_samples", c.tune.m_samples);
  c.tune.replay_window = j.value("replay_window", c.tune.replay_window);
  c.tune.lr = j.value("tune_lr", c.tune.lr);
  c.checkpoint = j.value("checkpoint", c.checkpoint);
  c.allow_cold_start = j.value("allow_cold_start", c.allow_cold_start);
  c.sla_file = j.value("sla_file", c.sla_file);
  c.switch_interval = j.value("switch_interval", c.switch_interval);
  c.switch_mode = j.value("switch_mode", c.switch_mode);
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["hosts_file"] = c.hosts_file;
  j["scheduler"] = c.scheduler;
  j["intervals"] = c.intervals;
  j["interval_seconds"] = c.interval_seconds;
  j["max_task_slots"] = c.max_task_slots;
  j["lambda"] = c.lambda;
  j["trace_mode"] = c.trace_mode;
  j["csv_dir"] = c.csv_dir;
  j["seeds"] = c.seeds;
  j["truncation"] = c.truncation;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["r_ref"] = c.r_ref;
  j["k0"] = c.k0;
  j["psi"] = c.psi;
  j["delta"] = c.delta;
  j["dynamic_k"] = c.dynamic_k;
  j["optimizer"] = {{"gamma", c.optimizer.gamma},
                    {"epsilon", c.optimizer.epsilon},
                    {"max_iterations", c.optimizer.max_iterations},
                    {"omega", c.optimizer.omega},
                    {"hutchinson_samples", c.optimizer.hutchinson_samples},
                    {"igr_coefficient", c.optimizer.igr_coefficient},
                    {"h_min", c.optimizer.h_min}};
  j["tune_samples"] = c.tune.m_samples;
  j["replay_window"] = c.tune.replay_window;
  j["tune_lr"] = c.tune.lr;
  j["checkpoint"] = c.checkpoint;
  j["allow_cold_start"] = c.allow_cold_start;
  j["sla_file"] = c.sla_file;
  j["switch_interval"] = c.switch_interval;
  j["switch_mode"] = c.switch_mode;
  return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return config_from_json(nn::load_json(path));
}

std::string config_hash(const json& j) {
  std::string dump = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json scheduler_checkpoint(const sched::Scheduler& s) {
  json j;
  j["version"] = nn::kCheckpointVersion;
  j["kind"] = scheduler_name(s.config().kind);
  auto& mut = const_cast<sched::Scheduler&>(s);
  if (s.has_bundle())
    j["bundle"] = surrogate::bundle_checkpoint(mut.bundle(), s.exploration());
  if (s.has_fcn()) j["fcn"] = nn::to_checkpoint(mut.fcn());
  if (s.has_inner_bundle())
    j["inner_bundle"] =
        surrogate::bundle_checkpoint(mut.inner_bundle(), s.exploration());
  if (s.has_inner_fcn()) j["inner_fcn"] = nn::to_checkpoint(mut.inner_fcn());
  if (s.has_lstm()) j["lstm"] = nn::to_checkpoint(mut.lstm());
  j["exploration"] = {{"k", s.exploration().k},
                      {"xi_ma", s.exploration().xi_ma},
                      {"psi", s.exploration().psi},
                      {"delta", s.exploration().delta}};
  return j;
}

void load_into_scheduler(sched::Scheduler& s, const json& j) {
  // Checkpoints are keyed by content, not scheduler kind: the ablations run
  // off the same trained models (the teacher doubles as the plain FCN).
  auto bundle_at = [&](const char* key) {
    auto [b, e] = surrogate::bundle_from_checkpoint(j.at(key));
    (void)e;
    return std::move(b);
  };
  auto fcn_for = [&](const char* key, int want_dim) -> nn::FcnModel {
    if (j.contains(key)) return nn::fcn_from_checkpoint(j.at(key));
    const char* bkey =
        std::string(key) == "inner_fcn" ? "inner_bundle" : "bundle";
    if (j.contains(bkey)) {
      nn::FcnModel g = bundle_at(bkey).g;
      g.dropout = 0.0;  // deterministic point predictor
      if (g.input_dim() == want_dim) return g;
    }
    if (std::string(key) == "inner_fcn" && j.contains("bundle")) {
      nn::FcnModel g = bundle_at("bundle").g;
      g.dropout = 0.0;
      if (g.input_dim() == want_dim) return g;
    }
    throw std::runtime_error(std::string("scheduler checkpoint: missing ") +
                             key);
  };
  if (s.has_bundle()) {
    if (!j.contains("bundle"))
      throw std::runtime_error("scheduler checkpoint: missing bundle");
    surrogate::SurrogateBundle b = bundle_at("bundle");
    if (b.input_dim != s.bundle().input_dim)
      throw std::runtime_error("scheduler checkpoint: bundle layout mismatch");
    s.bundle() = std::move(b);
  }
  if (s.has_fcn()) s.fcn() = fcn_for("fcn", s.fcn().input_dim());
  if (s.has_inner_bundle()) {
    if (!j.contains("inner_bundle"))
      throw std::runtime_error("scheduler checkpoint: missing inner bundle");
    surrogate::SurrogateBundle b = bundle_at("inner_bundle");
    if (b.input_dim != s.inner_bundle().input_dim)
      throw std::runtime_error(
          "scheduler checkpoint: inner bundle layout mismatch");
    s.inner_bundle() = std::move(b);
  }
  if (s.has_inner_fcn())
    s.inner_fcn() = fcn_for("inner_fcn", s.inner_fcn().input_dim());
  if (s.has_lstm()) {
    if (!j.contains("lstm"))
      throw std::runtime_error("scheduler checkpoint: missing lstm");
    s.lstm() = nn::lstm_from_checkpoint(j.at("lstm"));
  }
  if (j.contains("exploration")) {
    surrogate::ExplorationState e = s.exploration();
    const auto& je = j.at("exploration");
    e.k = je.at("k").get<double>();
    e.xi_ma = je.at("xi_ma").get<double>();
    s.set_exploration(e);
  }
}

sched::Scheduler make_scheduler(const ExperimentConfig& cfg, int num_hosts,
                                int num_slots, std::uint64_t seed) {
  sched::SchedulerConfig sc;
  sc.kind = sched::scheduler_from_name(cfg.scheduler);
  sc.objective = {cfg.alpha, cfg.beta, cfg.r_ref};
  sc.optimizer = cfg.optimizer;
  sc.tune = cfg.tune;
  sc.exploration.k = cfg.k0;
  sc.exploration.psi = cfg.psi;
  sc.exploration.delta = cfg.delta;
  if (!cfg.dynamic_k) {
    // pin k by making the update a no-op
    sc.exploration.delta = 0.0;
  }
  sched::Scheduler s =
      sched::Scheduler::make_cold(sc, num_hosts, num_slots, seed);
  if (!cfg.checkpoint.empty()) {
    load_into_scheduler(s, nn::load_json(cfg.checkpoint));
    surrogate::ExplorationState e = s.exploration();
    e.k = cfg.k0;
    e.psi = cfg.psi;
    e.delta = cfg.dynamic_k ? cfg.delta : 0.0;
    e.xi_ma = 0.0;
    s.set_exploration(e);
  } else if (sched::is_learned(sc.kind) && !cfg.allow_cold_start) {
    throw std::runtime_error(
        "scheduler '" + cfg.scheduler +
        "' needs a checkpoint (or allow_cold_start: true)");
  }
  return s;
}

}  // namespace gosh::harness
