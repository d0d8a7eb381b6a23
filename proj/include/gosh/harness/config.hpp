// Experiment configuration: JSON parsing, host profiles, content hashing and
// scheduler checkpoint plumbing.

#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "gosh/sched/scheduler.hpp"
#include "gosh/sim/workload.hpp"

namespace gosh::harness {

struct ExperimentConfig {
  std::string hosts_file;
  std::string scheduler = "gosh";
  int intervals = 100;
  double interval_seconds = 300.0;
  int max_task_slots = 12;
  double lambda = 1.2;
  std::string trace_mode = "random";
  std::string csv_dir;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double truncation = 0.10;

  double alpha = 0.5, beta = 0.5;
  double r_ref = 3000.0;

  // exploration (LCB schedulers)
  double k0 = 5.0, psi = 0.9, delta = 0.1;
  bool dynamic_k = true;  // false pins k at k0 for the sensitivity sweep

  opt::OptimizerConfig optimizer;
  surrogate::TuneConfig tune;

  std::string checkpoint;  // scheduler models; empty = cold start
  bool allow_cold_start = false;
  std::string sla_file;  // reference deadlines; empty = derive from this run

  // mid-run workload regime switch (agility / sensitivity experiments)
  int switch_interval = -1;
  std::string switch_mode = "sequential";

  void validate() const;  // throws std::invalid_argument
};

std::vector<sim::HostSpec> load_hosts(const std::string& path);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

// FNV-1a hex digest of the canonical JSON dump; used to content-address
// artifacts.
std::string config_hash(const nlohmann::json& j);

// Full scheduler model state (outer/inner models, LSTM, exploration).
nlohmann::json scheduler_checkpoint(const sched::Scheduler& s);
void load_into_scheduler(sched::Scheduler& s, const nlohmann::json& j);

// Builds a scheduler for the config, loading cfg.checkpoint when set.
sched::Scheduler make_scheduler(const ExperimentConfig& cfg, int num_hosts,
                                int num_slots, std::uint64_t seed);

}  // namespace gosh::harness
