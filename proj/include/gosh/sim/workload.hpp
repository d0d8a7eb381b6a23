// Poisson task arrivals with synthetic or CSV-backed demand traces.

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "gosh/sim/types.hpp"

namespace gosh::sim {

enum class TraceMode { Sequential, Random, Csv };

TraceMode trace_mode_from_name(const std::string& name);
std::string trace_mode_name(TraceMode mode);

struct AppClassSpec {
  std::string name;
  double ips_lo = 0, ips_hi = 0;
  double ram_lo = 0, ram_hi = 0;    // MB
  double disk_lo = 0, disk_hi = 0;  // MB
  double bw_lo = 0, bw_hi = 0;      // MB/s
  double intervals_lo = 1, intervals_hi = 3;  // nominal run length
  double container_mb = 500;
};

std::vector<AppClassSpec> default_app_classes();

struct WorkloadConfig {
  double lambda = 1.2;  // mean arrivals per interval
  TraceMode mode = TraceMode::Random;
  std::string csv_dir;  // required in Csv mode
  double interval_seconds = 300.0;
  int trace_length = 64;
  std::vector<AppClassSpec> app_classes = default_app_classes();
};

// One demand trace loaded from a csv with columns ips,ram,disk,bw; a header
// line is tolerated. Throws std::runtime_error naming the file on problems.
std::vector<Demand> load_trace_csv(const std::string& path);
std::vector<std::vector<Demand>> load_trace_dir(const std::string& dir);

class WorkloadGenerator {
 public:
  WorkloadGenerator(WorkloadConfig cfg, std::uint64_t seed);

  // Tasks arriving at the start of `interval`. Fully deterministic given the
  // construction seed and call sequence.
  std::vector<Task> arrivals(int interval);

  // Regime switch mid-run (used by the sensitivity and agility experiments).
  void set_mode(TraceMode mode);
  const WorkloadConfig& config() const { return cfg_; }

 private:
  int sample_poisson();
  Task make_task(int interval);

  WorkloadConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<std::vector<Demand>> csv_traces_;
  int next_task_id_ = 0;
};

}  // namespace gosh::sim
