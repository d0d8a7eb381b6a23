// Domain types for the discrete-event fog simulator.

#pragma once

#include <string>
#include <vector>

namespace gosh::sim {

inline constexpr int kWaiting = -1;

enum class LatencyClass { Edge, Cloud };

struct PowerPoint {
  double utilization = 0.0;  // in [0,1]
  double watts = 0.0;
};

struct HostSpec {
  int id = 0;
  double ips_capacity = 0.0;
  double ram_capacity = 0.0;   // MB
  double disk_capacity = 0.0;  // MB
  double bw_capacity = 0.0;    // MB/s
  std::vector<PowerPoint> power_profile;  // must cover utilization 0 and 1
  LatencyClass latency_class = LatencyClass::Edge;

  // Piecewise-linear interpolation over the profile points.
  double power_at(double utilization) const;
  double peak_watts() const;
  double idle_watts() const;
  void validate() const;  // throws std::invalid_argument on bad specs
};

struct Demand {
  double ips = 0.0;
  double ram = 0.0;
  double disk = 0.0;
  double bw = 0.0;
};

struct Task {
  int id = 0;
  std::string app_class;
  double total_instructions = 0.0;
  std::vector<Demand> demand_trace;  // indexed by age, wraps at the end
  double container_size = 0.0;       // MB, migration transfer payload
  int created_at = -1;               // interval index of arrival
  int started_at = -1;
  int finished_at = -1;
  double executed_instructions = 0.0;
  int host_assignment = kWaiting;
  double wait_seconds = 0.0;

  bool finished() const { return finished_at >= 0; }
  const Demand& demand_at(int interval) const;
  // RAM admission uses the trace peak so a placed task can never push its
  // host over capacity later in its life.
  double ram_reservation() const;
  void validate() const;
};

struct CompletedTask {
  int task_id = 0;
  std::string app_class;
  double response_time = 0.0;  // seconds
};

struct IntervalMetrics {
  int interval = 0;
  double energy_kwh = 0.0;
  double aec = 0.0;           // normalized energy, in [0,1]
  double art_seconds = 0.0;   // mean response of tasks completing this interval
  double art_norm = 0.0;      // art_seconds / r_ref, clamped to [0,1]
  std::vector<CompletedTask> completed;
  int sla_violations = 0;     // filled in once deadlines are known
  double migration_time = 0.0;  // total seconds of migration stalls
  double wait_time = 0.0;       // total seconds tasks spent waiting
  double fairness = 1.0;        // Jain index over running-task IPS
  int active_tasks = 0;
  int waiting_tasks = 0;
  double scheduling_time_ms = 0.0;  // filled by the experiment harness
  int optimizer_iterations = 0;     // filled by the experiment harness
};

// Feature snapshot of hosts and task slots; the surrogate input S_t.
struct ClusterState {
  int interval = 0;
  int num_hosts = 0;
  int num_slots = 0;
  std::vector<double> host_ips_used, host_ram_used, host_disk_used,
      host_bw_used;
  std::vector<Demand> slot_demand;   // zeros for empty slots
  std::vector<int> slot_host;        // kWaiting when unplaced or empty
  std::vector<char> slot_active;

  static int flat_dim(int num_hosts, int num_slots) {
    return 4 * num_hosts + num_slots * (4 + num_hosts);
  }
  // Every feature scaled to [0,1] by the corresponding capacity.
  std::vector<double> flatten(const std::vector<HostSpec>& hosts) const;
};

// Task-slot x host placement matrix. Real-valued during optimization; in
// discrete form every active row is one-hot (or all-zero for WAITING).
struct DecisionMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  static DecisionMatrix zeros(int rows, int cols) {
    return {rows, cols, std::vector<double>(rows * cols, 0.0)};
  }
  double& at(int r, int c) { return data[r * cols + c]; }
  double at(int r, int c) const { return data[r * cols + c]; }
  // Returns the one-hot column, kWaiting for an all-zero row; throws on a
  // row that is neither.
  int one_hot_column(int r) const;
};

// Jain's fairness index (sum x)^2 / (n sum x^2); 1.0 for an empty input.
double jain_index(const std::vector<double>& xs);

// Inverse of ClusterState::flatten (placements round to the nearest host).
ClusterState unflatten_state(const std::vector<double>& flat,
                             const std::vector<HostSpec>& hosts,
                             int num_slots);

}  // namespace gosh::sim
