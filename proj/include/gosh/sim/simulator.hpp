// Deterministic interval-stepped cluster simulator. Also serves as the
// embedded co-simulator for the starred schedulers, so it is a plain value
// type that can be copied cheaply.

#pragma once

#include <deque>
#include <map>
#include <optional>

#include "gosh/sim/types.hpp"

namespace gosh::sim {

struct SimConfig {
  double interval_seconds = 300.0;
  int max_task_slots = 12;
  double r_ref = 3000.0;  // response-time normalization for ART
};

class Simulator {
 public:
  Simulator(std::vector<HostSpec> hosts, SimConfig cfg);

  // Places arrivals into free task slots; excess queues in arrival order and
  // is admitted as slots free up.
  void admit(std::vector<Task> new_tasks);

  // Applies a discrete decision and advances one interval. Waiting tasks are
  // retried first (FIFO), then fresh tasks, then migrations. A target without
  // RAM headroom sends an unplaced task back to the wait queue; an infeasible
  // migration leaves the task where it runs.
  IntervalMetrics step(const DecisionMatrix& decision);

  ClusterState state() const;
  const std::vector<HostSpec>& hosts() const { return hosts_; }
  const SimConfig& config() const { return cfg_; }
  int interval() const { return interval_; }
  int num_slots() const { return cfg_.max_task_slots; }
  int active_task_count() const;
  bool slot_active(int s) const { return slots_[s].has_value(); }
  const Task& slot_task(int s) const { return *slots_[s]; }

  // Sum of peak host watts, used for AEC normalization.
  double peak_power_watts() const;

  // Overrides the utilization snapshot used by co-simulation: scales each
  // running task's current demand so host usage matches the predicted state.
  void override_state(const ClusterState& predicted);

 private:
  double host_ram_reserved(int host, const std::vector<int>& assignment) const;

  std::vector<HostSpec> hosts_;
  SimConfig cfg_;
  int interval_ = 0;
  std::vector<std::optional<Task>> slots_;
  std::deque<int> wait_fifo_;     // slot ids of unplaced tasks, arrival order
  std::deque<Task> overflow_;     // arrivals with no free slot yet
  std::vector<double> demand_scale_;  // per-slot co-simulation override
};

}  // namespace gosh::sim
