#include "gosh/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gosh::sim {

Simulator::Simulator(std::vector<HostSpec> hosts, SimConfig cfg)
    : hosts_(std::move(hosts)), cfg_(cfg) {
  if (hosts_.empty()) throw std::invalid_argument("Simulator: no hosts");
  if (cfg_.interval_seconds <= 0)
    throw std::invalid_argument("Simulator: interval length must be positive");
  if (cfg_.max_task_slots < 1)
    throw std::invalid_argument("Simulator: need at least one task slot");
  for (const auto& h : hosts_) h.validate();
  slots_.resize(cfg_.max_task_slots);
  demand_scale_.assign(cfg_.max_task_slots, 1.0);
}

int Simulator::active_task_count() const {
  int n = 0;
  for (const auto& s : slots_)
    if (s.has_value()) ++n;
  return n;
}

double Simulator::peak_power_watts() const {
  double w = 0.0;
  for (const auto& h : hosts_) w += h.peak_watts();
  return w;
}

void Simulator::admit(std::vector<Task> new_tasks) {
  for (auto& t : new_tasks) {
    t.validate();
    overflow_.push_back(std::move(t));
  }
  for (int s = 0; s < cfg_.max_task_slots && !overflow_.empty(); ++s) {
    if (slots_[s].has_value()) continue;
    slots_[s] = std::move(overflow_.front());
    overflow_.pop_front();
    slots_[s]->host_assignment = kWaiting;
    demand_scale_[s] = 1.0;
    wait_fifo_.push_back(s);
  }
}

double Simulator::host_ram_reserved(int host,
                                    const std::vector<int>& assignment) const {
  double r = 0.0;
  for (int s = 0; s < cfg_.max_task_slots; ++s)
    if (slots_[s].has_value() && assignment[s] == host)
      r += slots_[s]->ram_reservation();
  return r;
}

IntervalMetrics Simulator::step(const DecisionMatrix& decision) {
  const int M = cfg_.max_task_slots;
  const int N = static_cast<int>(hosts_.size());
  const double dt = cfg_.interval_seconds;
  if (decision.rows != M || decision.cols != N)
    throw std::invalid_argument(
        "Simulator: decision matrix is " + std::to_string(decision.rows) +
        "x" + std::to_string(decision.cols) + ", expected " +
        std::to_string(M) + "x" + std::to_string(N));

  std::vector<int> target(M, kWaiting);
  for (int s = 0; s < M; ++s) {
    target[s] = decision.one_hot_column(s);  // throws on non-one-hot rows
    if (!slots_[s].has_value() && target[s] != kWaiting)
      throw std::invalid_argument("Simulator: decision row " +
                                  std::to_string(s) + " targets an empty slot");
  }

  std::vector<int> cur(M, kWaiting);
  for (int s = 0; s < M; ++s)
    if (slots_[s].has_value()) cur[s] = slots_[s]->host_assignment;

  std::vector<double> reserved(N, 0.0);
  for (int s = 0; s < M; ++s)
    if (slots_[s].has_value() && cur[s] != kWaiting)
      reserved[cur[s]] += slots_[s]->ram_reservation();

  IntervalMetrics m;
  m.interval = interval_;
  std::vector<double> stall(M, 0.0);

  // 1) waiting tasks (and fresh arrivals) in FIFO order
  for (auto it = wait_fifo_.begin(); it != wait_fifo_.end();) {
    int s = *it;
    int t = target[s];
    if (t != kWaiting &&
        reserved[t] + slots_[s]->ram_reservation() <= hosts_[t].ram_capacity) {
      reserved[t] += slots_[s]->ram_reservation();
      cur[s] = t;
      slots_[s]->host_assignment = t;
      if (slots_[s]->started_at < 0) slots_[s]->started_at = interval_;
      it = wait_fifo_.erase(it);
    } else {
      ++it;
    }
  }

  // 2) migrations of running tasks
  for (int s = 0; s < M; ++s) {
    if (!slots_[s].has_value() || cur[s] == kWaiting) continue;
    int t = target[s];
    if (t == kWaiting || t == cur[s]) continue;
    double res = slots_[s]->ram_reservation();
    if (reserved[t] + res > hosts_[t].ram_capacity) continue;  // stay put
    reserved[cur[s]] -= res;
    reserved[t] += res;
    double bw = std::min(hosts_[cur[s]].bw_capacity, hosts_[t].bw_capacity);
    double transfer = slots_[s]->container_size / bw;
    if (hosts_[cur[s]].latency_class != hosts_[t].latency_class)
      transfer *= 2.0;  // edge<->cloud crossing
    stall[s] = std::min(transfer, dt);
    m.migration_time += stall[s];
    cur[s] = t;
    slots_[s]->host_assignment = t;
  }

  // 3) execution with proportional IPS throttling per host
  std::vector<double> host_ips_demand(N, 0.0);
  for (int s = 0; s < M; ++s)
    if (slots_[s].has_value() && cur[s] != kWaiting)
      host_ips_demand[cur[s]] +=
          slots_[s]->demand_at(interval_).ips * demand_scale_[s];

  std::vector<double> host_executed(N, 0.0);
  std::vector<double> running_ips;
  for (int s = 0; s < M; ++s) {
    if (!slots_[s].has_value() || cur[s] == kWaiting) continue;
    Task& task = *slots_[s];
    const int j = cur[s];
    double demand_ips = task.demand_at(interval_).ips * demand_scale_[s];
    double throttle =
        host_ips_demand[j] > hosts_[j].ips_capacity
            ? hosts_[j].ips_capacity / host_ips_demand[j]
            : 1.0;
    double eff = demand_ips * throttle;
    running_ips.push_back(eff);
    if (eff <= 0.0) continue;
    double avail = dt - stall[s];
    double remaining = task.total_instructions - task.executed_instructions;
    double done = std::min(eff * avail, remaining);
    task.executed_instructions += done;
    host_executed[j] += done;
    if (task.executed_instructions >= task.total_instructions) {
      task.finished_at = interval_;
      double finish_offset = stall[s] + remaining / eff;
      double response =
          (interval_ * dt + finish_offset) - task.created_at * dt;
      m.completed.push_back({task.id, task.app_class, response});
    }
  }

  // 4) energy from achieved utilization, integrated over the interval
  double energy_joules = 0.0;
  for (int j = 0; j < N; ++j) {
    double util = host_executed[j] / (hosts_[j].ips_capacity * dt);
    energy_joules += hosts_[j].power_at(util) * dt;
  }
  m.energy_kwh = energy_joules / 3.6e6;
  m.aec = energy_joules / (peak_power_watts() * dt);

  if (!m.completed.empty()) {
    double s = 0.0;
    for (const auto& c : m.completed) s += c.response_time;
    m.art_seconds = s / m.completed.size();
  }
  m.art_norm = std::clamp(m.art_seconds / cfg_.r_ref, 0.0, 1.0);
  m.fairness = jain_index(running_ips);
  m.active_tasks = active_task_count();

  // 5) waiting time accounting
  for (int s : wait_fifo_) {
    slots_[s]->wait_seconds += dt;
    m.wait_time += dt;
  }
  for (auto& t : overflow_) {
    t.wait_seconds += dt;
    m.wait_time += dt;
  }
  m.waiting_tasks =
      static_cast<int>(wait_fifo_.size() + overflow_.size());

  // 6) release finished tasks' slots
  for (int s = 0; s < M; ++s) {
    if (slots_[s].has_value() && slots_[s]->finished()) {
      slots_[s].reset();
      demand_scale_[s] = 1.0;
    }
  }

  ++interval_;
  return m;
}

ClusterState Simulator::state() const {
  const int M = cfg_.max_task_slots;
  const int N = static_cast<int>(hosts_.size());
  ClusterState st;
  st.interval = interval_;
  st.num_hosts = N;
  st.num_slots = M;
  st.host_ips_used.assign(N, 0.0);
  st.host_ram_used.assign(N, 0.0);
  st.host_disk_used.assign(N, 0.0);
  st.host_bw_used.assign(N, 0.0);
  st.slot_demand.assign(M, Demand{});
  st.slot_host.assign(M, kWaiting);
  st.slot_active.assign(M, 0);
  for (int s = 0; s < M; ++s) {
    if (!slots_[s].has_value()) continue;
    const Task& t = *slots_[s];
    Demand d = t.demand_at(interval_);
    d.ips *= demand_scale_[s];
    st.slot_demand[s] = d;
    st.slot_host[s] = t.host_assignment;
    st.slot_active[s] = 1;
    if (t.host_assignment != kWaiting) {
      st.host_ips_used[t.host_assignment] += d.ips;
      st.host_ram_used[t.host_assignment] += d.ram;
      st.host_disk_used[t.host_assignment] += d.disk;
      st.host_bw_used[t.host_assignment] += d.bw;
    }
  }
  return st;
}

void Simulator::override_state(const ClusterState& predicted) {
  if (predicted.num_slots != cfg_.max_task_slots)
    throw std::invalid_argument("override_state: slot count mismatch");
  for (int s = 0; s < cfg_.max_task_slots; ++s) {
    if (!slots_[s].has_value()) continue;
    double cur_ips = slots_[s]->demand_at(interval_).ips;
    if (cur_ips > 0.0 && predicted.slot_demand[s].ips > 0.0)
      demand_scale_[s] = predicted.slot_demand[s].ips / cur_ips;
  }
}

}  // namespace gosh::sim
