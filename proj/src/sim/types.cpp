#include "gosh/sim/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gosh::sim {

double HostSpec::power_at(double utilization) const {
  utilization = std::clamp(utilization, 0.0, 1.0);
  const auto& p = power_profile;
  if (utilization <= p.front().utilization) return p.front().watts;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (utilization <= p[i].utilization) {
      const double span = p[i].utilization - p[i - 1].utilization;
      const double frac = span > 0 ? (utilization - p[i - 1].utilization) / span
                                   : 1.0;
      return p[i - 1].watts + frac * (p[i].watts - p[i - 1].watts);
    }
  }
  return p.back().watts;
}

double HostSpec::peak_watts() const { return power_profile.back().watts; }
double HostSpec::idle_watts() const { return power_profile.front().watts; }

void HostSpec::validate() const {
  if (ips_capacity <= 0 || ram_capacity <= 0 || disk_capacity <= 0 ||
      bw_capacity <= 0)
    throw std::invalid_argument("HostSpec " + std::to_string(id) +
                                ": capacities must be positive");
  if (power_profile.size() < 2 || power_profile.front().utilization > 0.0 ||
      power_profile.back().utilization < 1.0)
    throw std::invalid_argument("HostSpec " + std::to_string(id) +
                                ": power profile must cover utilization 0..1");
  for (std::size_t i = 1; i < power_profile.size(); ++i) {
    if (power_profile[i].utilization <= power_profile[i - 1].utilization)
      throw std::invalid_argument("HostSpec " + std::to_string(id) +
                                  ": power profile utilization not increasing");
    if (power_profile[i].watts < power_profile[i - 1].watts)
      throw std::invalid_argument("HostSpec " + std::to_string(id) +
                                  ": watts must be non-decreasing");
  }
}

const Demand& Task::demand_at(int interval) const {
  if (demand_trace.empty())
    throw std::logic_error("Task " + std::to_string(id) + ": empty trace");
  int age = std::max(0, interval - created_at);
  return demand_trace[age % demand_trace.size()];
}

double Task::ram_reservation() const {
  double peak = 0.0;
  for (const auto& d : demand_trace) peak = std::max(peak, d.ram);
  return peak;
}

void Task::validate() const {
  if (total_instructions <= 0)
    throw std::invalid_argument("Task " + std::to_string(id) +
                                ": total_instructions must be positive");
  if (demand_trace.empty())
    throw std::invalid_argument("Task " + std::to_string(id) +
                                ": demand trace is empty");
  for (const auto& d : demand_trace)
    if (d.ips < 0 || d.ram < 0 || d.disk < 0 || d.bw < 0)
      throw std::invalid_argument("Task " + std::to_string(id) +
                                  ": negative demand");
}

std::vector<double> ClusterState::flatten(
    const std::vector<HostSpec>& hosts) const {
  if (static_cast<int>(hosts.size()) != num_hosts)
    throw std::invalid_argument("ClusterState: host count mismatch");
  std::vector<double> out;
  out.reserve(flat_dim(num_hosts, num_slots));
  double max_ips = 0, max_ram = 0, max_disk = 0, max_bw = 0;
  for (const auto& h : hosts) {
    max_ips = std::max(max_ips, h.ips_capacity);
    max_ram = std::max(max_ram, h.ram_capacity);
    max_disk = std::max(max_disk, h.disk_capacity);
    max_bw = std::max(max_bw, h.bw_capacity);
  }
  auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  for (int j = 0; j < num_hosts; ++j) {
    out.push_back(unit(host_ips_used[j] / hosts[j].ips_capacity));
    out.push_back(unit(host_ram_used[j] / hosts[j].ram_capacity));
    out.push_back(unit(host_disk_used[j] / hosts[j].disk_capacity));
    out.push_back(unit(host_bw_used[j] / hosts[j].bw_capacity));
  }
  for (int s = 0; s < num_slots; ++s) {
    out.push_back(unit(slot_demand[s].ips / max_ips));
    out.push_back(unit(slot_demand[s].ram / max_ram));
    out.push_back(unit(slot_demand[s].disk / max_disk));
    out.push_back(unit(slot_demand[s].bw / max_bw));
    // one-hot placement block so a surrogate can relate the incumbent host
    // to a candidate decision row (all-zero when waiting or empty)
    for (int j = 0; j < num_hosts; ++j)
      out.push_back(slot_host[s] == j ? 1.0 : 0.0);
  }
  return out;
}

int DecisionMatrix::one_hot_column(int r) const {
  int hot = kWaiting;
  for (int c = 0; c < cols; ++c) {
    double v = at(r, c);
    if (v == 0.0) continue;
    if (v != 1.0 || hot != kWaiting)
      throw std::invalid_argument("DecisionMatrix: row " + std::to_string(r) +
                                  " is not one-hot");
    hot = c;
  }
  return hot;
}

ClusterState unflatten_state(const std::vector<double>& flat,
                             const std::vector<HostSpec>& hosts,
                             int num_slots) {
  const int n = static_cast<int>(hosts.size());
  if (static_cast<int>(flat.size()) != ClusterState::flat_dim(n, num_slots))
    throw std::invalid_argument("unflatten_state: dimension mismatch");
  double max_ips = 0, max_ram = 0, max_disk = 0, max_bw = 0;
  for (const auto& h : hosts) {
    max_ips = std::max(max_ips, h.ips_capacity);
    max_ram = std::max(max_ram, h.ram_capacity);
    max_disk = std::max(max_disk, h.disk_capacity);
    max_bw = std::max(max_bw, h.bw_capacity);
  }
  ClusterState st;
  st.num_hosts = n;
  st.num_slots = num_slots;
  st.host_ips_used.resize(n);
  st.host_ram_used.resize(n);
  st.host_disk_used.resize(n);
  st.host_bw_used.resize(n);
  st.slot_demand.resize(num_slots);
  st.slot_host.assign(num_slots, kWaiting);
  st.slot_active.assign(num_slots, 0);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    st.host_ips_used[j] = flat[k++] * hosts[j].ips_capacity;
    st.host_ram_used[j] = flat[k++] * hosts[j].ram_capacity;
    st.host_disk_used[j] = flat[k++] * hosts[j].disk_capacity;
    st.host_bw_used[j] = flat[k++] * hosts[j].bw_capacity;
  }
  for (int s = 0; s < num_slots; ++s) {
    st.slot_demand[s].ips = flat[k++] * max_ips;
    st.slot_demand[s].ram = flat[k++] * max_ram;
    st.slot_demand[s].disk = flat[k++] * max_disk;
    st.slot_demand[s].bw = flat[k++] * max_bw;
    for (int j = 0; j < n; ++j) {
      if (flat[k++] > 0.5) {
        st.slot_host[s] = j;
        st.slot_active[s] = 1;
      }
    }
  }
  return st;
}

double jain_index(const std::vector<double>& xs) {
  if (xs.empty()) return 1.0;
  double s = 0.0, s2 = 0.0;
  for (double x : xs) {
    s += x;
    s2 += x * x;
  }
  if (s2 == 0.0) return 1.0;
  return (s * s) / (xs.size() * s2);
}

}  // namespace gosh::sim
