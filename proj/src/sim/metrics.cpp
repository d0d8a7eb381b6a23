#include "gosh/sim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gosh::sim {

double nearest_rank_percentile(std::vector<double> xs, double pct) {
  if (xs.empty())
    throw std::invalid_argument("nearest_rank_percentile: empty sample");
  std::sort(xs.begin(), xs.end());
  const auto n = static_cast<double>(xs.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, xs.size());
  return xs[rank - 1];
}

std::map<std::string, double> compute_sla_deadlines(
    const std::vector<CompletedTask>& reference, int min_samples) {
  std::map<std::string, std::vector<double>> by_class;
  for (const auto& c : reference)
    by_class[c.app_class].push_back(c.response_time);
  if (by_class.empty())
    throw std::invalid_argument("compute_sla_deadlines: empty reference run");
  std::map<std::string, double> out;
  for (auto& [cls, times] : by_class) {
    if (static_cast<int>(times.size()) < min_samples)
      throw std::invalid_argument(
          "compute_sla_deadlines: class '" + cls + "' has only " +
          std::to_string(times.size()) + " samples (need " +
          std::to_string(min_samples) + ")");
    out[cls] = nearest_rank_percentile(std::move(times), 95.0);
  }
  return out;
}

int count_sla_violations(const std::vector<CompletedTask>& completed,
                         const std::map<std::string, double>& deadlines) {
  int n = 0;
  for (const auto& c : completed) {
    auto it = deadlines.find(c.app_class);
    if (it != deadlines.end() && c.response_time > it->second) ++n;
  }
  return n;
}

}  // namespace gosh::sim
