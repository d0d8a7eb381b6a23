// SLA deadlines and related metric helpers.

#pragma once

#include <map>

#include "gosh/sim/types.hpp"

namespace gosh::sim {

// Nearest-rank percentile: with n samples sorted ascending, the value at
// 1-based index ceil(pct/100 * n).
double nearest_rank_percentile(std::vector<double> xs, double pct);

// Per-app-class deadline = empirical 95th percentile response time of a
// reference run. Requires at least `min_samples` completions per class.
std::map<std::string, double> compute_sla_deadlines(
    const std::vector<CompletedTask>& reference, int min_samples = 20);

int count_sla_violations(const std::vector<CompletedTask>& completed,
                         const std::map<std::string, double>& deadlines);

}  // namespace gosh::sim
