// Cross-run comparison tables, figure-data series and the exploration-weight
// sensitivity sweep.

#pragma once

#include <nlohmann/json_fwd.hpp>

#include "gosh/harness/experiment.hpp"

namespace gosh::harness {

// Requires >= 2 completed run directories (metrics.csv + summary.json +
// config.json) with matching workload settings; throws std::runtime_error
// with a mismatch description otherwise. Writes comparison.json,
// objective_vs_interval.csv and iterations.csv into out_dir (when set) and
// returns the comparison table.
nlohmann::json compare_runs(const std::vector<std::string>& run_dirs,
                            const std::string& out_dir);

// Runs the base config once with the dynamic exploration weight and once per
// static k, writing response_time_vs_k.csv plus per-run artifacts under
// out_dir/k-<value>/ and out_dir/dynamic/.
nlohmann::json sweep_k(const ExperimentConfig& base,
                       const std::vector<double>& static_ks,
                       const std::string& out_dir);

}  // namespace gosh::harness
