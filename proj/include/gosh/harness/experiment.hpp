// End-to-end experiment execution: scheduling loop, per-interval metrics CSV,
// decision log and aggregate summary.

#pragma once

#include <map>
#include <nlohmann/json.hpp>

#include "gosh/harness/config.hpp"

namespace gosh::harness {

struct IntervalRow {
  sim::IntervalMetrics metrics;
  double objective = 0.0;
  double k = 0.0;
  double xi = 0.0;
};

struct RunResult {
  std::vector<IntervalRow> rows;  // all intervals, pre-truncation
  std::map<std::string, double> sla_deadlines;
  nlohmann::json summary;
};

// One seeded run. When out_dir is non-empty writes metrics.csv, summary.json,
// decisions.jsonl and sla.json there.
RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed,
                         const std::string& out_dir);

// All seeds in cfg.seeds into out_dir/seed-<s>/ plus a combined summary.json.
nlohmann::json run_all_seeds(const ExperimentConfig& cfg,
                             const std::string& out_dir);

// CSV (de)serialization used for the aggregation round-trip guarantees.
std::string metrics_csv(const std::vector<IntervalRow>& rows);
std::vector<IntervalRow> parse_metrics_csv(const std::string& text);

// Aggregates the post-truncation rows into the summary JSON.
nlohmann::json summarize(const std::vector<IntervalRow>& rows,
                         double truncation);

}  // namespace gosh::harness
