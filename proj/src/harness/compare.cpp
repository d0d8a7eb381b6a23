#include "gosh/harness/compare.hpp"

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gosh/nn/checkpoint.hpp"

namespace gosh::harness {

using nlohmann::json;

namespace {

struct LoadedRun {
  std::string dir;
  std::string label;
  json config;
  json summary;
  std::vector<IntervalRow> rows;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

LoadedRun load_run(const std::string& dir) {
  LoadedRun r;
  r.dir = dir;
  r.config = nn::load_json(dir + "/config.json");
  r.summary = nn::load_json(dir + "/summary.json");
  r.rows = parse_metrics_csv(read_text(dir + "/metrics.csv"));
  r.label = r.config.value("scheduler", dir);
  return r;
}

void check_compatible(const LoadedRun& a, const LoadedRun& b) {
  for (const char* key :
       {"intervals", "interval_seconds", "lambda", "hosts_file",
        "max_task_slots", "truncation"}) {
    if (a.config.at(key) != b.config.at(key))
      throw std::runtime_error("compare: runs disagree on '" +
                               std::string(key) + "' (" + a.dir + " vs " +
                               b.dir + ")");
  }
  if (a.rows.size() != b.rows.size())
    throw std::runtime_error("compare: interval count mismatch (" + a.dir +
                             " vs " + b.dir + ")");
}

const char* kTableMetrics[] = {"energy_kwh", "aec",       "art_seconds",
                               "objective",  "fairness",  "migration_time",
                               "wait_time",  "optimizer_iterations"};

}  // namespace

json compare_runs(const std::vector<std::string>& run_dirs,
                  const std::string& out_dir) {
  if (run_dirs.size() < 2)
    throw std::runtime_error("compare: need at least two run directories");
  std::vector<LoadedRun> runs;
  for (const auto& dir : run_dirs) runs.push_back(load_run(dir));
  for (std::size_t i = 1; i < runs.size(); ++i)
    check_compatible(runs[0], runs[i]);

  json table = json::array();
  for (const auto& r : runs) {
    json row;
    row["run"] = r.dir;
    row["scheduler"] = r.label;
    for (const char* m : kTableMetrics) {
      double mean = r.summary.at("metrics").at(m).at("mean").get<double>();
      double base =
          runs[0].summary.at("metrics").at(m).at("mean").get<double>();
      row[m] = mean;
      row[std::string(m) + "_delta"] = mean - base;
    }
    row["sla_fraction"] = r.summary.at("sla").at("fraction").get<double>();
    row["sla_fraction_delta"] =
        row["sla_fraction"].get<double>() -
        runs[0].summary.at("sla").at("fraction").get<double>();
    row["scheduling_ms_mean"] =
        r.summary.contains("timing")
            ? r.summary.at("timing").at("mean").get<double>()
            : 0.0;
    table.push_back(row);
  }
  json result;
  result["baseline"] = runs[0].dir;
  result["table"] = table;

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    nn::save_json(result, out_dir + "/comparison.json");

    {  // objective vs interval series, one column per run
      std::ostringstream csv;
      csv << "interval";
      for (const auto& r : runs) csv << ',' << r.label << ':' << r.dir;
      csv << "\n";
      for (std::size_t t = 0; t < runs[0].rows.size(); ++t) {
        csv << runs[0].rows[t].metrics.interval;
        for (const auto& r : runs) csv << ',' << r.rows[t].objective;
        csv << "\n";
      }
      write_text(out_dir + "/objective_vs_interval.csv", csv.str());
    }
    {  // optimizer cost per scheduler
      std::ostringstream csv;
      csv << "run,scheduler,mean_iterations,mean_scheduling_ms,"
             "ms_per_iteration\n";
      for (const auto& r : runs) {
        double iters = r.summary.at("metrics")
                           .at("optimizer_iterations")
                           .at("mean")
                           .get<double>();
        double ms = r.summary.contains("timing")
                        ? r.summary.at("timing").at("mean").get<double>()
                        : 0.0;
        csv << r.dir << ',' << r.label << ',' << iters << ',' << ms << ','
            << (iters > 0 ? ms / iters : 0.0) << "\n";
      }
      write_text(out_dir + "/iterations.csv", csv.str());
    }
  }
  return result;
}

json sweep_k(const ExperimentConfig& base, const std::vector<double>& static_ks,
             const std::string& out_dir) {
  json series = json::array();
  auto run_variant = [&](const std::string& label, bool dynamic, double k0) {
    ExperimentConfig cfg = base;
    cfg.dynamic_k = dynamic;
    if (!dynamic) cfg.k0 = k0;
    std::string dir = out_dir.empty() ? "" : out_dir + "/" + label;
    json combined = run_all_seeds(cfg, dir);
    json entry;
    entry["label"] = label;
    entry["dynamic"] = dynamic;
    entry["k0"] = dynamic ? base.k0 : k0;
    entry["art_seconds_mean"] = combined["art_seconds_mean"];
    entry["objective_mean"] = combined["objective_mean"];
    series.push_back(entry);
    return combined;
  };

  run_variant("dynamic", true, base.k0);
  for (double k : static_ks) {
    std::ostringstream label;
    label << "k-" << k;
    run_variant(label.str(), false, k);
  }

  json result;
  result["series"] = series;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ostringstream csv;
    csv << "label,k0,dynamic,art_seconds_mean,objective_mean\n";
    for (const auto& e : series)
      csv << e["label"].get<std::string>() << ',' << e["k0"].get<double>()
          << ',' << (e["dynamic"].get<bool>() ? 1 : 0) << ','
          << e["art_seconds_mean"].get<double>() << ','
          << e["objective_mean"].get<double>() << "\n";
    write_text(out_dir + "/response_time_vs_k.csv", csv.str());
    nn::save_json(result, out_dir + "/sweep.json");
  }
  return result;
}

}  // namespace gosh::harness
