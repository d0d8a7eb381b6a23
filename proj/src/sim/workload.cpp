#include "gosh/sim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gosh::sim {

TraceMode trace_mode_from_name(const std::string& name) {
  if (name == "sequential") return TraceMode::Sequential;
  if (name == "random") return TraceMode::Random;
  if (name == "csv") return TraceMode::Csv;
  throw std::invalid_argument("unknown trace mode: " + name);
}

std::string trace_mode_name(TraceMode mode) {
  switch (mode) {
    case TraceMode::Sequential: return "sequential";
    case TraceMode::Random: return "random";
    case TraceMode::Csv: return "csv";
  }
  return "random";
}

std::vector<AppClassSpec> default_app_classes() {
  return {
      {"light", 300, 800, 512, 1024, 1000, 3000, 1, 5, 1.0, 2.0, 400},
      {"medium", 800, 1600, 1024, 2048, 2000, 6000, 2, 10, 1.5, 3.0, 800},
      {"heavy", 1500, 3000, 2048, 4096, 4000, 12000, 5, 20, 2.0, 4.0, 1600},
  };
}

std::vector<Demand> load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("trace file unreadable: " + path);
  std::vector<Demand> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    Demand d;
    double* fields[4] = {&d.ips, &d.ram, &d.disk, &d.bw};
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ss, cell, ',')) {
        ok = false;
        break;
      }
      try {
        *fields[i] = std::stod(cell);
      } catch (const std::exception&) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      if (lineno == 1) continue;  // header
      throw std::runtime_error("trace file " + path + ": bad row at line " +
                               std::to_string(lineno));
    }
    out.push_back(d);
  }
  if (out.empty())
    throw std::runtime_error("trace file has no data rows: " + path);
  return out;
}

std::vector<std::vector<Demand>> load_trace_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".csv")
      files.push_back(e.path().string());
  if (ec) throw std::runtime_error("trace directory unreadable: " + dir);
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("trace directory has no csv files: " + dir);
  std::vector<std::vector<Demand>> out;
  for (const auto& f : files) out.push_back(load_trace_csv(f));
  return out;
}

WorkloadGenerator::WorkloadGenerator(WorkloadConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), rng_(seed) {
  if (cfg_.lambda <= 0)
    throw std::invalid_argument("WorkloadGenerator: lambda must be positive");
  if (cfg_.app_classes.empty())
    throw std::invalid_argument("WorkloadGenerator: no app classes");
  if (cfg_.mode == TraceMode::Csv) csv_traces_ = load_trace_dir(cfg_.csv_dir);
}

void WorkloadGenerator::set_mode(TraceMode mode) {
  if (mode == TraceMode::Csv && csv_traces_.empty())
    csv_traces_ = load_trace_dir(cfg_.csv_dir);
  cfg_.mode = mode;
}

// Knuth's multiplication method; portable and reproducible, adequate for the
// small lambdas used here.
int WorkloadGenerator::sample_poisson() {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double limit = std::exp(-cfg_.lambda);
  int k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= u(rng_);
  } while (p > limit);
  return k - 1;
}

Task WorkloadGenerator::make_task(int interval) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u(rng_); };

  const auto& cls =
      cfg_.app_classes[static_cast<std::size_t>(u(rng_) * cfg_.app_classes.size()) %
                       cfg_.app_classes.size()];
  Task t;
  t.id = next_task_id_++;
  t.app_class = cls.name;
  t.created_at = interval;
  t.container_size = cls.container_mb;

  double base_ips = uniform(cls.ips_lo, cls.ips_hi);
  double base_ram = uniform(cls.ram_lo, cls.ram_hi);
  double base_disk = uniform(cls.disk_lo, cls.disk_hi);
  double base_bw = uniform(cls.bw_lo, cls.bw_hi);

  t.demand_trace.resize(cfg_.trace_length);
  if (cfg_.mode == TraceMode::Csv) {
    const auto& trace =
        csv_traces_[static_cast<std::size_t>(u(rng_) * csv_traces_.size()) %
                    csv_traces_.size()];
    int offset = static_cast<int>(u(rng_) * trace.size()) %
                 static_cast<int>(trace.size());
    for (int i = 0; i < cfg_.trace_length; ++i)
      t.demand_trace[i] = trace[(offset + i) % trace.size()];
  } else if (cfg_.mode == TraceMode::Sequential) {
    // low-variance: slow drift around the base demand
    double phase = uniform(0.0, 2.0 * M_PI);
    for (int i = 0; i < cfg_.trace_length; ++i) {
      double wiggle = 1.0 + 0.08 * std::sin(phase + 0.25 * i);
      t.demand_trace[i] = {base_ips * wiggle, base_ram, base_disk * wiggle,
                           base_bw * wiggle};
    }
  } else {
    // high-variance: every interval resampled
    for (int i = 0; i < cfg_.trace_length; ++i) {
      double wiggle = uniform(0.3, 1.7);
      t.demand_trace[i] = {base_ips * wiggle, base_ram,
                           base_disk * uniform(0.3, 1.7),
                           base_bw * uniform(0.3, 1.7)};
    }
  }

  double mean_ips = 0.0;
  for (const auto& d : t.demand_trace) mean_ips += d.ips;
  mean_ips /= t.demand_trace.size();
  double run_intervals = uniform(cls.intervals_lo, cls.intervals_hi);
  t.total_instructions = mean_ips * cfg_.interval_seconds * run_intervals;
  return t;
}

std::vector<Task> WorkloadGenerator::arrivals(int interval) {
  int count = sample_poisson();
  std::vector<Task> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(make_task(interval));
  return out;
}

}  // namespace gosh::sim
