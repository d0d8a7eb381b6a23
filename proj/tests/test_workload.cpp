#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "gosh/sim/workload.hpp"

using namespace gosh;

namespace {

double mean_arrivals(double lambda, std::uint64_t seed, int intervals) {
  sim::WorkloadConfig cfg;
  cfg.lambda = lambda;
  sim::WorkloadGenerator gen(cfg, seed);
  double total = 0;
  for (int t = 0; t < intervals; ++t)
    total += static_cast<double>(gen.arrivals(t).size());
  return total / intervals;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "gosh_workload_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("poisson arrival rate matches lambda") {
  CHECK(mean_arrivals(5.0, 7, 400) > 4.0);
  CHECK(mean_arrivals(5.0, 7, 400) < 6.0);
  CHECK(mean_arrivals(1.2, 11, 400) > 0.9);
  CHECK(mean_arrivals(1.2, 11, 400) < 1.5);
}

TEST_CASE("same seed gives identical task streams") {
  sim::WorkloadConfig cfg;
  cfg.lambda = 2.0;
  sim::WorkloadGenerator a(cfg, 123), b(cfg, 123), c(cfg, 124);
  bool diverged_from_c = false;
  for (int t = 0; t < 50; ++t) {
    auto ta = a.arrivals(t), tb = b.arrivals(t), tc = c.arrivals(t);
    REQUIRE(ta.size() == tb.size());
    if (ta.size() != tc.size()) diverged_from_c = true;
    for (std::size_t i = 0; i < ta.size(); ++i) {
      CHECK(ta[i].id == tb[i].id);
      CHECK(ta[i].app_class == tb[i].app_class);
      CHECK(ta[i].total_instructions == tb[i].total_instructions);
      REQUIRE(ta[i].demand_trace.size() == tb[i].demand_trace.size());
      for (std::size_t d = 0; d < ta[i].demand_trace.size(); ++d) {
        CHECK(ta[i].demand_trace[d].ips == tb[i].demand_trace[d].ips);
        CHECK(ta[i].demand_trace[d].ram == tb[i].demand_trace[d].ram);
      }
    }
  }
  CHECK(diverged_from_c);  // different seed actually changes the stream
}

TEST_CASE("sequential regime is lower variance than random") {
  auto trace_cv = [](sim::TraceMode mode) {
    sim::WorkloadConfig cfg;
    cfg.lambda = 3.0;
    cfg.mode = mode;
    sim::WorkloadGenerator gen(cfg, 5);
    double worst = 0.0;
    int seen = 0;
    for (int t = 0; t < 60 && seen < 20; ++t) {
      for (const auto& task : gen.arrivals(t)) {
        double mn = 1e18, mx = 0;
        for (const auto& d : task.demand_trace) {
          mn = std::min(mn, d.ips);
          mx = std::max(mx, d.ips);
        }
        worst = std::max(worst, mx / mn);
        ++seen;
      }
    }
    return worst;
  };
  CHECK(trace_cv(sim::TraceMode::Sequential) < trace_cv(sim::TraceMode::Random));
}

TEST_CASE("csv trace loader") {
  auto dir = temp_dir();
  {
    std::ofstream out(dir / "a.csv");
    out << "ips,ram,disk,bw\n100,200,300,4\n150,250,350,5\n";
  }
  auto trace = sim::load_trace_csv((dir / "a.csv").string());
  REQUIRE(trace.size() == 2);
  CHECK(trace[0].ips == 100);
  CHECK(trace[1].bw == 5);

  {
    std::ofstream out(dir / "bad.csv");
    out << "100,200,300\n";  // missing column
  }
  try {
    sim::load_trace_csv((dir / "bad.csv").string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("bad.csv") != std::string::npos);  // names the file
  }
  CHECK_THROWS_AS(sim::load_trace_csv((dir / "missing.csv").string()),
                  std::runtime_error);

  sim::WorkloadConfig cfg;
  cfg.mode = sim::TraceMode::Csv;
  cfg.csv_dir = dir.string();
  std::filesystem::remove(dir / "bad.csv");
  sim::WorkloadGenerator gen(cfg, 1);
  bool any = false;
  for (int t = 0; t < 20 && !any; ++t) any = !gen.arrivals(t).empty();
  CHECK(any);
  std::filesystem::remove_all(dir);
}

TEST_CASE("mid-run regime switch changes the generator mode") {
  sim::WorkloadConfig cfg;
  cfg.lambda = 2.0;
  cfg.mode = sim::TraceMode::Random;
  sim::WorkloadGenerator gen(cfg, 9);
  gen.set_mode(sim::TraceMode::Sequential);
  CHECK(gen.config().mode == sim::TraceMode::Sequential);
}
