#include <doctest.h>

#include <stdexcept>

#include "gosh/sim/metrics.hpp"

using namespace gosh;

TEST_CASE("nearest-rank percentile closed forms") {
  std::vector<double> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(i);
  CHECK(sim::nearest_rank_percentile(xs, 95) == 95.0);
  CHECK(sim::nearest_rank_percentile(xs, 50) == 50.0);
  CHECK(sim::nearest_rank_percentile(xs, 100) == 100.0);
  CHECK(sim::nearest_rank_percentile({7.0, 7.0, 7.0}, 95) == 7.0);
  CHECK(sim::nearest_rank_percentile({3.0}, 95) == 3.0);
  // ceil(0.95 * 3) = 3 -> the largest of three
  CHECK(sim::nearest_rank_percentile({1.0, 2.0, 3.0}, 95) == 3.0);
  CHECK_THROWS_AS(sim::nearest_rank_percentile({}, 95), std::invalid_argument);
}

TEST_CASE("jain index closed forms") {
  CHECK(sim::jain_index({}) == 1.0);
  CHECK(sim::jain_index({5.0, 5.0, 5.0}) == doctest::Approx(1.0));
  // (1+0)^2 / (2 * 1) = 0.5
  CHECK(sim::jain_index({1.0, 0.0}) == doctest::Approx(0.5));
  // (1+2+3)^2 / (3 * 14) = 36/42
  CHECK(sim::jain_index({1.0, 2.0, 3.0}) == doctest::Approx(36.0 / 42.0));
}

TEST_CASE("sla deadlines and violation counting") {
  std::vector<sim::CompletedTask> reference;
  for (int i = 1; i <= 100; ++i)
    reference.push_back({i, "web", static_cast<double>(i)});
  auto deadlines = sim::compute_sla_deadlines(reference);
  CHECK(deadlines.at("web") == 95.0);

  std::vector<sim::CompletedTask> run;
  for (int i = 0; i < 8; ++i) run.push_back({i, "web", 50.0});
  run.push_back({8, "web", 96.0});
  run.push_back({9, "web", 200.0});
  CHECK(sim::count_sla_violations(run, deadlines) == 2);
  // 2 violations over 10 completions -> fraction 0.2
  CHECK(2.0 / run.size() == doctest::Approx(0.2));
  // unknown class is not a violation
  CHECK(sim::count_sla_violations({{0, "batch", 1e9}}, deadlines) == 0);
}

TEST_CASE("sla deadline computation requires enough samples per class") {
  std::vector<sim::CompletedTask> few = {{0, "rare", 1.0}, {1, "rare", 2.0}};
  try {
    sim::compute_sla_deadlines(few);
    FAIL("expected an error for the under-sampled class");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("rare") != std::string::npos);
  }
}
