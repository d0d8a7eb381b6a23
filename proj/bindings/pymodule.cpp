// Python bindings for the co-simulator and scheduler harness. The heavy
// lifting stays in C++; Python sees JSON-shaped configs and results.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "gosh/harness/compare.hpp"
#include "gosh/harness/dataset.hpp"
#include "gosh/harness/experiment.hpp"
#include "gosh/harness/train.hpp"
#include "gosh/nn/checkpoint.hpp"
#include "gosh/sched/scheduler.hpp"
#include "gosh/surrogate/bundle.hpp"
#include "gosh/surrogate/exploration.hpp"

namespace py = pybind11;
using namespace gosh;
using nlohmann::json;

namespace {

json to_json(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return json::parse(obj.cast<std::string>());
  py::object dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const json& j) {
  py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

harness::ExperimentConfig config_of(const py::object& obj) {
  return harness::config_from_json(to_json(obj));
}

}  // namespace

PYBIND11_MODULE(_gosh, m) {
  m.doc() = "fog-computing co-simulator and surrogate-driven schedulers";

  m.def("value_at_risk", &surrogate::value_at_risk, py::arg("mu"),
        py::arg("sigma"),
        "95% value-at-risk of a Gaussian objective estimate");

  m.def(
      "objective_score",
      [](double aec, double art_norm, double alpha, double beta) {
        sim::IntervalMetrics metrics;
        metrics.aec = aec;
        metrics.art_norm = art_norm;
        return sched::objective_score(metrics, {alpha, beta, 3000.0});
      },
      py::arg("aec"), py::arg("art_norm"), py::arg("alpha") = 0.5,
      py::arg("beta") = 0.5,
      "interval objective: alpha * AEC + beta * normalized ART");

  m.def(
      "update_exploration",
      [](double k, double xi_ma, double xi, double psi, double delta) {
        surrogate::ExplorationState s;
        s.k = k;
        s.xi_ma = xi_ma;
        s.psi = psi;
        s.delta = delta;
        auto next = surrogate::update_exploration(s, xi);
        return py::make_tuple(next.k, next.xi_ma);
      },
      py::arg("k"), py::arg("xi_ma"), py::arg("xi"), py::arg("psi") = 0.9,
      py::arg("delta") = 0.1,
      "one dynamic exploration-weight update; returns (k, xi_ma)");

  m.def("scheduler_names", [] {
    std::vector<std::string> names;
    for (auto k :
         {sched::SchedulerKind::Gosh, sched::SchedulerKind::GoshStar,
          sched::SchedulerKind::Gobi, sched::SchedulerKind::Sgobi,
          sched::SchedulerKind::Hgobi, sched::SchedulerKind::HgobiStar,
          sched::SchedulerKind::SgobiStar, sched::SchedulerKind::Random})
      names.push_back(sched::scheduler_name(k));
    return names;
  });

  m.def(
      "run_experiment",
      [](const py::object& config, std::uint64_t seed,
         const std::string& out_dir) {
        auto result = harness::run_experiment(config_of(config), seed, out_dir);
        return to_py(result.summary);
      },
      py::arg("config"), py::arg("seed"), py::arg("out_dir") = "",
      "one seeded scheduling run; returns the summary dict");

  m.def(
      "run_all_seeds",
      [](const py::object& config, const std::string& out_dir) {
        return to_py(harness::run_all_seeds(config_of(config), out_dir));
      },
      py::arg("config"), py::arg("out_dir") = "");

  m.def(
      "gen_dataset",
      [](const py::object& config, int intervals, std::uint64_t seed,
         const std::string& out_path, const std::string& gosh_checkpoint) {
        auto data = harness::gen_dataset(config_of(config), intervals, seed,
                                         gosh_checkpoint);
        harness::save_dataset(data, out_path);
        return static_cast<int>(data.records.size());
      },
      py::arg("config"), py::arg("intervals"), py::arg("seed"),
      py::arg("out_path"), py::arg("gosh_checkpoint") = "",
      "random-scheduler training dataset; returns the record count");

  m.def(
      "train",
      [](const std::string& dataset_path, const std::string& checkpoint_path,
         int folds, int epochs, double lr, std::uint64_t seed,
         bool train_lstm) {
        auto data = harness::load_dataset(dataset_path);
        harness::TrainConfig cfg;
        cfg.folds = folds;
        cfg.epochs = epochs;
        cfg.lr = lr;
        cfg.seed = seed;
        cfg.train_lstm = train_lstm;
        auto result = harness::train_models(data, cfg);
        nn::save_json(harness::train_checkpoint(result), checkpoint_path);
        return to_py(harness::train_report(result));
      },
      py::arg("dataset_path"), py::arg("checkpoint_path"),
      py::arg("folds") = 5, py::arg("epochs") = 200, py::arg("lr") = 1e-5,
      py::arg("seed") = 0, py::arg("train_lstm") = true,
      "k-fold surrogate training; writes a checkpoint, returns the report");

  m.def(
      "compare",
      [](const std::vector<std::string>& run_dirs, const std::string& out_dir) {
        return to_py(harness::compare_runs(run_dirs, out_dir));
      },
      py::arg("run_dirs"), py::arg("out_dir") = "");

  m.def(
      "sweep_k",
      [](const py::object& config, const std::vector<double>& static_ks,
         const std::string& out_dir) {
        return to_py(harness::sweep_k(config_of(config), static_ks, out_dir));
      },
      py::arg("config"), py::arg("static_ks"), py::arg("out_dir") = "");
}
