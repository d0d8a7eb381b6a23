// Command line front end: dataset generation, training, experiment runs,
// comparisons and the exploration-weight sweep.

#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>

#include "gosh/harness/compare.hpp"
#include "gosh/harness/dataset.hpp"
#include "gosh/harness/experiment.hpp"
#include "gosh/harness/train.hpp"
#include "gosh/nn/checkpoint.hpp"

using nlohmann::json;
using namespace gosh;

int main(int argc, char** argv) {
  CLI::App app{"fog scheduling co-simulator and scheduler suite"};
  app.require_subcommand(1);

  // gen-dataset
  auto* gen = app.add_subcommand(
      "gen-dataset", "generate a training dataset with the random scheduler");
  std::string gen_config, gen_out, gen_checkpoint;
  int gen_intervals = 2000;
  std::uint64_t gen_seed = 42;
  gen->add_option("--config", gen_config, "experiment config JSON")
      ->required();
  gen->add_option("--out", gen_out, "output dataset JSONL path")->required();
  gen->add_option("--intervals", gen_intervals, "intervals to simulate");
  gen->add_option("--seed", gen_seed, "workload seed");
  gen->add_option("--gosh-checkpoint", gen_checkpoint,
                  "pre-trained models; enables the starred co-simulated "
                  "score feature");

  // train
  auto* train = app.add_subcommand(
      "train", "train surrogate models with cross-validation");
  std::string train_dataset, train_out, train_report_path, train_base;
  harness::TrainConfig tc;
  train->add_option("--dataset", train_dataset, "dataset JSONL path")
      ->required();
  train->add_option("--out", train_out, "output checkpoint path")->required();
  train->add_option("--report", train_report_path,
                    "cross-validation report JSON path");
  train->add_option("--base", train_base,
                    "base (non-starred) checkpoint; required for starred "
                    "datasets");
  train->add_option("--folds", tc.folds, "cross-validation folds");
  train->add_option("--epochs", tc.epochs, "max epochs");
  train->add_option("--patience", tc.patience, "early-stopping patience");
  train->add_option("--batch", tc.batch_size, "minibatch size");
  train->add_option("--lr", tc.lr, "learning rate");
  train->add_option("--weight-decay", tc.weight_decay, "weight decay");
  train->add_option("--seed", tc.seed, "training seed");
  bool no_lstm = false;
  train->add_flag("--no-lstm", no_lstm, "skip the next-state model");

  // run
  auto* run = app.add_subcommand("run", "run a scheduling experiment");
  std::string run_config, run_out;
  std::vector<std::uint64_t> run_seeds;
  run->add_option("--config", run_config, "experiment config JSON")
      ->required();
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--seed", run_seeds, "seed list override");

  // compare
  auto* cmp = app.add_subcommand("compare", "compare completed runs");
  std::string cmp_out;
  std::vector<std::string> cmp_dirs;
  cmp->add_option("--out", cmp_out, "output directory")->required();
  cmp->add_option("runs", cmp_dirs, "run directories (>= 2)")->required();

  // sweep-k
  auto* sweep = app.add_subcommand(
      "sweep-k", "exploration-weight sensitivity sweep");
  std::string sweep_config, sweep_out;
  std::vector<double> sweep_ks = {0.5, 2.0, 5.0, 10.0};
  sweep->add_option("--config", sweep_config, "experiment config JSON")
      ->required();
  sweep->add_option("--out", sweep_out, "output directory")->required();
  sweep->add_option("--k", sweep_ks, "static k values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto cfg = harness::load_experiment_config(gen_config);
      harness::Dataset d =
          harness::gen_dataset(cfg, gen_intervals, gen_seed, gen_checkpoint);
      harness::save_dataset(d, gen_out);
      std::cout << json({{"dataset", gen_out},
                         {"records", d.records.size()},
                         {"x_dim", d.x_dim()},
                         {"starred", d.starred}})
                       .dump()
                << "\n";
    } else if (*train) {
      tc.train_lstm = !no_lstm;
      harness::Dataset d = harness::load_dataset(train_dataset);
      if (d.starred) tc.train_lstm = false;  // states carry the extra feature
      harness::TrainResult r = harness::train_models(d, tc);
      json ck = harness::train_checkpoint(r);
      if (d.starred) {
        if (train_base.empty())
          throw std::runtime_error(
              "training on a starred dataset needs --base");
        json base = nn::load_json(train_base);
        if (!base.contains("bundle") || !base.contains("lstm"))
          throw std::runtime_error(
              "--base checkpoint must contain bundle and lstm");
        ck["inner_bundle"] = base["bundle"];
        ck["lstm"] = base["lstm"];
      }
      nn::save_json(ck, train_out);
      json report = harness::train_report(r);
      if (!train_report_path.empty()) nn::save_json(report, train_report_path);
      std::cout << report.dump() << "\n";
    } else if (*run) {
      auto cfg = harness::load_experiment_config(run_config);
      if (!run_seeds.empty()) cfg.seeds = run_seeds;
      json combined = harness::run_all_seeds(cfg, run_out);
      std::cout << combined.dump() << "\n";
    } else if (*cmp) {
      json result = harness::compare_runs(cmp_dirs, cmp_out);
      std::cout << result.dump() << "\n";
    } else if (*sweep) {
      auto cfg = harness::load_experiment_config(sweep_config);
      json result = harness::sweep_k(cfg, sweep_ks, sweep_out);
      std::cout << result.dump() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << json({{"error", e.what()}}).dump() << "\n";
    return 1;
  }
  return 0;
}
