// Offline training of the surrogate models and the next-state LSTM with
// k-fold cross-validation reporting.

#pragma once

#include <nlohmann/json_fwd.hpp>

#include "gosh/harness/dataset.hpp"
#include "gosh/nn/models.hpp"

namespace gosh::harness {

struct TrainConfig {
  int folds = 5;
  int epochs = 200;
  int patience = 10;       // early-stopping epochs without improvement
  int batch_size = 64;
  double lr = 1e-5;
  double weight_decay = 1e-4;
  std::uint64_t seed = 0;
  bool train_lstm = true;
  int lstm_hidden = 32;
  int lstm_window = 16;
  int lstm_epochs = 50;
  int xi_samples = 10;  // dropout passes per datapoint for the h targets
};

struct FoldReport {
  int fold = 0;
  double f_kld = 0.0;  // aleatoric validation loss of the NPN
  double f_mse = 0.0;  // mean-prediction MSE of the NPN
  double g_mse = 0.0;  // teacher validation MSE
};

struct TrainResult {
  std::vector<FoldReport> folds;
  double h_mse = 0.0;
  double lstm_mse = 0.0;
  surrogate::SurrogateBundle bundle;  // trained on the full dataset
  std::optional<nn::LstmModel> lstm;
};

TrainResult train_models(const Dataset& data, const TrainConfig& cfg);

// Checkpoint containing the bundle (and the LSTM when trained), loadable by
// the scheduler factory and by starred dataset generation.
nlohmann::json train_checkpoint(const TrainResult& r);
nlohmann::json train_report(const TrainResult& r);

}  // namespace gosh::harness
