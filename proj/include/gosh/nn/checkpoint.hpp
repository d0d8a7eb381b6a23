// Versioned JSON checkpoints for model parameters.

#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "gosh/nn/models.hpp"

namespace gosh::nn {

inline constexpr int kCheckpointVersion = 1;

nlohmann::json to_checkpoint(const FcnModel& m);
nlohmann::json to_checkpoint(const NpnModel& m);
nlohmann::json to_checkpoint(const LstmModel& m);

// Loaders validate the version, the declared kind and the parameter layout,
// throwing std::runtime_error on any mismatch.
FcnModel fcn_from_checkpoint(const nlohmann::json& j);
NpnModel npn_from_checkpoint(const nlohmann::json& j);
LstmModel lstm_from_checkpoint(const nlohmann::json& j);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace gosh::nn
