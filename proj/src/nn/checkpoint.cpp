#include "gosh/nn/checkpoint.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace gosh::nn {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols)
      throw std::runtime_error("checkpoint: ragged matrix");
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json params_to_json(const std::vector<ParamRef>& params) {
  json out = json::object();
  for (const auto& p : params) out[p.name] = matrix_to_json(*p.mat);
  return out;
}

void params_from_json(const json& j, const std::vector<ParamRef>& params) {
  for (const auto& p : params) {
    if (!j.contains(p.name))
      throw std::runtime_error("checkpoint: missing parameter block " + p.name);
    Matrix m = matrix_from_json(j.at(p.name));
    if (m.rows() != p.mat->rows() || m.cols() != p.mat->cols())
      throw std::runtime_error("checkpoint: layout mismatch in block " +
                               p.name);
    *p.mat = std::move(m);
  }
}

void check_header(const json& j, const std::string& kind) {
  if (!j.contains("version") || j.at("version").get<int>() != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  if (!j.contains("kind") || j.at("kind").get<std::string>() != kind)
    throw std::runtime_error("checkpoint: expected kind '" + kind + "'");
}

json acts_to_json(const std::vector<Act>& acts) {
  json out = json::array();
  for (Act a : acts) out.push_back(act_name(a));
  return out;
}

std::vector<Act> acts_from_json(const json& j) {
  std::vector<Act> out;
  for (const auto& a : j) out.push_back(act_from_name(a.get<std::string>()));
  return out;
}

}  // namespace

json to_checkpoint(const FcnModel& m) {
  json j;
  j["version"] = kCheckpointVersion;
  j["kind"] = "fcn";
  j["sizes"] = m.sizes;
  j["acts"] = acts_to_json(m.acts);
  j["dropout"] = m.dropout;
  j["params"] = params_to_json(m.params());
  return j;
}

json to_checkpoint(const NpnModel& m) {
  json j;
  j["version"] = kCheckpointVersion;
  j["kind"] = "npn";
  j["sizes"] = m.sizes;
  j["acts"] = acts_to_json(m.acts);
  j["params"] = params_to_json(m.params());
  return j;
}

json to_checkpoint(const LstmModel& m) {
  json j;
  j["version"] = kCheckpointVersion;
  j["kind"] = "lstm";
  j["input_dim"] = m.input_dim;
  j["hidden_dim"] = m.hidden_dim;
  j["output_dim"] = m.output_dim;
  j["params"] = params_to_json(m.params());
  return j;
}

FcnModel fcn_from_checkpoint(const json& j) {
  check_header(j, "fcn");
  std::mt19937_64 rng(0);
  FcnModel m = FcnModel::make_sized(j.at("sizes").get<std::vector<int>>(),
                                    acts_from_json(j.at("acts")),
                                    j.at("dropout").get<double>(), rng);
  params_from_json(j.at("params"), m.params());
  return m;
}

NpnModel npn_from_checkpoint(const json& j) {
  check_header(j, "npn");
  std::mt19937_64 rng(0);
  NpnModel m = NpnModel::make_sized(j.at("sizes").get<std::vector<int>>(),
                                    acts_from_json(j.at("acts")), rng);
  params_from_json(j.at("params"), m.params());
  return m;
}

LstmModel lstm_from_checkpoint(const json& j) {
  check_header(j, "lstm");
  std::mt19937_64 rng(0);
  LstmModel m = LstmModel::make(j.at("input_dim").get<int>(),
                                j.at("hidden_dim").get<int>(),
                                j.at("output_dim").get<int>(), rng);
  params_from_json(j.at("params"), m.params());
  return m;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace gosh::nn
