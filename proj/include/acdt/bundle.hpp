#pragma once

#include <Eigen/Dense>

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "acdt/dataset.hpp"
#include "acdt/pipeline.hpp"
#include "acdt/ridge.hpp"
#include "acdt/transfer.hpp"

namespace acdt {

inline std::string partition_rule_name(PartitionRule rule) {
  return rule == PartitionRule::modal ? "modal" : "last-sweep";
}

inline PartitionRule parse_partition_rule(const std::string& name) {
  if (name == "last-sweep") {
    return PartitionRule::last_sweep;
  }
  if (name == "modal") {
    return PartitionRule::modal;
  }
  throw std::invalid_argument("partition rule must be 'last-sweep' or 'modal', got '" +
                              name + "'");
}

// Serializable snapshot of a fitted model. The ridge block is absent when
// only the mine/adapt stages have run.
struct ModelBundle {
  int format_version = 1;

  Scaler scaler;
  std::vector<std::string> feature_names;
  std::string response_name;

  std::vector<int> domain_sizes;  // latent sizes then target size
  std::vector<int> labels;        // 1-based latent labels, training order
  std::vector<Eigen::VectorXd> atoms;

  AffineMap map;
  Eigen::VectorXd eigvals;
  double jitter_used = 0.0;

  std::optional<RidgeModel> ridge;

  RunConfig config;
};

inline ModelBundle make_bundle(const PipelineResult& fit, const RunConfig& cfg,
                               const std::vector<std::string>& feature_names,
                               const std::string& response_name) {
  ModelBundle b;
  b.scaler = fit.scaler;
  b.feature_names = feature_names;
  b.response_name = response_name;
  b.domain_sizes = fit.domain_sizes;
  b.labels = fit.partition;
  b.atoms = fit.atoms;
  b.map = fit.map;
  b.eigvals = fit.eigvals;
  b.jitter_used = fit.jitter_used;
  b.ridge = fit.ridge;
  b.config = cfg;
  return b;
}

namespace detail {

using nlohmann::json;

inline json to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v[i]);
  }
  return arr;
}

inline json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] inline void bundle_error(const std::string& field,
                                      const std::string& why) {
  throw std::runtime_error("bundle field '" + field + "': " + why);
}

inline const json& need(const json& j, const std::string& parent,
                        const std::string& key) {
  if (!j.is_object()) {
    bundle_error(parent.empty() ? key : parent, "expected an object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    bundle_error(parent.empty() ? key : parent + "." + key, "missing");
  }
  return *it;
}

inline double need_number(const json& j, const std::string& field) {
  if (!j.is_number()) {
    bundle_error(field, "expected a number");
  }
  return j.get<double>();
}

inline int need_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) {
    bundle_error(field, "expected an integer");
  }
  return j.get<int>();
}

inline std::string need_string(const json& j, const std::string& field) {
  if (!j.is_string()) {
    bundle_error(field, "expected a string");
  }
  return j.get<std::string>();
}

inline bool need_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) {
    bundle_error(field, "expected a boolean");
  }
  return j.get<bool>();
}

inline Eigen::VectorXd need_vector(const json& j, const std::string& field) {
  if (!j.is_array()) {
    bundle_error(field, "expected an array");
  }
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] =
        need_number(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

inline Eigen::MatrixXd need_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) {
    bundle_error(field, "expected a nonempty array of rows");
  }
  const Eigen::VectorXd first = need_vector(j[0], field + "[0]");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), first.size());
  m.row(0) = first.transpose();
  for (std::size_t r = 1; r < j.size(); ++r) {
    const Eigen::VectorXd row =
        need_vector(j[r], field + "[" + std::to_string(r) + "]");
    if (row.size() != m.cols()) {
      bundle_error(field + "[" + std::to_string(r) + "]", "ragged row length");
    }
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

}  // namespace detail

inline void save_bundle(const ModelBundle& b, const std::string& path) {
  using nlohmann::json;
  json j;
  j["format_version"] = b.format_version;

  json scaler;
  scaler["means"] = detail::to_json(b.scaler.means);
  scaler["stds"] = detail::to_json(b.scaler.stds);
  scaler["includes_response"] = b.scaler.includes_response;
  scaler["constant_columns"] = b.scaler.constant_columns;
  scaler["feature_names"] = b.feature_names;
  scaler["response_name"] = b.response_name;
  j["scaler"] = std::move(scaler);

  json partition;
  partition["sizes"] = b.domain_sizes;
  partition["labels"] = b.labels;
  json atoms = json::array();
  for (const Eigen::VectorXd& a : b.atoms) {
    atoms.push_back(detail::to_json(a));
  }
  partition["atoms"] = std::move(atoms);
  j["partition"] = std::move(partition);

  json map;
  map["B"] = detail::to_json(b.map.B);
  map["q"] = b.map.q;
  map["input_semantics"] = b.map.input_semantics;
  j["map"] = std::move(map);
  j["eigenvalues"] = detail::to_json(b.eigvals);
  j["jitter_used"] = b.jitter_used;

  if (b.ridge) {
    json ridge;
    ridge["weights"] = detail::to_json(b.ridge->weights);
    ridge["intercept"] = b.ridge->intercept;
    ridge["ridge_lambda"] = b.ridge->ridge_lambda;
    j["ridge"] = std::move(ridge);
  }

  json cfg;
  cfg["train_path"] = b.config.train_path;
  cfg["test_path"] = b.config.test_path;
  cfg["response"] = b.config.response;
  cfg["name"] = b.config.name;
  cfg["alpha"] = b.config.transfer.alpha;
  cfg["beta"] = b.config.transfer.beta;
  cfg["mu"] = b.config.transfer.mu;
  cfg["tau"] = b.config.transfer.tau;
  cfg["q"] = b.config.transfer.q;
  cfg["knn"] = b.config.transfer.knn;
  cfg["jitter"] = b.config.transfer.jitter;
  cfg["sweeps"] = b.config.gibbs.sweeps;
  cfg["burn_in"] = b.config.gibbs.burn_in;
  cfg["seed"] = b.config.gibbs.seed;
  cfg["partition_rule"] = partition_rule_name(b.config.gibbs.partition_rule);
  cfg["a0"] = b.config.a0;
  cfg["b0"] = b.config.b0;
  cfg["av"] = b.config.av;
  cfg["bv"] = b.config.bv;
  cfg["ai"] = b.config.ai;
  cfg["bi"] = b.config.bi;
  cfg["ridge_lambda"] = b.config.ridge_lambda;
  cfg["split"] = b.config.split;
  cfg["split_seed"] = b.config.split_seed;
  cfg["merge_floor"] = b.config.merge_floor;
  j["config"] = std::move(cfg);

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_bundle: cannot open " + path);
  }
  out << j.dump(2) << "\n";
  if (!out) {
    throw std::runtime_error("save_bundle: write failed for " + path);
  }
}

inline ModelBundle load_bundle(const std::string& path) {
  using detail::bundle_error;
  using detail::need;
  using nlohmann::json;

  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_bundle: cannot open " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_bundle: " + path + " is not valid JSON: " + e.what());
  }

  ModelBundle b;
  b.format_version = detail::need_int(need(j, "", "format_version"), "format_version");
  if (b.format_version != 1) {
    throw std::runtime_error("load_bundle: unsupported format_version " +
                             std::to_string(b.format_version) + " (expected 1)");
  }

  const json& scaler = need(j, "", "scaler");
  b.scaler.means = detail::need_vector(need(scaler, "scaler", "means"), "scaler.means");
  b.scaler.stds = detail::need_vector(need(scaler, "scaler", "stds"), "scaler.stds");
  if (b.scaler.means.size() != b.scaler.stds.size()) {
    bundle_error("scaler.stds", "length differs from scaler.means");
  }
  if ((b.scaler.stds.array() <= 0.0).any()) {
    bundle_error("scaler.stds", "entries must be positive");
  }
  b.scaler.includes_response =
      detail::need_bool(need(scaler, "scaler", "includes_response"),
                        "scaler.includes_response");
  const json& cc = need(scaler, "scaler", "constant_columns");
  if (!cc.is_array()) {
    bundle_error("scaler.constant_columns", "expected an array");
  }
  for (std::size_t i = 0; i < cc.size(); ++i) {
    b.scaler.constant_columns.push_back(
        detail::need_int(cc[i], "scaler.constant_columns[" + std::to_string(i) + "]"));
  }
  const json& fn = need(scaler, "scaler", "feature_names");
  if (!fn.is_array()) {
    bundle_error("scaler.feature_names", "expected an array");
  }
  for (std::size_t i = 0; i < fn.size(); ++i) {
    b.feature_names.push_back(
        detail::need_string(fn[i], "scaler.feature_names[" + std::to_string(i) + "]"));
  }
  b.response_name =
      detail::need_string(need(scaler, "scaler", "response_name"), "scaler.response_name");
  const Eigen::Index p = static_cast<Eigen::Index>(b.feature_names.size());
  if (b.scaler.means.size() != p + (b.scaler.includes_response ? 1 : 0)) {
    bundle_error("scaler.means", "length inconsistent with feature_names");
  }

  const json& partition = need(j, "", "partition");
  const json& sizes = need(partition, "partition", "sizes");
  if (!sizes.is_array() || sizes.size() < 2) {
    bundle_error("partition.sizes", "expected latent sizes plus the target size");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    b.domain_sizes.push_back(
        detail::need_int(sizes[i], "partition.sizes[" + std::to_string(i) + "]"));
  }
  const json& labels = need(partition, "partition", "labels");
  if (!labels.is_array()) {
    bundle_error("partition.labels", "expected an array");
  }
  const int m = static_cast<int>(b.domain_sizes.size()) - 1;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label =
        detail::need_int(labels[i], "partition.labels[" + std::to_string(i) + "]");
    if (label < 1 || label > m) {
      bundle_error("partition.labels[" + std::to_string(i) + "]",
                   "label outside 1.." + std::to_string(m));
    }
    b.labels.push_back(label);
  }
  const json& atoms = need(partition, "partition", "atoms");
  if (!atoms.is_array()) {
    bundle_error("partition.atoms", "expected an array");
  }
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    b.atoms.push_back(
        detail::need_vector(atoms[i], "partition.atoms[" + std::to_string(i) + "]"));
  }

  const json& map = need(j, "", "map");
  b.map.B = detail::need_matrix(need(map, "map", "B"), "map.B");
  b.map.q = detail::need_int(need(map, "map", "q"), "map.q");
  if (b.map.B.cols() != b.map.q) {
    bundle_error("map.B", "column count differs from map.q");
  }
  if (b.map.B.rows() != p + 1) {
    bundle_error("map.B", "row count differs from feature count plus response");
  }
  const json& sem = need(map, "map", "input_semantics");
  if (!sem.is_array()) {
    bundle_error("map.input_semantics", "expected an array");
  }
  for (std::size_t i = 0; i < sem.size(); ++i) {
    b.map.input_semantics.push_back(
        detail::need_string(sem[i], "map.input_semantics[" + std::to_string(i) + "]"));
  }
  b.eigvals = detail::need_vector(need(j, "", "eigenvalues"), "eigenvalues");
  b.jitter_used = detail::need_number(need(j, "", "jitter_used"), "jitter_used");

  if (j.contains("ridge")) {
    const json& ridge = j["ridge"];
    RidgeModel rm;
    rm.weights = detail::need_vector(need(ridge, "ridge", "weights"), "ridge.weights");
    if (rm.weights.size() != b.map.q) {
      bundle_error("ridge.weights", "length differs from map.q");
    }
    rm.intercept = detail::need_number(need(ridge, "ridge", "intercept"), "ridge.intercept");
    rm.ridge_lambda =
        detail::need_number(need(ridge, "ridge", "ridge_lambda"), "ridge.ridge_lambda");
    b.ridge = std::move(rm);
  }

  const json& cfg = need(j, "", "config");
  b.config.train_path = detail::need_string(need(cfg, "config", "train_path"), "config.train_path");
  b.config.test_path = detail::need_string(need(cfg, "config", "test_path"), "config.test_path");
  b.config.response = detail::need_string(need(cfg, "config", "response"), "config.response");
  b.config.name = detail::need_string(need(cfg, "config", "name"), "config.name");
  b.config.transfer.alpha = detail::need_number(need(cfg, "config", "alpha"), "config.alpha");
  b.config.transfer.beta = detail::need_number(need(cfg, "config", "beta"), "config.beta");
  b.config.transfer.mu = detail::need_number(need(cfg, "config", "mu"), "config.mu");
  b.config.transfer.tau = detail::need_number(need(cfg, "config", "tau"), "config.tau");
  b.config.transfer.q = detail::need_int(need(cfg, "config", "q"), "config.q");
  b.config.transfer.knn = detail::need_int(need(cfg, "config", "knn"), "config.knn");
  b.config.transfer.jitter = detail::need_number(need(cfg, "config", "jitter"), "config.jitter");
  b.config.gibbs.sweeps = detail::need_int(need(cfg, "config", "sweeps"), "config.sweeps");
  b.config.gibbs.burn_in = detail::need_int(need(cfg, "config", "burn_in"), "config.burn_in");
  const json& seed = need(cfg, "config", "seed");
  if (!seed.is_number_integer()) {
    bundle_error("config.seed", "expected an integer");
  }
  b.config.gibbs.seed = seed.get<std::uint64_t>();
  b.config.gibbs.partition_rule = parse_partition_rule(
      detail::need_string(need(cfg, "config", "partition_rule"), "config.partition_rule"));
  b.config.a0 = detail::need_number(need(cfg, "config", "a0"), "config.a0");
  b.config.b0 = detail::need_number(need(cfg, "config", "b0"), "config.b0");
  b.config.av = detail::need_number(need(cfg, "config", "av"), "config.av");
  b.config.bv = detail::need_number(need(cfg, "config", "bv"), "config.bv");
  b.config.ai = detail::need_number(need(cfg, "config", "ai"), "config.ai");
  b.config.bi = detail::need_number(need(cfg, "config", "bi"), "config.bi");
  b.config.ridge_lambda =
      detail::need_number(need(cfg, "config", "ridge_lambda"), "config.ridge_lambda");
  b.config.split = detail::need_number(need(cfg, "config", "split"), "config.split");
  const json& split_seed = need(cfg, "config", "split_seed");
  if (!split_seed.is_number_integer()) {
    bundle_error("config.split_seed", "expected an integer");
  }
  b.config.split_seed = split_seed.get<std::uint64_t>();
  b.config.merge_floor =
      detail::need_int(need(cfg, "config", "merge_floor"), "config.merge_floor");
  return b;
}

struct BundlePrediction {
  Eigen::VectorXd pred_z;
  Eigen::VectorXd pred_raw;
  std::optional<double> rmse_z;
};

// Apply a saved model to fresh rows: standardize with the stored scaler,
// stack a zero response channel, map, and run the ridge head.
inline BundlePrediction predict_with_bundle(const ModelBundle& b,
                                            const Dataset& data) {
  if (!b.ridge) {
    throw std::runtime_error("predict_with_bundle: bundle carries no ridge model");
  }
  if (!b.scaler.includes_response) {
    throw std::runtime_error("predict_with_bundle: scaler lacks response statistics");
  }
  const Eigen::Index p = static_cast<Eigen::Index>(b.feature_names.size());
  if (data.features.cols() != p) {
    throw std::invalid_argument("predict_with_bundle: expected " +
                                std::to_string(p) + " feature columns, got " +
                                std::to_string(data.features.cols()));
  }
  const Eigen::Index n = data.features.rows();
  if (n < 1) {
    throw std::invalid_argument("predict_with_bundle: no rows to score");
  }
  Eigen::MatrixXd D(p + 1, n);
  for (Eigen::Index j = 0; j < p; ++j) {
    D.row(j) = ((data.features.col(j).array() - b.scaler.means[j]) /
                b.scaler.stds[j]).transpose();
  }
  D.row(p).setZero();
  const Eigen::MatrixXd Z = transform(b.map, D).transpose();
  BundlePrediction out;
  out.pred_z = predict(*b.ridge, Z);
  const double y_mean = b.scaler.means[p];
  const double y_std = b.scaler.stds[p];
  out.pred_raw = (out.pred_z.array() * y_std + y_mean).matrix();
  if (data.response) {
    const Eigen::VectorXd truth_z =
        ((data.response->array() - y_mean) / y_std).matrix();
    out.rmse_z = rmse(out.pred_z, truth_z);
  }
  return out;
}

}  // namespace acdt
