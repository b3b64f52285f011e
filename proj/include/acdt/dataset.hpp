#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace acdt {

enum class Role { train, test };

// Rows are instances, columns are features. A test set may lack the
// response; a training set must carry it.
struct Dataset {
  Eigen::MatrixXd features;
  std::optional<Eigen::VectorXd> response;
  std::vector<std::string> names;
  Role role = Role::train;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index p() const { return features.cols(); }
};

inline void validate_dataset(const Dataset& d) {
  if (d.n() < 1 || d.p() < 1) {
    throw std::invalid_argument("dataset: need at least one row and column");
  }
  if (!d.features.allFinite()) {
    throw std::invalid_argument("dataset: non-finite feature value");
  }
  if (d.names.size() != static_cast<std::size_t>(d.p())) {
    throw std::invalid_argument("dataset: name count does not match columns");
  }
  if (d.response) {
    if (d.response->size() != d.n()) {
      throw std::invalid_argument("dataset: response length mismatch");
    }
    if (!d.response->allFinite()) {
      throw std::invalid_argument("dataset: non-finite response value");
    }
  } else if (d.role == Role::train) {
    throw std::invalid_argument("dataset: training role requires a response");
  }
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) {
    return {};
  }
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    out.push_back(trim(cell));
  }
  if (!line.empty() && line.back() == ',') {
    out.push_back("");
  }
  return out;
}

inline double parse_cell(const std::string& cell, std::size_t line_no,
                         const std::string& column, const std::string& path) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || cell.empty()) {
    throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                             ", column '" + column + "': cannot parse '" +
                             cell + "' as a real number");
  }
  if (!std::isfinite(value)) {
    throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                             ", column '" + column + "': non-finite value '" +
                             cell + "'");
  }
  return value;
}

}  // namespace detail

// CSV with a header row, UTF-8, '.' decimal separator. response_column
// empty means every column is a feature.
inline Dataset load_csv(const std::string& path,
                        const std::string& response_column = "",
                        Role role = Role::train) {
  if (!std::filesystem::exists(path)) {
    throw std::invalid_argument("load_csv: file does not exist: " + path);
  }
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path + ": empty file");
  }
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.empty()) {
    throw std::runtime_error(path + ": empty header row");
  }
  std::ptrdiff_t response_idx = -1;
  if (!response_column.empty()) {
    auto it = std::find(header.begin(), header.end(), response_column);
    if (it == header.end()) {
      throw std::invalid_argument(path + ": response column '" +
                                  response_column + "' not in header");
    }
    response_idx = it - header.begin();
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {
      continue;
    }
    const std::vector<std::string> cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      row[c] = detail::parse_cell(cells[c], line_no, header[c], path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }

  Dataset d;
  d.role = role;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p =
      static_cast<Eigen::Index>(header.size()) - (response_idx >= 0 ? 1 : 0);
  if (p < 1) {
    throw std::runtime_error(path + ": no feature columns");
  }
  d.features.resize(n, p);
  if (response_idx >= 0) {
    d.response = Eigen::VectorXd(n);
  }
  for (std::size_t c = 0, f = 0; c < header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) == response_idx) {
      continue;
    }
    d.names.push_back(header[c]);
    for (Eigen::Index i = 0; i < n; ++i) {
      d.features(i, static_cast<Eigen::Index>(f)) = rows[i][c];
    }
    ++f;
  }
  if (response_idx >= 0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      (*d.response)[i] = rows[i][response_idx];
    }
  }
  validate_dataset(d);
  return d;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_csv(const Dataset& d, const std::string& path,
                      const std::string& response_name = "y") {
  validate_dataset(d);
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_csv: cannot open " + path);
  }
  for (std::size_t j = 0; j < d.names.size(); ++j) {
    out << (j ? "," : "") << d.names[j];
  }
  if (d.response) {
    out << "," << response_name;
  }
  out << "\n";
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    for (Eigen::Index j = 0; j < d.p(); ++j) {
      out << (j ? "," : "") << format_double(d.features(i, j));
    }
    if (d.response) {
      out << "," << format_double((*d.response)[i]);
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("write_csv: write failed for " + path);
  }
}

// z-score statistics with population (1/n) standard deviation. Columns that
// are constant relative to their magnitude get std 1 so the transform is a
// pure centering.
struct Scaler {
  Eigen::VectorXd means;
  Eigen::VectorXd stds;
  bool includes_response = false;
  std::vector<int> constant_columns;
};

namespace detail {

inline std::pair<double, bool> population_std(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  const double var = (v.array() - mean).square().mean();
  double sd = std::sqrt(var);
  const double floor = 1e-12 * std::max(1.0, std::abs(mean));
  if (sd <= floor) {
    return {1.0, true};
  }
  return {sd, false};
}

}  // namespace detail

inline Scaler fit_scaler(const Dataset& train, bool warn = true) {
  validate_dataset(train);
  if (train.role != Role::train) {
    throw std::invalid_argument("fit_scaler: statistics come from training data only");
  }
  const Eigen::Index p = train.p();
  const Eigen::Index cols = p + (train.response ? 1 : 0);
  Scaler s;
  s.includes_response = train.response.has_value();
  s.means.resize(cols);
  s.stds.resize(cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Eigen::VectorXd col =
        (j < p) ? train.features.col(j) : *train.response;
    s.means[j] = col.mean();
    auto [sd, constant] = detail::population_std(col);
    s.stds[j] = sd;
    if (constant) {
      s.constant_columns.push_back(static_cast<int>(j));
      if (warn) {
        const std::string label =
            (j < p) ? "'" + train.names[j] + "'" : "response";
        std::cerr << "warning: constant column " << label
                  << " standardized with std 1\n";
      }
    }
  }
  return s;
}

inline Dataset apply_scaler(const Scaler& s, const Dataset& d) {
  validate_dataset(d);
  const Eigen::Index p = d.p();
  const Eigen::Index expected = p + (s.includes_response ? 1 : 0);
  if (s.means.size() != expected) {
    throw std::invalid_argument("apply_scaler: scaler was fit on a different shape");
  }
  Dataset out = d;
  for (Eigen::Index j = 0; j < p; ++j) {
    out.features.col(j) = (d.features.col(j).array() - s.means[j]) / s.stds[j];
  }
  if (s.includes_response && d.response) {
    out.response = ((d.response->array() - s.means[p]) / s.stds[p]).matrix();
  }
  return out;
}

inline Eigen::VectorXd zscore(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  auto [sd, constant] = detail::population_std(v);
  (void)constant;
  return ((v.array() - mean) / sd).matrix();
}

// Shrunken response channel of the joint representation: alpha * zscore(y)
// on training entries, exactly zero on every target entry.
inline Eigen::VectorXd build_yhat(const Eigen::VectorXd& train_y,
                                  Eigen::Index n_test, double alpha) {
  if (train_y.size() < 1) {
    throw std::invalid_argument("build_yhat: empty training response");
  }
  if (n_test < 0) {
    throw std::invalid_argument("build_yhat: negative test count");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("build_yhat: alpha must be a nonnegative real");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(train_y.size() + n_test);
  out.head(train_y.size()) = alpha * zscore(train_y);
  return out;
}

// Stacked joint representation. Columns are instances d_i = (standardized
// features, yhat), grouped by domain: latent domains 1..m in label order,
// then the target block from the test set as domain m+1.
struct JointStack {
  Eigen::MatrixXd D;               // (p+1) x N
  std::vector<int> domain_sizes;   // length m+1; last entry is the target size
  std::vector<int> domain_of;      // per-column label in 1..m+1
  std::vector<int> order;          // per-column original instance index
                                   // (train index, or n_train + test index)

  int latent_domains() const {
    return static_cast<int>(domain_sizes.size()) - 1;
  }
};

// partition holds 1-based latent-domain labels for every training instance;
// labels must cover 1..m with no gaps.
inline JointStack build_joint_stack(const Dataset& train, const Dataset& test,
                                    const std::vector<int>& partition,
                                    double alpha) {
  validate_dataset(train);
  if (!train.response) {
    throw std::invalid_argument("build_joint_stack: training response required");
  }
  const Eigen::Index n_tr = train.n();
  const Eigen::Index n_te = test.features.rows();
  if (n_te > 0 && test.features.cols() != train.p()) {
    throw std::invalid_argument(
        "build_joint_stack: train and test feature dimensions differ");
  }
  if (partition.size() != static_cast<std::size_t>(n_tr)) {
    throw std::invalid_argument(
        "build_joint_stack: partition must cover every training instance");
  }
  int m = 0;
  for (int label : partition) {
    m = std::max(m, label);
  }
  if (m < 1) {
    throw std::invalid_argument("build_joint_stack: empty partition");
  }
  std::vector<int> sizes(static_cast<std::size_t>(m), 0);
  for (int label : partition) {
    if (label < 1 || label > m) {
      throw std::invalid_argument("build_joint_stack: partition label " +
                                  std::to_string(label) + " outside 1.." +
                                  std::to_string(m));
    }
    ++sizes[static_cast<std::size_t>(label - 1)];
  }
  for (int k = 0; k < m; ++k) {
    if (sizes[static_cast<std::size_t>(k)] == 0) {
      throw std::invalid_argument("build_joint_stack: latent domain " +
                                  std::to_string(k + 1) + " is empty");
    }
  }

  const Scaler scaler = fit_scaler(train, /*warn=*/false);
  const Dataset train_std = apply_scaler(scaler, train);
  const Eigen::VectorXd yhat = build_yhat(*train.response, n_te, alpha);

  const Eigen::Index p = train.p();
  const Eigen::Index N = n_tr + n_te;
  JointStack stack;
  stack.D.resize(p + 1, N);
  stack.domain_sizes = sizes;
  stack.domain_sizes.push_back(static_cast<int>(n_te));
  stack.domain_of.reserve(static_cast<std::size_t>(N));
  stack.order.reserve(static_cast<std::size_t>(N));

  Eigen::Index col = 0;
  for (int k = 1; k <= m; ++k) {
    for (Eigen::Index i = 0; i < n_tr; ++i) {
      if (partition[static_cast<std::size_t>(i)] != k) {
        continue;
      }
      stack.D.col(col).head(p) = train_std.features.row(i).transpose();
      stack.D(p, col) = yhat[i];
      stack.domain_of.push_back(k);
      stack.order.push_back(static_cast<int>(i));
      ++col;
    }
  }
  if (n_te > 0) {
    Eigen::MatrixXd test_std(n_te, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      test_std.col(j) =
          (test.features.col(j).array() - scaler.means[j]) / scaler.stds[j];
    }
    for (Eigen::Index i = 0; i < n_te; ++i) {
      stack.D.col(col).head(p) = test_std.row(i).transpose();
      stack.D(p, col) = 0.0;
      stack.domain_of.push_back(m + 1);
      stack.order.push_back(static_cast<int>(n_tr + i));
      ++col;
    }
  }
  return stack;
}

}  // namespace acdt
