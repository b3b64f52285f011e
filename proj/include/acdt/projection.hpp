#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acdt/bundle.hpp"
#include "acdt/dataset.hpp"
#include "acdt/transfer.hpp"

namespace acdt {

enum class ProjectionMode { pca, transferred };

inline ProjectionMode parse_projection_mode(const std::string& name) {
  if (name == "pca") {
    return ProjectionMode::pca;
  }
  if (name == "transferred") {
    return ProjectionMode::transferred;
  }
  throw std::invalid_argument("projection mode must be 'pca' or 'transferred', got '" +
                              name + "'");
}

// Two-dimensional scatter of every instance with its latent-domain label
// ("1".."m") or "target". Rows keep the original order: training rows first.
struct ProjectionData {
  Eigen::MatrixXd coords;  // N x 2
  std::vector<std::string> labels;
};

inline ProjectionData project_points(const ModelBundle& bundle,
                                     const Dataset& train, const Dataset& test,
                                     ProjectionMode mode) {
  validate_dataset(train);
  const Eigen::Index n_tr = train.n();
  const Eigen::Index n_te = test.features.rows();
  if (bundle.labels.size() != static_cast<std::size_t>(n_tr)) {
    throw std::invalid_argument(
        "project_points: bundle labels do not cover the training rows");
  }
  if (n_te > 0 && test.features.cols() != train.p()) {
    throw std::invalid_argument(
        "project_points: train and test feature dimensions differ");
  }

  ProjectionData out;
  out.labels.reserve(static_cast<std::size_t>(n_tr + n_te));
  for (Eigen::Index i = 0; i < n_tr; ++i) {
    out.labels.push_back(std::to_string(bundle.labels[static_cast<std::size_t>(i)]));
  }
  for (Eigen::Index i = 0; i < n_te; ++i) {
    out.labels.push_back("target");
  }

  if (mode == ProjectionMode::pca) {
    const Eigen::Index p = train.p();
    if (p < 2) {
      throw std::invalid_argument(
          "project_points: pca mode needs at least two features");
    }
    Eigen::MatrixXd M(n_tr + n_te, p);
    for (Eigen::Index j = 0; j < p; ++j) {
      M.col(j).head(n_tr) =
          (train.features.col(j).array() - bundle.scaler.means[j]) /
          bundle.scaler.stds[j];
      if (n_te > 0) {
        M.col(j).tail(n_te) =
            (test.features.col(j).array() - bundle.scaler.means[j]) /
            bundle.scaler.stds[j];
      }
    }
    const Eigen::RowVectorXd mean = M.colwise().mean();
    M.rowwise() -= mean;
    const Eigen::MatrixXd cov =
        M.transpose() * M / static_cast<double>(M.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
      throw std::runtime_error("project_points: covariance eigendecomposition failed");
    }
    // eigenvalues come back ascending; the top two live in the last columns
    Eigen::MatrixXd V(p, 2);
    V.col(0) = eig.eigenvectors().col(p - 1);
    V.col(1) = eig.eigenvectors().col(p - 2);
    detail::canonicalize_signs(V);
    out.coords = M * V;
  } else {
    if (bundle.map.q < 2) {
      throw std::invalid_argument(
          "project_points: transferred mode needs a map with q >= 2");
    }
    const JointStack stack = build_joint_stack(
        train, test, bundle.labels, bundle.config.transfer.alpha);
    const Eigen::MatrixXd Z = transform(bundle.map, stack.D);
    out.coords.resize(n_tr + n_te, 2);
    for (Eigen::Index c = 0; c < Z.cols(); ++c) {
      const int orig = stack.order[static_cast<std::size_t>(c)];
      out.coords(orig, 0) = Z(0, c);
      out.coords(orig, 1) = Z(1, c);
    }
  }
  return out;
}

inline void write_projection_csv(const ProjectionData& data,
                                 const std::string& path) {
  if (data.coords.rows() != static_cast<Eigen::Index>(data.labels.size()) ||
      data.coords.cols() != 2) {
    throw std::invalid_argument("write_projection_csv: malformed projection data");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_projection_csv: cannot open " + path);
  }
  out << "x1,x2,domain\n";
  for (Eigen::Index i = 0; i < data.coords.rows(); ++i) {
    out << format_double(data.coords(i, 0)) << ","
        << format_double(data.coords(i, 1)) << ","
        << data.labels[static_cast<std::size_t>(i)] << "\n";
  }
  if (!out) {
    throw std::runtime_error("write_projection_csv: write failed for " + path);
  }
}

}  // namespace acdt
