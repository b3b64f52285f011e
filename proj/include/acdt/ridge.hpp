#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace acdt {

struct RidgeModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double ridge_lambda = 0.0;
};

// Minimizes ||y - Zw - b||^2 + ridge_lambda ||w||^2 with the intercept
// unpenalized: center, solve the normal equations, recover b.
inline RidgeModel fit_ridge(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                            double ridge_lambda) {
  const Eigen::Index n = Z.rows();
  const Eigen::Index q = Z.cols();
  if (n < 1 || q < 1) {
    throw std::invalid_argument("fit_ridge: need at least one row and column");
  }
  if (y.size() != n) {
    throw std::invalid_argument("fit_ridge: response length mismatch");
  }
  if (!(ridge_lambda >= 0.0)) {
    throw std::invalid_argument("fit_ridge: ridge_lambda must be >= 0");
  }
  if (!Z.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("fit_ridge: non-finite input");
  }

  const Eigen::RowVectorXd z_mean = Z.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd Zc = Z.rowwise() - z_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd G = Zc.transpose() * Zc;
  G.diagonal().array() += ridge_lambda;
  const Eigen::VectorXd rhs = Zc.transpose() * yc;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ridge_lambda == 0.0) {
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (d.cwiseAbs().minCoeff() <= 1e-12 * std::max(1.0, dmax)) {
      throw std::runtime_error(
          "fit_ridge: singular normal equations; set ridge_lambda > 0");
    }
  }
  RidgeModel model;
  model.weights = ldlt.solve(rhs);
  model.ridge_lambda = ridge_lambda;
  if (!model.weights.allFinite()) {
    throw std::runtime_error(
        "fit_ridge: solve produced non-finite weights; set ridge_lambda > 0");
  }
  const double resid =
      (G * model.weights - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max({1.0, rhs.cwiseAbs().maxCoeff(),
                                 G.cwiseAbs().maxCoeff()});
  if (resid > 1e-8 * scale) {
    throw std::runtime_error(
        "fit_ridge: normal-equations residual too large; set ridge_lambda > 0");
  }
  model.intercept = y_mean - z_mean * model.weights;
  return model;
}

inline Eigen::VectorXd predict(const RidgeModel& model, const Eigen::MatrixXd& Z) {
  if (Z.cols() != model.weights.size()) {
    throw std::invalid_argument("predict: feature dimension mismatch");
  }
  return (Z * model.weights).array() + model.intercept;
}

inline double rmse(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
  if (pred.size() != truth.size()) {
    throw std::invalid_argument("rmse: length mismatch");
  }
  if (pred.size() == 0) {
    throw std::invalid_argument("rmse: empty vectors");
  }
  return std::sqrt((pred - truth).squaredNorm() /
                   static_cast<double>(pred.size()));
}

}  // namespace acdt
