#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "acdt/random.hpp"
#include "acdt/ridge.hpp"
#include "test_util.hpp"

using acdt::Rng;
using Catch::Approx;

namespace {

// independent oracle: solve the full (intercept-augmented) normal equations
// [1 Z]'[1 Z] + diag(0, lambda I) with a rank-revealing LU, no centering trick
std::pair<Eigen::VectorXd, double> normal_equations_oracle(
    const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index n = Z.rows();
  const Eigen::Index q = Z.cols();
  Eigen::MatrixXd M(n, q + 1);
  M.col(0).setOnes();
  M.rightCols(q) = Z;
  Eigen::MatrixXd G = M.transpose() * M;
  G.bottomRightCorner(q, q).diagonal().array() += lambda;
  const Eigen::VectorXd sol = G.fullPivLu().solve(M.transpose() * y);
  return {sol.tail(q), sol[0]};
}

}  // namespace

TEST_CASE("unpenalized fit interpolates a perfect line", "[ridge]") {
  Eigen::MatrixXd Z(2, 1);
  Z << 1, 2;
  Eigen::VectorXd y(2);
  y << 1, 2;
  const acdt::RidgeModel m = acdt::fit_ridge(Z, y, 0.0);
  REQUIRE(m.weights[0] == Approx(1.0).margin(1e-12));
  REQUIRE(m.intercept == Approx(0.0).margin(1e-12));
  REQUIRE((acdt::predict(m, Z) - y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-point fit with unit penalty", "[ridge]") {
  Eigen::MatrixXd Z(2, 1);
  Z << 0, 1;
  Eigen::VectorXd y(2);
  y << 0, 1;
  const auto [w_oracle, b_oracle] = normal_equations_oracle(Z, y, 1.0);
  const acdt::RidgeModel m = acdt::fit_ridge(Z, y, 1.0);
  REQUIRE(m.weights[0] == Approx(w_oracle[0]).margin(1e-12));
  REQUIRE(m.intercept == Approx(b_oracle).margin(1e-12));
  // oracle-confirmed closed form for this configuration
  REQUIRE(m.weights[0] == Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(m.intercept == Approx(1.0 / 3.0).margin(1e-12));
}

TEST_CASE("fit matches the normal-equations oracle on random problems", "[ridge]") {
  Rng rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index n = 12;
    const Eigen::Index q = 3;
    Eigen::MatrixXd Z(n, q);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < q; ++j) {
        Z(i, j) = rng.normal();
      }
      y[i] = rng.normal();
    }
    const double lambda = 0.05 + rng.uniform() * 5.0;
    const auto [w_oracle, b_oracle] = normal_equations_oracle(Z, y, lambda);
    const acdt::RidgeModel m = acdt::fit_ridge(Z, y, lambda);
    REQUIRE((m.weights - w_oracle).cwiseAbs().maxCoeff() < 1e-9);
    REQUIRE(m.intercept == Approx(b_oracle).margin(1e-9));

    // stationarity: Z'(y - Zw - b) = lambda w, and residuals sum to zero
    const Eigen::VectorXd resid =
        y - Z * m.weights - Eigen::VectorXd::Constant(n, m.intercept);
    REQUIRE((Z.transpose() * resid - lambda * m.weights).cwiseAbs().maxCoeff() <
            1e-8);
    REQUIRE(std::abs(resid.sum()) < 1e-8);
  }
}

TEST_CASE("heavy penalty shrinks weights to zero and keeps the mean", "[ridge]") {
  Eigen::MatrixXd Z(4, 2);
  Z << 1, -2, 0, 1, 3, 0, -1, 2;
  Eigen::VectorXd y(4);
  y << 2, 0, 1, 5;
  const acdt::RidgeModel m = acdt::fit_ridge(Z, y, 1e12);
  REQUIRE(m.weights.cwiseAbs().maxCoeff() < 1e-9);
  REQUIRE(m.intercept == Approx(y.mean()).margin(1e-6));
}

TEST_CASE("training error is monotone in the penalty", "[ridge]") {
  Rng rng(22);
  Eigen::MatrixXd Z(15, 3);
  Eigen::VectorXd y(15);
  for (Eigen::Index i = 0; i < 15; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      Z(i, j) = rng.normal();
    }
    y[i] = Z(i, 0) - 0.5 * Z(i, 2) + 0.2 * rng.normal();
  }
  double prev = -1.0;
  for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const acdt::RidgeModel m = acdt::fit_ridge(Z, y, lambda);
    const double err = acdt::rmse(acdt::predict(m, Z), y);
    REQUIRE(err >= prev - 1e-12);
    prev = err;
  }
}

TEST_CASE("unpenalized fit rejects singular designs", "[ridge]") {
  Eigen::MatrixXd Z(3, 2);
  Z << 1, 2, 1, 2, 1, 2;  // second column is a multiple of the first
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  REQUIRE_THROWS_AS(acdt::fit_ridge(Z, y, 0.0), std::runtime_error);
  // any positive penalty restores solvability
  REQUIRE_NOTHROW(acdt::fit_ridge(Z, y, 1e-6));
}

TEST_CASE("fit validates inputs", "[ridge]") {
  Eigen::MatrixXd Z(2, 1);
  Z << 0, 1;
  Eigen::VectorXd y(2);
  y << 0, 1;
  REQUIRE_THROWS_AS(acdt::fit_ridge(Z, Eigen::VectorXd(3), 1.0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(acdt::fit_ridge(Z, y, -1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(acdt::fit_ridge(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), 1.0),
                    std::invalid_argument);
  Eigen::VectorXd bad = y;
  bad[0] = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(acdt::fit_ridge(Z, bad, 1.0), std::invalid_argument);
}

TEST_CASE("predict validates the feature count", "[ridge]") {
  acdt::RidgeModel m;
  m.weights = Eigen::VectorXd::Ones(2);
  m.intercept = 0.5;
  Eigen::MatrixXd Z(1, 2);
  Z << 1, 2;
  REQUIRE(acdt::predict(m, Z)[0] == Approx(3.5));
  REQUIRE_THROWS_AS(acdt::predict(m, Eigen::MatrixXd(1, 3)),
                    std::invalid_argument);
}

TEST_CASE("rmse on hand values", "[ridge]") {
  Eigen::VectorXd a(2), b(2);
  a << 0, 0;
  b << -1, 1;
  REQUIRE(acdt::rmse(a, b) == Approx(1.0).margin(1e-15));
  b << 3, 4;
  REQUIRE(acdt::rmse(a, b) == Approx(std::sqrt(12.5)).margin(1e-12));
  REQUIRE(acdt::rmse(b, b) == 0.0);
  REQUIRE_THROWS_AS(acdt::rmse(a, Eigen::VectorXd(3)), std::invalid_argument);
  REQUIRE_THROWS_AS(acdt::rmse(Eigen::VectorXd(0), Eigen::VectorXd(0)),
                    std::invalid_argument);
}
