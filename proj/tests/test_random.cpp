#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "acdt/random.hpp"
#include "test_util.hpp"

using acdt::Rng;
using Catch::Approx;

TEST_CASE("same seed reproduces every sampler stream", "[random]") {
  Rng a(1234);
  Rng b(1234);
  for (int i = 0; i < 200; ++i) {
    REQUIRE(a.uniform() == b.uniform());
  }
  for (int i = 0; i < 200; ++i) {
    REQUIRE(a.normal() == b.normal());
    REQUIRE(acdt::sample_gamma(a, {2.5, 1.5}) == acdt::sample_gamma(b, {2.5, 1.5}));
    REQUIRE(acdt::sample_beta(a, 2.0, 3.0) == acdt::sample_beta(b, 2.0, 3.0));
  }
}

TEST_CASE("uniform moments", "[random]") {
  Rng rng(7);
  std::vector<double> xs(100000);
  for (double& x : xs) {
    x = rng.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  REQUIRE(test_util::mean_z_score(xs, 0.5, 1.0 / 12.0) < 4.0);
}

TEST_CASE("normal moments", "[random]") {
  Rng rng(8);
  std::vector<double> xs(100000);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = rng.normal();
    sq[i] = xs[i] * xs[i];
  }
  REQUIRE(test_util::mean_z_score(xs, 0.0, 1.0) < 4.0);
  // x^2 is chi-square(1): mean 1, variance 2
  REQUIRE(test_util::mean_z_score(sq, 1.0, 2.0) < 4.0);
}

TEST_CASE("gamma moments across shape regimes", "[random]") {
  struct Case {
    double shape;
    double rate;
  };
  const Case cases[] = {{0.5, 2.0}, {2.5, 1.5}, {50.0, 1.0}};
  std::uint64_t seed = 11;
  for (const Case& c : cases) {
    Rng rng(seed++);
    std::vector<double> xs(100000);
    for (double& x : xs) {
      x = acdt::sample_gamma(rng, {c.shape, c.rate});
      REQUIRE(x > 0.0);
    }
    const double mean = c.shape / c.rate;
    const double var = c.shape / (c.rate * c.rate);
    INFO("shape " << c.shape << " rate " << c.rate);
    REQUIRE(test_util::mean_z_score(xs, mean, var) < 4.0);
  }
}

TEST_CASE("gamma rejects nonpositive parameters", "[random]") {
  Rng rng(3);
  REQUIRE_THROWS_AS(acdt::sample_gamma(rng, {0.0, 1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(acdt::sample_gamma(rng, {1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("beta moments", "[random]") {
  Rng rng(21);
  const double a = 2.0;
  const double b = 5.0;
  std::vector<double> xs(100000);
  for (double& x : xs) {
    x = acdt::sample_beta(rng, a, b);
    REQUIRE(x >= 0.0);
    REQUIRE(x <= 1.0);
  }
  const double mean = a / (a + b);
  const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
  REQUIRE(test_util::mean_z_score(xs, mean, var) < 4.0);
}

TEST_CASE("categorical frequencies and scale invariance", "[random]") {
  Eigen::VectorXd w(3);
  w << 2.0, 1.0, 1.0;
  Rng rng(31);
  const int n = 100000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) {
    ++counts[static_cast<std::size_t>(acdt::sample_categorical(rng, w))];
  }
  const double probs[] = {0.5, 0.25, 0.25};
  for (int k = 0; k < 3; ++k) {
    const double se = std::sqrt(probs[k] * (1 - probs[k]) / n);
    REQUIRE(std::abs(counts[static_cast<std::size_t>(k)] / double(n) - probs[k]) <
            3.0 * se);
  }
  // chi-square goodness of fit, df=2, 1% critical value 9.21
  double chi2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double expected = probs[k] * n;
    const double diff = counts[static_cast<std::size_t>(k)] - expected;
    chi2 += diff * diff / expected;
  }
  REQUIRE(chi2 < 9.21);

  // scaling by a power of two leaves the draw sequence bit-identical
  Rng r1(77);
  Rng r2(77);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(acdt::sample_categorical(r1, w) == acdt::sample_categorical(r2, 4.0 * w));
  }
}

TEST_CASE("categorical rejects bad weights", "[random]") {
  Rng rng(5);
  Eigen::VectorXd neg(2);
  neg << 1.0, -0.5;
  REQUIRE_THROWS_AS(acdt::sample_categorical(rng, neg), std::invalid_argument);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  REQUIRE_THROWS_AS(acdt::sample_categorical(rng, zero), std::invalid_argument);
  Eigen::VectorXd inf(2);
  inf << 1.0, std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(acdt::sample_categorical(rng, inf), std::invalid_argument);
}

TEST_CASE("normal log density", "[random]") {
  REQUIRE(acdt::logpdf_normal(0.0, 0.0, 1.0) ==
          Approx(-0.9189385332046727).epsilon(1e-12));
  REQUIRE(acdt::logpdf_normal(3.5, 3.5, 0.7) ==
          Approx(-0.5 * std::log(2 * M_PI * 0.7)).epsilon(1e-12));
  REQUIRE(acdt::logpdf_normal(0.0, 0.0, 2.0) ==
          Approx(-0.5 * std::log(4 * M_PI)).epsilon(1e-12));
  REQUIRE_THROWS_AS(acdt::logpdf_normal(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("multivariate normal moments and degenerate cases", "[random]") {
  Eigen::VectorXd mean(2);
  mean << 1.0, -2.0;
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  Rng rng(41);
  const int n = 100000;
  Eigen::MatrixXd draws(n, 2);
  for (int i = 0; i < n; ++i) {
    draws.row(i) = acdt::sample_mvn(rng, mean, cov).transpose();
  }
  const Eigen::RowVectorXd emp_mean = draws.colwise().mean();
  for (int j = 0; j < 2; ++j) {
    const double se = std::sqrt(cov(j, j) / n);
    REQUIRE(std::abs(emp_mean[j] - mean[j]) < 4.0 * se);
  }
  Eigen::MatrixXd centered = draws.rowwise() - emp_mean;
  const Eigen::MatrixXd emp_cov = centered.transpose() * centered / double(n);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double se =
          std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / n);
      REQUIRE(std::abs(emp_cov(i, j) - cov(i, j)) < 4.0 * se);
    }
  }

  // zero covariance collapses to the mean exactly
  const Eigen::VectorXd fixed =
      acdt::sample_mvn(rng, mean, Eigen::MatrixXd::Zero(2, 2));
  REQUIRE((fixed - mean).norm() == 0.0);

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  REQUIRE_THROWS_AS(acdt::sample_mvn(rng, mean, asym), std::invalid_argument);
  REQUIRE_THROWS_AS(acdt::sample_mvn(rng, Eigen::VectorXd::Zero(3), cov),
                    std::invalid_argument);
}
