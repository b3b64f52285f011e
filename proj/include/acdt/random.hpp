#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace acdt {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Seeded random source. All distribution draws in this project are built on
// top of the raw 64-bit stream of std::mt19937_64, whose output sequence is
// fully specified by the standard, so a seed pins every downstream draw
// bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe under log().
  double uniform_pos() { return 1.0 - uniform(); }

  // Standard normal via Box-Muller. Two uniforms per draw, nothing cached.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Shape-rate parameterization throughout: mean = shape / rate.
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

// Marsaglia-Tsang squeeze; shapes below one are boosted through
// Gamma(shape) = Gamma(shape + 1) * U^(1/shape).
inline double sample_gamma(Rng& rng, GammaParams g) {
  if (!(g.shape > 0.0) || !std::isfinite(g.shape)) {
    throw std::invalid_argument("sample_gamma: shape must be positive");
  }
  if (!(g.rate > 0.0) || !std::isfinite(g.rate)) {
    throw std::invalid_argument("sample_gamma: rate must be positive");
  }
  double shape = g.shape;
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(rng.uniform_pos(), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return boost * d * v / g.rate;
    }
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return boost * d * v / g.rate;
    }
  }
}

inline double sample_beta(Rng& rng, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("sample_beta: parameters must be positive");
  }
  const double x = sample_gamma(rng, {a, 1.0});
  const double y = sample_gamma(rng, {b, 1.0});
  const double s = x + y;
  if (s <= 0.0) {
    return 0.5;  // both draws underflowed; only reachable for extreme params
  }
  return x / s;
}

inline double logpdf_normal(double y, double mean, double var) {
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw std::invalid_argument("logpdf_normal: variance must be positive");
  }
  const double d = y - mean;
  return -0.5 * (std::log(kTwoPi * var) + d * d / var);
}

// Index i drawn with probability weights[i] / sum(weights).
inline int sample_categorical(Rng& rng, const Eigen::VectorXd& weights) {
  if (weights.size() == 0) {
    throw std::invalid_argument("sample_categorical: empty weight vector");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument(
          "sample_categorical: weights must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw std::invalid_argument(
        "sample_categorical: at least one weight must be positive");
  }
  const double u = rng.uniform() * total;
  double cum = 0.0;
  int last_positive = 0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      last_positive = static_cast<int>(i);
    }
    cum += weights[i];
    if (u < cum) {
      return static_cast<int>(i);
    }
  }
  return last_positive;  // u landed on the accumulated rounding tail
}

// Draw from N(mean, cov + jitter*I). cov must be symmetric; a zero matrix
// short-circuits to the mean. The jitter ladder only engages when the plain
// Cholesky fails, and gives up once the jitter reaches 1e-6 of the mean
// diagonal scale.
inline Eigen::VectorXd sample_mvn(Rng& rng, const Eigen::VectorXd& mean,
                                  const Eigen::MatrixXd& cov) {
  const Eigen::Index k = mean.size();
  if (cov.rows() != k || cov.cols() != k) {
    throw std::invalid_argument("sample_mvn: dimension mismatch");
  }
  if (k == 0) {
    return mean;
  }
  const double max_abs = cov.cwiseAbs().maxCoeff();
  const double sym_tol = 1e-10 * std::max(1.0, max_abs);
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > sym_tol) {
    throw std::invalid_argument("sample_mvn: covariance is not symmetric");
  }
  if (max_abs == 0.0) {
    return mean;
  }
  const double scale = std::max(cov.trace() / static_cast<double>(k),
                                std::numeric_limits<double>::min());
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  double jitter = 0.0;
  if (llt.info() != Eigen::Success) {
    for (jitter = 1e-12 * scale; jitter <= 1e-6 * scale; jitter *= 10.0) {
      llt.compute(cov + jitter * Eigen::MatrixXd::Identity(k, k));
      if (llt.info() == Eigen::Success) {
        break;
      }
    }
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error(
          "sample_mvn: covariance is not positive semidefinite "
          "(Cholesky failed after maximum jitter)");
    }
  }
  Eigen::VectorXd z(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    z[i] = rng.normal();
  }
  return mean + llt.matrixL() * z;
}

}  // namespace acdt
