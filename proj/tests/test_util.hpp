#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "acdt/random.hpp"

namespace test_util {

// Adjusted Rand index between two labelings of the same instances. Label
// values are arbitrary; only the induced partitions matter.
inline double adjusted_rand_index(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, long> joint;
  std::map<int, long> count_a;
  std::map<int, long> count_b;
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[{a[i], b[i]}];
    ++count_a[a[i]];
    ++count_b[b[i]];
  }
  auto choose2 = [](long c) { return 0.5 * static_cast<double>(c) * (c - 1); };
  double sum_joint = 0.0;
  for (const auto& kv : joint) {
    sum_joint += choose2(kv.second);
  }
  double sum_a = 0.0;
  for (const auto& kv : count_a) {
    sum_a += choose2(kv.second);
  }
  double sum_b = 0.0;
  for (const auto& kv : count_b) {
    sum_b += choose2(kv.second);
  }
  const double total = choose2(static_cast<long>(n));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) {
    return 1.0;  // both partitions trivial
  }
  return (sum_joint - expected) / (max_index - expected);
}

inline Eigen::MatrixXd random_spd(acdt::Rng& rng, Eigen::Index n,
                                  double ridge = 0.5) {
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      M(i, j) = rng.normal();
    }
  }
  Eigen::MatrixXd A = M * M.transpose();
  A.diagonal().array() += ridge;
  return 0.5 * (A + A.transpose());
}

inline double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) {
    s += x;
  }
  return s / static_cast<double>(xs.size());
}

inline double sample_var(const std::vector<double>& xs) {
  const double mean = sample_mean(xs);
  double s = 0.0;
  for (double x : xs) {
    s += (x - mean) * (x - mean);
  }
  return s / static_cast<double>(xs.size());
}

// |empirical mean - true mean| measured in Monte-Carlo standard errors.
inline double mean_z_score(const std::vector<double>& xs, double true_mean,
                           double true_var) {
  const double se = std::sqrt(true_var / static_cast<double>(xs.size()));
  return std::abs(sample_mean(xs) - true_mean) / se;
}

}  // namespace test_util
