#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "acdt/dataset.hpp"
#include "acdt/random.hpp"

namespace acdt {

// Planted-domain generator: domain k draws features N(means[k], feature_std^2 I)
// and responses y = (1, x)'atoms[k] + N(0, noise_std^2). Atoms carry the
// intercept coefficient first.
struct SynthSpec {
  std::vector<int> sizes;
  std::vector<Eigen::VectorXd> atoms;
  std::vector<Eigen::VectorXd> means;  // empty means all-zero centers
  double feature_std = 1.0;
  double noise_std = 0.1;

  Eigen::Index p() const {
    return atoms.empty() ? 0 : atoms.front().size() - 1;
  }

  void validate() const {
    if (sizes.empty() || sizes.size() != atoms.size()) {
      throw std::invalid_argument("synth spec: need one atom per domain");
    }
    for (int s : sizes) {
      if (s < 1) {
        throw std::invalid_argument("synth spec: domain sizes must be >= 1");
      }
    }
    const Eigen::Index dim = atoms.front().size();
    if (dim < 2) {
      throw std::invalid_argument("synth spec: atoms need intercept plus >= 1 feature");
    }
    for (const Eigen::VectorXd& a : atoms) {
      if (a.size() != dim) {
        throw std::invalid_argument("synth spec: atoms must share one length");
      }
    }
    if (!means.empty()) {
      if (means.size() != sizes.size()) {
        throw std::invalid_argument("synth spec: need one center per domain");
      }
      for (const Eigen::VectorXd& c : means) {
        if (c.size() != dim - 1) {
          throw std::invalid_argument("synth spec: centers must have length p");
        }
      }
    }
    if (!(feature_std > 0.0) || !(noise_std >= 0.0)) {
      throw std::invalid_argument("synth spec: need feature_std > 0 and noise_std >= 0");
    }
  }
};

struct SynthData {
  Eigen::MatrixXd X;        // n x p, rows grouped by domain
  Eigen::VectorXd y;
  std::vector<int> labels;  // 1-based planted domain per row
};

inline SynthData generate_synth(Rng& rng, const SynthSpec& spec) {
  spec.validate();
  const Eigen::Index p = spec.p();
  Eigen::Index n = 0;
  for (int s : spec.sizes) {
    n += s;
  }
  SynthData data;
  data.X.resize(n, p);
  data.y.resize(n);
  data.labels.reserve(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < spec.sizes.size(); ++k) {
    const Eigen::VectorXd center =
        spec.means.empty() ? Eigen::VectorXd::Zero(p) : spec.means[k];
    const Eigen::VectorXd& atom = spec.atoms[k];
    for (int i = 0; i < spec.sizes[k]; ++i, ++row) {
      for (Eigen::Index j = 0; j < p; ++j) {
        data.X(row, j) = center[j] + spec.feature_std * rng.normal();
      }
      double mean = atom[0] + data.X.row(row) * atom.tail(p);
      data.y[row] = mean + spec.noise_std * rng.normal();
      data.labels.push_back(static_cast<int>(k) + 1);
    }
  }
  return data;
}

inline Dataset to_dataset(const SynthData& data, Role role = Role::train) {
  Dataset d;
  d.features = data.X;
  d.response = data.y;
  d.role = role;
  for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
    d.names.push_back("x" + std::to_string(j + 1));
  }
  validate_dataset(d);
  return d;
}

}  // namespace acdt
