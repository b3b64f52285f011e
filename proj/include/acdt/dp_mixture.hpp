#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "acdt/random.hpp"

namespace acdt {

// Priors of the mixture-of-regressions model: Gamma(shape, rate) on the
// residual precision and on the concentration, per-coordinate Gamma on the
// coefficient-scale precisions.
struct Hyperparams {
  double a0 = 50.0;
  double b0 = 1.0;
  double av = 1.0;
  double bv = 1.0;
  Eigen::VectorXd a_vec;
  Eigen::VectorXd b_vec;

  static Hyperparams defaults(Eigen::Index dim) {
    Hyperparams hp;
    hp.a_vec = Eigen::VectorXd::Ones(dim);
    hp.b_vec = Eigen::VectorXd::Ones(dim);
    return hp;
  }

  void validate(Eigen::Index dim) const {
    if (!(a0 > 0.0) || !(b0 > 0.0) || !(av > 0.0) || !(bv > 0.0)) {
      throw std::invalid_argument("hyperparams: a0, b0, av, bv must be positive");
    }
    if (a_vec.size() != dim || b_vec.size() != dim) {
      throw std::invalid_argument("hyperparams: scale-prior vectors must have length " +
                                  std::to_string(dim));
    }
    if ((a_vec.array() <= 0.0).any() || (b_vec.array() <= 0.0).any()) {
      throw std::invalid_argument("hyperparams: scale-prior entries must be positive");
    }
  }
};

enum class PartitionRule { last_sweep, modal };

struct GibbsConfig {
  int sweeps = 500;
  int burn_in = 250;
  std::uint64_t seed = 0;
  PartitionRule partition_rule = PartitionRule::last_sweep;

  void validate() const {
    if (sweeps < 1) {
      throw std::invalid_argument("gibbs config: sweeps must be >= 1");
    }
    if (burn_in < 0 || burn_in >= sweeps) {
      throw std::invalid_argument("gibbs config: need 0 <= burn_in < sweeps");
    }
  }
};

// Mutable chain state. Labels are 0-based internally; atoms[k] is the
// coefficient vector shared by cluster k.
struct DPState {
  std::vector<int> z;
  std::vector<Eigen::VectorXd> atoms;
  std::vector<int> counts;
  double sigma = 1.0;
  Eigen::VectorXd lambda;
  double nu = 1.0;

  int m() const { return static_cast<int>(atoms.size()); }

  void check(std::size_t n) const {
    if (z.size() != n) {
      throw std::runtime_error("dp state: label count mismatch");
    }
    if (atoms.size() != counts.size()) {
      throw std::runtime_error("dp state: atom/count length mismatch");
    }
    long total = 0;
    for (int c : counts) {
      if (c < 1) {
        throw std::runtime_error("dp state: empty cluster survived");
      }
      total += c;
    }
    if (total != static_cast<long>(n)) {
      throw std::runtime_error("dp state: counts do not sum to n");
    }
    for (int label : z) {
      if (label < 0 || label >= m()) {
        throw std::runtime_error("dp state: label out of range");
      }
    }
    if (!(sigma > 0.0) || !(nu > 0.0) || (lambda.array() <= 0.0).any()) {
      throw std::runtime_error("dp state: nonpositive sigma, nu, or lambda");
    }
  }
};

// Marginal weight of opening a new cluster for (x, y): the coefficient is
// integrated out of N(y | x'A, sigma) N(A | 0, sigma*diag(lambda)), leaving
// nu * N(y | 0, (x'diag(lambda)x + 1) * sigma).
inline double q0_marginal(const Eigen::VectorXd& x, double y, double sigma,
                          const Eigen::VectorXd& lambda, double nu) {
  const double var = (x.array().square() * lambda.array()).sum() + 1.0;
  return nu * std::exp(logpdf_normal(y, 0.0, var * sigma));
}

// Log Polya-urn weights for one instance, computed with the instance already
// removed from the state: entry k < m is log(n_k) + log N(y | x'Q_k, sigma);
// the last entry is log q0.
inline Eigen::VectorXd assignment_log_weights(const Eigen::VectorXd& x, double y,
                                              const DPState& state) {
  const int m = state.m();
  Eigen::VectorXd logw(m + 1);
  for (int k = 0; k < m; ++k) {
    logw[k] = std::log(static_cast<double>(state.counts[static_cast<std::size_t>(k)])) +
              logpdf_normal(y, x.dot(state.atoms[static_cast<std::size_t>(k)]), state.sigma);
  }
  logw[m] = std::log(q0_marginal(x, y, state.sigma, state.lambda, state.nu));
  return logw;
}

namespace detail {

// Drop instance i from its cluster; a cluster left empty is deleted and all
// higher labels slide down one.
inline void remove_instance(DPState& state, std::size_t i) {
  const int k = state.z[i];
  auto ks = static_cast<std::size_t>(k);
  if (--state.counts[ks] == 0) {
    state.counts.erase(state.counts.begin() + k);
    state.atoms.erase(state.atoms.begin() + k);
    for (int& label : state.z) {
      if (label > k) {
        --label;
      }
    }
  }
  state.z[i] = -1;
}

inline Eigen::MatrixXd invert_spd(const Eigen::MatrixXd& prec,
                                  const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error(std::string(what) + ": precision matrix is not positive definite");
  }
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(prec.rows(), prec.cols()));
  // kill round-off asymmetry so downstream symmetry checks hold
  return 0.5 * (cov + cov.transpose());
}

}  // namespace detail

// One collapsed-Gibbs reassignment of instance i. A fresh cluster draws its
// atom from N(C x y, C*sigma) with C = (diag(lambda)^{-1} + x x')^{-1}.
inline void sample_assignment(Rng& rng, std::size_t i, DPState& state,
                              const Eigen::VectorXd& x, double y) {
  detail::remove_instance(state, i);
  const int m = state.m();
  int pick;
  if (m == 0) {
    pick = 0;  // forced: a lone instance always opens a cluster
  } else {
    Eigen::VectorXd logw = assignment_log_weights(x, y, state);
    const double top = logw.maxCoeff();
    Eigen::VectorXd w = (logw.array() - top).exp();
    pick = static_cast<int>(sample_categorical(rng, w));
  }
  if (pick == m) {
    Eigen::MatrixXd prec = x * x.transpose();
    prec.diagonal() += state.lambda.cwiseInverse();
    const Eigen::MatrixXd c = detail::invert_spd(prec, "sample_assignment");
    state.atoms.push_back(sample_mvn(rng, c * x * y, state.sigma * c));
    state.counts.push_back(1);
  } else {
    ++state.counts[static_cast<std::size_t>(pick)];
  }
  state.z[i] = pick;
}

// Conjugate refresh of every atom: Q_k ~ N(T X_k'Y_k, T*sigma) with
// T = (diag(lambda)^{-1} + X_k'X_k)^{-1}, members taken in ascending order.
inline void resample_atoms(Rng& rng, DPState& state, const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& Y) {
  const Eigen::Index d = X.cols();
  for (int k = 0; k < state.m(); ++k) {
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(d, d);
    Eigen::VectorXd xty = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < state.z.size(); ++i) {
      if (state.z[i] != k) {
        continue;
      }
      const auto row = X.row(static_cast<Eigen::Index>(i));
      xtx.noalias() += row.transpose() * row;
      xty.noalias() += row.transpose() * Y[static_cast<Eigen::Index>(i)];
    }
    Eigen::MatrixXd prec = xtx;
    prec.diagonal() += state.lambda.cwiseInverse();
    const Eigen::MatrixXd theta = detail::invert_spd(prec, "resample_atoms");
    state.atoms[static_cast<std::size_t>(k)] =
        sample_mvn(rng, theta * xty, state.sigma * theta);
  }
}

// sigma^{-1} ~ Ga(a0 + n/2, b0 + sum(r_i^2)/2) with r_i = y_i - x_i'Q_{z_i}.
inline void update_sigma(Rng& rng, DPState& state, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& Y, const Hyperparams& hp) {
  double ss = 0.0;
  for (std::size_t i = 0; i < state.z.size(); ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    const double r = Y[ei] - X.row(ei).dot(state.atoms[static_cast<std::size_t>(state.z[i])]);
    ss += r * r;
  }
  const double n = static_cast<double>(state.z.size());
  state.sigma = 1.0 / sample_gamma(rng, {hp.a0 + 0.5 * n, hp.b0 + 0.5 * ss});
}

// lambda_j^{-1} ~ Ga((a_j + m)/2, (b_j + sum_k Q_k[j]^2 / sigma)/2),
// independently per coordinate.
inline void update_lambda(Rng& rng, DPState& state, const Hyperparams& hp) {
  const Eigen::Index d = state.lambda.size();
  const double m = static_cast<double>(state.m());
  for (Eigen::Index j = 0; j < d; ++j) {
    double ss = 0.0;
    for (const Eigen::VectorXd& q : state.atoms) {
      ss += q[j] * q[j];
    }
    const double shape = 0.5 * (hp.a_vec[j] + m);
    const double rate = 0.5 * (hp.b_vec[j] + ss / state.sigma);
    state.lambda[j] = 1.0 / sample_gamma(rng, {shape, rate});
  }
}

// Probability of the larger-shape component in the concentration update.
inline double nu_mixture_weight(double nu, int m, double av, double bv,
                                std::size_t n, double h) {
  return (nu + m - 1.0) /
         (av + m - 1.0 + static_cast<double>(n) * (bv - std::log(h)));
}

// Auxiliary-variable refresh of the concentration: h ~ Beta(nu+1, n), then nu
// from Ga(av+m, bv-log h) with probability pi0, else Ga(av+m-1, bv-log h).
inline void update_nu(Rng& rng, DPState& state, const Hyperparams& hp,
                      std::size_t n) {
  double h = sample_beta(rng, state.nu + 1.0, static_cast<double>(n));
  h = std::max(h, 1e-300);  // log h must stay finite
  const double rate = hp.bv - std::log(h);
  const double pi0 = nu_mixture_weight(state.nu, state.m(), hp.av, hp.bv, n, h);
  const double shape =
      (rng.uniform() < pi0) ? hp.av + state.m() : hp.av + state.m() - 1.0;
  state.nu = sample_gamma(rng, {shape, rate});
}

struct TraceRow {
  int sweep = 0;
  int m = 0;
  double sigma = 0.0;
  double nu = 0.0;
};

struct GibbsResult {
  std::vector<int> partition;  // 1-based labels, 1..m by first appearance
  std::vector<Eigen::VectorXd> atoms;
  double sigma = 0.0;
  double nu = 0.0;
  std::vector<TraceRow> trace;
};

namespace detail {

// Relabel clusters in order of first appearance and permute atoms to match.
// Returned labels are 1-based.
inline std::pair<std::vector<int>, std::vector<Eigen::VectorXd>> canonicalize(
    const std::vector<int>& z, const std::vector<Eigen::VectorXd>& atoms) {
  std::vector<int> relabel(atoms.size(), -1);
  std::vector<int> out(z.size());
  std::vector<Eigen::VectorXd> atoms_out;
  atoms_out.reserve(atoms.size());
  int next = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto k = static_cast<std::size_t>(z[i]);
    if (relabel[k] < 0) {
      relabel[k] = next++;
      atoms_out.push_back(atoms[k]);
    }
    out[i] = relabel[k] + 1;
  }
  return {std::move(out), std::move(atoms_out)};
}

}  // namespace detail

// Full chain: per sweep, reassign every instance, then refresh atoms, sigma,
// lambda, nu, in that order. X must already carry its intercept column.
inline GibbsResult run_gibbs(Rng& rng, const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& Y, const Hyperparams& hp,
                             const GibbsConfig& cfg) {
  const auto n = static_cast<std::size_t>(X.rows());
  if (n < 1) {
    throw std::invalid_argument("run_gibbs: empty design matrix");
  }
  if (Y.size() != X.rows()) {
    throw std::invalid_argument("run_gibbs: response length mismatch");
  }
  if (!X.allFinite() || !Y.allFinite()) {
    throw std::invalid_argument("run_gibbs: non-finite input");
  }
  cfg.validate();
  hp.validate(X.cols());

  DPState state;
  state.z.assign(n, 0);
  state.counts = {static_cast<int>(n)};
  state.lambda = Eigen::VectorXd::Ones(X.cols());
  const double yvar = (Y.array() - Y.mean()).square().mean();
  state.sigma = yvar > 1e-12 ? yvar : 1.0;
  state.nu = 1.0;
  state.atoms.resize(1, Eigen::VectorXd::Zero(X.cols()));
  resample_atoms(rng, state, X, Y);

  struct ModalEntry {
    int count = 0;
    int first_seen = 0;
    std::vector<Eigen::VectorXd> atoms;
    double sigma = 0.0;
    double nu = 0.0;
  };
  std::map<std::vector<int>, ModalEntry> modal;

  GibbsResult result;
  result.trace.reserve(static_cast<std::size_t>(cfg.sweeps));
  for (int sweep = 1; sweep <= cfg.sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      sample_assignment(rng, i, state, X.row(static_cast<Eigen::Index>(i)).transpose(),
                        Y[static_cast<Eigen::Index>(i)]);
    }
    resample_atoms(rng, state, X, Y);
    update_sigma(rng, state, X, Y, hp);
    update_lambda(rng, state, hp);
    update_nu(rng, state, hp, n);
    result.trace.push_back({sweep, state.m(), state.sigma, state.nu});
    state.check(n);

    if (cfg.partition_rule == PartitionRule::modal && sweep > cfg.burn_in) {
      auto [labels, atoms] = detail::canonicalize(state.z, state.atoms);
      ModalEntry& entry = modal[labels];
      if (entry.count == 0) {
        entry.first_seen = sweep;
      }
      ++entry.count;
      entry.atoms = std::move(atoms);  // keep the latest occurrence's atoms
      entry.sigma = state.sigma;
      entry.nu = state.nu;
    }
  }

  if (cfg.partition_rule == PartitionRule::modal) {
    const std::pair<const std::vector<int>, ModalEntry>* best = nullptr;
    for (const auto& kv : modal) {
      if (!best || kv.second.count > best->second.count ||
          (kv.second.count == best->second.count &&
           kv.second.first_seen < best->second.first_seen)) {
        best = &kv;
      }
    }
    result.partition = best->first;
    result.atoms = best->second.atoms;
    result.sigma = best->second.sigma;
    result.nu = best->second.nu;
  } else {
    auto [labels, atoms] = detail::canonicalize(state.z, state.atoms);
    result.partition = std::move(labels);
    result.atoms = std::move(atoms);
    result.sigma = state.sigma;
    result.nu = state.nu;
  }
  return result;
}

// Optional post-processor: clusters smaller than floor hand their members to
// the nearest surviving atom (Euclidean on coefficients). Labels stay 1-based
// and compact. No-op when every cluster is small or floor < 2.
inline void merge_tiny_clusters(std::vector<int>& partition,
                                std::vector<Eigen::VectorXd>& atoms,
                                int floor) {
  if (floor < 2 || atoms.size() < 2) {
    return;
  }
  const int m = static_cast<int>(atoms.size());
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  for (int label : partition) {
    if (label < 1 || label > m) {
      throw std::invalid_argument("merge_tiny_clusters: label outside 1..m");
    }
    ++counts[static_cast<std::size_t>(label - 1)];
  }
  std::vector<int> keep;
  for (int k = 0; k < m; ++k) {
    if (counts[static_cast<std::size_t>(k)] >= floor) {
      keep.push_back(k);
    }
  }
  if (keep.empty() || keep.size() == static_cast<std::size_t>(m)) {
    return;
  }
  std::vector<int> target(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    int best = keep.front();
    double best_dist = (atoms[static_cast<std::size_t>(k)] -
                        atoms[static_cast<std::size_t>(best)]).squaredNorm();
    for (int cand : keep) {
      const double dist = (atoms[static_cast<std::size_t>(k)] -
                           atoms[static_cast<std::size_t>(cand)]).squaredNorm();
      if (dist < best_dist) {
        best = cand;
        best_dist = dist;
      }
    }
    target[static_cast<std::size_t>(k)] =
        counts[static_cast<std::size_t>(k)] >= floor ? k : best;
  }
  std::vector<int> relabel(static_cast<std::size_t>(m), -1);
  std::vector<Eigen::VectorXd> atoms_out;
  for (int& label : partition) {
    const int merged = target[static_cast<std::size_t>(label - 1)];
    auto ms = static_cast<std::size_t>(merged);
    if (relabel[ms] < 0) {
      relabel[ms] = static_cast<int>(atoms_out.size());
      atoms_out.push_back(atoms[ms]);
    }
    label = relabel[ms] + 1;
  }
  atoms = std::move(atoms_out);
}

}  // namespace acdt
