#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "acdt/dataset.hpp"
#include "acdt/dp_mixture.hpp"
#include "acdt/random.hpp"
#include "acdt/ridge.hpp"
#include "acdt/transfer.hpp"

namespace acdt {

// Everything one end-to-end run needs, with defaults matching the CLI.
struct RunConfig {
  std::string train_path;
  std::string test_path;
  std::string response;
  std::string name = "dataset";

  TransferConfig transfer;
  GibbsConfig gibbs;

  double a0 = 50.0;
  double b0 = 1.0;
  double av = 1.0;
  double bv = 1.0;
  double ai = 1.0;
  double bi = 1.0;

  double ridge_lambda = 1e-3;
  double split = 0.7;
  std::uint64_t split_seed = 1;
  int merge_floor = 0;  // 0 disables tiny-cluster merging

  Hyperparams hyperparams(Eigen::Index dim) const {
    Hyperparams hp;
    hp.a0 = a0;
    hp.b0 = b0;
    hp.av = av;
    hp.bv = bv;
    hp.a_vec = Eigen::VectorXd::Constant(dim, ai);
    hp.b_vec = Eigen::VectorXd::Constant(dim, bi);
    return hp;
  }

  void validate() const {
    if (!(ridge_lambda >= 0.0)) {
      throw std::invalid_argument("run config: ridge_lambda must be >= 0");
    }
    if (!(split > 0.0) || !(split < 1.0)) {
      throw std::invalid_argument("run config: split must lie in (0, 1)");
    }
    if (merge_floor < 0) {
      throw std::invalid_argument("run config: merge_floor must be >= 0");
    }
    for (double h : {a0, b0, av, bv, ai, bi}) {
      if (!(h > 0.0)) {
        throw std::invalid_argument("run config: prior hyperparameters must be > 0");
      }
    }
    gibbs.validate();
  }
};

namespace detail {

template <typename F>
auto stage_guard(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("stage " + std::string(stage) + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error("stage " + std::string(stage) + ": " + e.what());
  }
}

}  // namespace detail

// Latent-domain mining operates on standardized features with an intercept
// column prepended, against the z-scored response.
inline GibbsResult mine_domains(const Dataset& train, const RunConfig& cfg) {
  return detail::stage_guard("mine", [&] {
    validate_dataset(train);
    if (!train.response) {
      throw std::invalid_argument("training response required");
    }
    const Scaler scaler = fit_scaler(train, /*warn=*/false);
    const Dataset std_train = apply_scaler(scaler, train);
    Eigen::MatrixXd X(train.n(), train.p() + 1);
    X.col(0).setOnes();
    X.rightCols(train.p()) = std_train.features;
    const Eigen::VectorXd y = *std_train.response;
    Rng rng(cfg.gibbs.seed);
    GibbsResult result = run_gibbs(rng, X, y, cfg.hyperparams(train.p() + 1), cfg.gibbs);
    if (cfg.merge_floor >= 2) {
      merge_tiny_clusters(result.partition, result.atoms, cfg.merge_floor);
    }
    return result;
  });
}

struct PipelineResult {
  Eigen::VectorXd pred_z;    // predictions on the z-scored response scale
  Eigen::VectorXd pred_raw;  // same predictions on the original scale
  std::optional<double> rmse_z;

  Scaler scaler;
  std::vector<int> partition;     // 1-based latent-domain labels, train order
  std::vector<int> domain_sizes;  // latent sizes then target size
  std::vector<Eigen::VectorXd> atoms;
  AffineMap map;
  Eigen::VectorXd eigvals;
  double jitter_used = 0.0;
  RidgeModel ridge;
};

// Adapt + fit + predict for a fixed latent-domain partition. jitter_abs pins
// the absolute diagonal shift of the constraint matrix (reduction tests).
inline PipelineResult fit_from_partition(
    const RunConfig& cfg, const Dataset& train, const Dataset& test,
    const std::vector<int>& partition,
    std::vector<Eigen::VectorXd> atoms = {},
    std::optional<double> jitter_abs = std::nullopt) {
  cfg.validate();
  PipelineResult out;
  out.partition = partition;
  out.atoms = std::move(atoms);

  JointStack stack;
  TransferSolution sol;
  detail::stage_guard("adapt", [&] {
    out.scaler = fit_scaler(train, /*warn=*/false);
    stack = build_joint_stack(train, test, partition, cfg.transfer.alpha);
    const Eigen::Index N = stack.D.cols();
    std::vector<int> nonempty;
    for (int s : stack.domain_sizes) {
      if (s > 0) {
        nonempty.push_back(s);
      }
    }
    // A lone nonempty domain leaves nothing to align: S degenerates to zero.
    const Eigen::MatrixXd S = nonempty.size() >= 2
        ? build_S(nonempty)
        : Eigen::MatrixXd::Zero(N, N);
    Eigen::MatrixXd L;
    if (cfg.transfer.tau > 0.0) {
      L = build_laplacian(build_knn_graph(stack.D, cfg.transfer.knn));
    }
    const Eigen::MatrixXd H = build_H(N);
    const Eigen::MatrixXd J = build_J(train.p(), cfg.transfer.beta);
    std::vector<std::string> semantics = train.names;
    semantics.push_back("response");
    sol = solve_transfer(stack.D, S, L, H, J, cfg.transfer,
                         std::move(semantics), jitter_abs);
    out.domain_sizes = stack.domain_sizes;
    out.map = sol.map;
    out.eigvals = sol.eigvals;
    out.jitter_used = sol.jitter_used;
    return 0;
  });

  const Eigen::Index n_train = train.n();
  const Eigen::Index n_test = stack.D.cols() - n_train;
  const Eigen::Index p = train.p();
  const double y_mean = out.scaler.means[p];
  const double y_std = out.scaler.stds[p];

  detail::stage_guard("fit", [&] {
    const Eigen::MatrixXd Z_train =
        transform(out.map, stack.D.leftCols(n_train)).transpose();
    Eigen::VectorXd y_z(n_train);
    for (Eigen::Index c = 0; c < n_train; ++c) {
      const int orig = stack.order[static_cast<std::size_t>(c)];
      y_z[c] = ((*train.response)[orig] - y_mean) / y_std;
    }
    out.ridge = fit_ridge(Z_train, y_z, cfg.ridge_lambda);
    return 0;
  });

  detail::stage_guard("predict", [&] {
    if (n_test > 0) {
      const Eigen::MatrixXd Z_test =
          transform(out.map, stack.D.rightCols(n_test)).transpose();
      out.pred_z = predict(out.ridge, Z_test);
      out.pred_raw = (out.pred_z.array() * y_std + y_mean).matrix();
      if (test.response) {
        const Eigen::VectorXd truth_z =
            ((test.response->array() - y_mean) / y_std).matrix();
        out.rmse_z = rmse(out.pred_z, truth_z);
      }
    }
    return 0;
  });
  return out;
}

// Full run: mine latent domains, align them with the target, fit ridge in the
// learned space, predict the target block.
inline PipelineResult run_pipeline(const RunConfig& cfg, const Dataset& train,
                                   const Dataset& test) {
  cfg.validate();
  GibbsResult mined = mine_domains(train, cfg);
  return fit_from_partition(cfg, train, test, mined.partition,
                            std::move(mined.atoms));
}

struct BaselineResult {
  Eigen::VectorXd pred_z;
  Eigen::VectorXd pred_raw;
  std::optional<double> rmse_z;
  RidgeModel ridge;
};

// Plain ridge on raw standardized features — the comparison arm. Shares the
// scaler and the z-scored response convention with the pipeline.
inline BaselineResult rr_baseline(const Dataset& train, const Dataset& test,
                                  double ridge_lambda) {
  return detail::stage_guard("baseline", [&] {
    validate_dataset(train);
    if (!train.response) {
      throw std::invalid_argument("training response required");
    }
    const Scaler scaler = fit_scaler(train, /*warn=*/false);
    const Dataset std_train = apply_scaler(scaler, train);
    BaselineResult out;
    out.ridge = fit_ridge(std_train.features, *std_train.response, ridge_lambda);
    if (test.features.rows() > 0) {
      if (test.features.cols() != train.p()) {
        throw std::invalid_argument("train and test feature dimensions differ");
      }
      const Eigen::Index p = train.p();
      Eigen::MatrixXd test_std(test.features.rows(), p);
      for (Eigen::Index j = 0; j < p; ++j) {
        test_std.col(j) =
            (test.features.col(j).array() - scaler.means[j]) / scaler.stds[j];
      }
      out.pred_z = predict(out.ridge, test_std);
      out.pred_raw =
          (out.pred_z.array() * scaler.stds[p] + scaler.means[p]).matrix();
      if (test.response) {
        const Eigen::VectorXd truth_z =
            ((test.response->array() - scaler.means[p]) / scaler.stds[p]).matrix();
        out.rmse_z = rmse(out.pred_z, truth_z);
      }
    }
    return out;
  });
}

// Seeded uniform shuffle split; both sides stay nonempty.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& d,
                                                 double fraction,
                                                 std::uint64_t seed) {
  validate_dataset(d);
  if (d.n() < 2) {
    throw std::invalid_argument("split_dataset: need at least two instances");
  }
  if (!(fraction > 0.0) || !(fraction < 1.0)) {
    throw std::invalid_argument("split_dataset: fraction must lie in (0, 1)");
  }
  const Eigen::Index n = d.n();
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    idx[static_cast<std::size_t>(i)] = i;
  }
  Rng rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    auto j = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(i + 1));
    j = std::min(j, i);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  Eigen::Index n_train =
      static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
  n_train = std::max<Eigen::Index>(1, std::min(n_train, n - 1));

  auto take = [&](Eigen::Index begin, Eigen::Index count, Role role) {
    Dataset part;
    part.role = role;
    part.names = d.names;
    part.features.resize(count, d.p());
    if (d.response) {
      part.response = Eigen::VectorXd(count);
    }
    for (Eigen::Index r = 0; r < count; ++r) {
      const Eigen::Index src = idx[static_cast<std::size_t>(begin + r)];
      part.features.row(r) = d.features.row(src);
      if (d.response) {
        (*part.response)[r] = (*d.response)[src];
      }
    }
    return part;
  };
  return {take(0, n_train, Role::train), take(n_train, n - n_train, Role::test)};
}

}  // namespace acdt
