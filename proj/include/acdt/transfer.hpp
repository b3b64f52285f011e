#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acdt {

struct TransferConfig {
  double alpha = 0.5;   // response shrink in the joint representation
  double beta = 1.0;    // response-row weight in J
  double mu = 1.0;      // regularizer weight
  double tau = 1.0;     // graph weight
  int q = 2;            // output dimension
  int knn = 5;
  double jitter = 1e-8; // conditioning scale, relative to tr(C)/side

  void validate(Eigen::Index joint_dim) const {
    if (!(alpha >= 0.0) || !(beta >= 0.0) || !(mu >= 0.0) || !(tau >= 0.0)) {
      throw std::invalid_argument("transfer config: alpha, beta, mu, tau must be >= 0");
    }
    if (q < 1 || q > joint_dim) {
      throw std::invalid_argument("transfer config: need 1 <= q <= " +
                                  std::to_string(joint_dim));
    }
    if (knn < 1) {
      throw std::invalid_argument("transfer config: knn must be >= 1");
    }
    if (!(jitter > 0.0)) {
      throw std::invalid_argument("transfer config: jitter must be positive");
    }
  }
};

struct AffineMap {
  Eigen::MatrixXd B;  // (p+1) x q
  int q = 0;
  std::vector<std::string> input_semantics;  // p feature names then "response"
};

// Multi-domain MMD coefficient matrix over column-grouped instances. With K
// domain blocks, same-block entries are (K-1)/n_k^2 and cross-block entries
// -1/(n_k n_l); summing the per-pair MMD matrices gives exactly this.
inline Eigen::MatrixXd build_S(const std::vector<int>& domain_sizes) {
  const int K = static_cast<int>(domain_sizes.size());
  if (K < 2) {
    throw std::invalid_argument("build_S: need at least two domains");
  }
  long total = 0;
  for (int s : domain_sizes) {
    if (s < 1) {
      throw std::invalid_argument("build_S: every domain needs at least one instance");
    }
    total += s;
  }
  const auto N = static_cast<Eigen::Index>(total);
  Eigen::MatrixXd S(N, N);
  Eigen::Index row_off = 0;
  for (int k = 0; k < K; ++k) {
    const auto nk = static_cast<Eigen::Index>(domain_sizes[static_cast<std::size_t>(k)]);
    Eigen::Index col_off = 0;
    for (int l = 0; l < K; ++l) {
      const auto nl = static_cast<Eigen::Index>(domain_sizes[static_cast<std::size_t>(l)]);
      const double value = (k == l)
          ? static_cast<double>(K - 1) / (static_cast<double>(nk) * static_cast<double>(nk))
          : -1.0 / (static_cast<double>(nk) * static_cast<double>(nl));
      S.block(row_off, col_off, nk, nl).setConstant(value);
      col_off += nl;
    }
    row_off += nk;
  }
  return S;
}

// Squared distance between mapped domain means.
inline double pairwise_dist(const Eigen::MatrixXd& dk, const Eigen::MatrixXd& dl,
                            const Eigen::MatrixXd& B) {
  if (dk.cols() < 1 || dl.cols() < 1) {
    throw std::invalid_argument("pairwise_dist: empty domain");
  }
  if (dk.rows() != B.rows() || dl.rows() != B.rows()) {
    throw std::invalid_argument("pairwise_dist: dimension mismatch");
  }
  const Eigen::VectorXd diff =
      B.transpose() * (dk.rowwise().mean() - dl.rowwise().mean());
  return diff.squaredNorm();
}

// Binary kNN adjacency on Euclidean column distances, symmetrized by union.
// Ties broken by smaller index so the graph is deterministic.
inline Eigen::MatrixXd build_knn_graph(const Eigen::MatrixXd& D, int knn) {
  const Eigen::Index N = D.cols();
  if (N < 2) {
    throw std::invalid_argument("build_knn_graph: need at least two instances");
  }
  if (knn < 1 || knn >= N) {
    throw std::invalid_argument("build_knn_graph: need 1 <= knn < " +
                                std::to_string(N));
  }
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N, N);
  std::vector<std::pair<double, Eigen::Index>> order;
  order.reserve(static_cast<std::size_t>(N) - 1);
  for (Eigen::Index i = 0; i < N; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < N; ++j) {
      if (j != i) {
        order.emplace_back((D.col(i) - D.col(j)).squaredNorm(), j);
      }
    }
    std::sort(order.begin(), order.end());
    for (int r = 0; r < knn; ++r) {
      W(i, order[static_cast<std::size_t>(r)].second) = 1.0;
    }
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const double w = std::max(W(i, j), W(j, i));
      W(i, j) = w;
      W(j, i) = w;
    }
  }
  return W;
}

// L = I - Deg^{-1/2} W Deg^{-1/2}; an isolated vertex keeps L_ii = 1.
inline Eigen::MatrixXd build_laplacian(const Eigen::MatrixXd& W) {
  const Eigen::Index N = W.rows();
  if (W.cols() != N) {
    throw std::invalid_argument("build_laplacian: adjacency must be square");
  }
  if (!W.isApprox(W.transpose(), 1e-12)) {
    throw std::invalid_argument("build_laplacian: adjacency must be symmetric");
  }
  if ((W.array() < 0.0).any() || W.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument(
        "build_laplacian: adjacency must be nonnegative with zero diagonal");
  }
  Eigen::VectorXd dinv_sqrt(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double deg = W.row(i).sum();
    dinv_sqrt[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Eigen::MatrixXd L = -(dinv_sqrt.asDiagonal() * W * dinv_sqrt.asDiagonal());
  L.diagonal().array() += 1.0;
  return L;
}

inline Eigen::MatrixXd build_H(Eigen::Index N) {
  if (N < 1) {
    throw std::invalid_argument("build_H: need N >= 1");
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Constant(N, N, -1.0 / static_cast<double>(N));
  H.diagonal().array() += 1.0;
  return H;
}

inline Eigen::MatrixXd build_J(Eigen::Index p, double beta) {
  if (p < 1 || !(beta >= 0.0)) {
    throw std::invalid_argument("build_J: need p >= 1 and beta >= 0");
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(p + 1);
  diag[p] = beta;
  return diag.asDiagonal();
}

namespace detail {

// Deterministic eigenvector sign: the largest-magnitude coordinate of each
// column is made positive (first such coordinate on ties).
inline void canonicalize_signs(Eigen::MatrixXd& B) {
  for (Eigen::Index c = 0; c < B.cols(); ++c) {
    Eigen::Index argmax = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < B.rows(); ++r) {
      const double mag = std::abs(B(r, c));
      if (mag > best) {
        best = mag;
        argmax = r;
      }
    }
    if (B(argmax, c) < 0.0) {
      B.col(c) = -B.col(c);
    }
  }
}

// Symmetric-definite pencil A b = lambda C b via Cholesky reduction; returns
// the q smallest eigenpairs, C-orthonormalized.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> solve_pencil(
    const Eigen::MatrixXd& A, const Eigen::MatrixXd& C, int q) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.compute(A, C, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("solve_pencil: generalized eigensolver failed");
  }
  Eigen::MatrixXd B = solver.eigenvectors().leftCols(q);
  Eigen::VectorXd vals = solver.eigenvalues().head(q);
  if (!B.allFinite() || !vals.allFinite()) {
    throw std::runtime_error("solve_pencil: non-finite eigensolution");
  }
  const Eigen::MatrixXd gram = B.transpose() * C * B;
  if ((gram - Eigen::MatrixXd::Identity(q, q)).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::runtime_error("solve_pencil: C-orthonormality lost");
  }
  canonicalize_signs(B);
  return {std::move(B), std::move(vals)};
}

}  // namespace detail

struct TransferSolution {
  AffineMap map;
  Eigen::VectorXd eigvals;
  double jitter_used = 0.0;  // absolute diagonal shift applied to C
};

// Minimize tr(B'(D(S + tau L)D' + mu J)B) subject to B'(DHD' + jitter I)B = I
// and keep the q smallest generalized eigenpairs. L is ignored when tau = 0.
// jitter_abs, when given, pins the absolute shift instead of the relative
// ladder (no escalation).
inline TransferSolution solve_transfer(
    const Eigen::MatrixXd& D, const Eigen::MatrixXd& S, const Eigen::MatrixXd& L,
    const Eigen::MatrixXd& H, const Eigen::MatrixXd& J, const TransferConfig& cfg,
    std::vector<std::string> input_semantics,
    std::optional<double> jitter_abs = std::nullopt) {
  const Eigen::Index d = D.rows();
  const Eigen::Index N = D.cols();
  cfg.validate(d);
  if (!D.allFinite()) {
    throw std::invalid_argument("solve_transfer: non-finite representation");
  }
  if (S.rows() != N || S.cols() != N || H.rows() != N || H.cols() != N) {
    throw std::invalid_argument("solve_transfer: S and H must be N x N");
  }
  if (J.rows() != d || J.cols() != d) {
    throw std::invalid_argument("solve_transfer: J must match the joint dimension");
  }
  if (cfg.tau > 0.0 && (L.rows() != N || L.cols() != N)) {
    throw std::invalid_argument("solve_transfer: L must be N x N when tau > 0");
  }

  Eigen::MatrixXd A = cfg.tau > 0.0
      ? Eigen::MatrixXd(D * (S + cfg.tau * L) * D.transpose())
      : Eigen::MatrixXd(D * S * D.transpose());
  A += cfg.mu * J;
  A = 0.5 * (A + A.transpose());
  Eigen::MatrixXd C0 = D * H * D.transpose();
  C0 = 0.5 * (C0 + C0.transpose());

  const double trace_scale = C0.trace() / static_cast<double>(d);
  const double base = trace_scale > 0.0 ? trace_scale : 1.0;

  TransferSolution out;
  if (jitter_abs) {
    if (!(*jitter_abs > 0.0)) {
      throw std::invalid_argument("solve_transfer: jitter_abs must be positive");
    }
    Eigen::MatrixXd C = C0;
    C.diagonal().array() += *jitter_abs;
    if (Eigen::LLT<Eigen::MatrixXd>(C).info() != Eigen::Success) {
      throw std::runtime_error("solve_transfer: pinned jitter leaves C indefinite");
    }
    auto [B, vals] = detail::solve_pencil(A, C, cfg.q);
    out.map.B = std::move(B);
    out.eigvals = std::move(vals);
    out.jitter_used = *jitter_abs;
  } else {
    bool solved = false;
    for (double scale = cfg.jitter; scale <= 1e-2 * (1.0 + 1e-12); scale *= 10.0) {
      Eigen::MatrixXd C = C0;
      C.diagonal().array() += scale * base;
      if (Eigen::LLT<Eigen::MatrixXd>(C).info() != Eigen::Success) {
        continue;
      }
      try {
        auto [B, vals] = detail::solve_pencil(A, C, cfg.q);
        out.map.B = std::move(B);
        out.eigvals = std::move(vals);
        out.jitter_used = scale * base;
        solved = true;
        break;
      } catch (const std::runtime_error&) {
        continue;  // escalate
      }
    }
    if (!solved) {
      throw std::runtime_error(
          "solve_transfer: C stayed indefinite up to the 1e-2 jitter ceiling");
    }
  }
  out.map.q = cfg.q;
  out.map.input_semantics = std::move(input_semantics);
  return out;
}

inline Eigen::MatrixXd transform(const AffineMap& map, const Eigen::MatrixXd& D) {
  if (D.rows() != map.B.rows()) {
    throw std::invalid_argument("transform: representation dimension mismatch");
  }
  return map.B.transpose() * D;
}

}  // namespace acdt
