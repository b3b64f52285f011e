#include "catch2/catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "acdt/random.hpp"
#include "acdt/transfer.hpp"
#include "test_util.hpp"

using acdt::Rng;
using Catch::Approx;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Eigen::MatrixXd M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      M(i, j) = rng.normal();
    }
  }
  return M;
}

// C-orthonormalize the columns of G: B = G (G'CG)^{-1/2}.
Eigen::MatrixXd c_orthonormalize(const Eigen::MatrixXd& G,
                                 const Eigen::MatrixXd& C) {
  const Eigen::MatrixXd gram = G.transpose() * C * G;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::MatrixXd inv_sqrt =
      eig.eigenvectors() *
      eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      eig.eigenvectors().transpose();
  return G * inv_sqrt;
}

}  // namespace

TEST_CASE("domain-contrast matrix on tiny configurations", "[transfer]") {
  const Eigen::MatrixXd S2 = acdt::build_S({1, 1});
  Eigen::MatrixXd want2(2, 2);
  want2 << 1, -1, -1, 1;
  REQUIRE((S2 - want2).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd S3 = acdt::build_S({1, 1, 1});
  Eigen::MatrixXd want3(3, 3);
  want3 << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  REQUIRE((S3 - want3).cwiseAbs().maxCoeff() == 0.0);

  REQUIRE_THROWS_AS(acdt::build_S({3}), std::invalid_argument);
  REQUIRE_THROWS_AS(acdt::build_S({2, 0}), std::invalid_argument);
}

TEST_CASE("every row of the domain-contrast matrix sums to zero", "[transfer]") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> sizes;
    const int domains = 2 + static_cast<int>(rng.uniform() * 4);
    for (int k = 0; k < domains; ++k) {
      sizes.push_back(1 + static_cast<int>(rng.uniform() * 6));
    }
    const Eigen::MatrixXd S = acdt::build_S(sizes);
    REQUIRE(S.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("pairwise distances sum to the quadratic form", "[transfer]") {
  REQUIRE(acdt::pairwise_dist(Eigen::MatrixXd::Constant(1, 1, 0.7),
                              Eigen::MatrixXd::Constant(1, 1, 0.7),
                              Eigen::MatrixXd::Identity(1, 1)) == 0.0);
  REQUIRE(acdt::pairwise_dist(Eigen::MatrixXd::Constant(1, 1, 0.0),
                              Eigen::MatrixXd::Constant(1, 1, 2.0),
                              Eigen::MatrixXd::Identity(1, 1)) == Approx(4.0));
  REQUIRE_THROWS_AS(acdt::pairwise_dist(Eigen::MatrixXd(1, 0),
                                        Eigen::MatrixXd::Constant(1, 1, 1.0),
                                        Eigen::MatrixXd::Identity(1, 1)),
                    std::invalid_argument);

  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const std::vector<int> sizes = {2 + static_cast<int>(rng.uniform() * 3),
                                    1 + static_cast<int>(rng.uniform() * 4),
                                    3, 1};
    Eigen::Index total = 0;
    for (int s : sizes) {
      total += s;
    }
    const Eigen::Index d = 3;
    const Eigen::MatrixXd D = random_matrix(rng, d, total);
    const Eigen::MatrixXd B = random_matrix(rng, d, 2);
    const Eigen::MatrixXd S = acdt::build_S(sizes);

    double direct = 0.0;
    Eigen::Index off_k = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      Eigen::Index off_l = 0;
      for (std::size_t l = 0; l < k; ++l) {
        direct += acdt::pairwise_dist(
            D.middleCols(off_k, sizes[k]), D.middleCols(off_l, sizes[l]), B);
        off_l += sizes[l];
      }
      off_k += sizes[k];
    }
    const double quad = (B.transpose() * D * S * D.transpose() * B).trace();
    REQUIRE(direct == Approx(quad).margin(1e-10).epsilon(1e-10));
  }
}

TEST_CASE("knn graph on collinear points", "[transfer]") {
  Eigen::MatrixXd D(1, 3);
  D << 0.0, 1.0, 3.0;
  const Eigen::MatrixXd W = acdt::build_knn_graph(D, 1);
  Eigen::MatrixXd want(3, 3);
  // 0 and 1 pick each other; 2 picks 1; union symmetrization
  want << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  REQUIRE((W - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("saturated knn graph is complete", "[transfer]") {
  Rng rng(6);
  const Eigen::MatrixXd D = random_matrix(rng, 2, 5);
  const Eigen::MatrixXd W = acdt::build_knn_graph(D, 4);
  Eigen::MatrixXd want = Eigen::MatrixXd::Ones(5, 5);
  want.diagonal().setZero();
  REQUIRE((W - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("knn graph is symmetric, binary, hollow, and validated", "[transfer]") {
  Rng rng(7);
  const Eigen::MatrixXd D = random_matrix(rng, 3, 12);
  const Eigen::MatrixXd W = acdt::build_knn_graph(D, 3);
  REQUIRE((W - W.transpose()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(W.diagonal().cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < W.rows(); ++i) {
    REQUIRE(W.row(i).sum() >= 3.0);  // union can only add edges
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      REQUIRE((W(i, j) == 0.0 || W(i, j) == 1.0));
    }
  }
  REQUIRE_THROWS_AS(acdt::build_knn_graph(D, 12), std::invalid_argument);
  REQUIRE_THROWS_AS(acdt::build_knn_graph(Eigen::MatrixXd(2, 1), 1),
                    std::invalid_argument);
}

TEST_CASE("normalized laplacian on a single edge", "[transfer]") {
  Eigen::MatrixXd W(2, 2);
  W << 0, 1, 1, 0;
  const Eigen::MatrixXd L = acdt::build_laplacian(W);
  Eigen::MatrixXd want(2, 2);
  want << 1, -1, -1, 1;
  REQUIRE((L - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("laplacian quadratic form equals the edge sum", "[transfer]") {
  Rng rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index N = 8;
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j = i + 1; j < N; ++j) {
        const double w = rng.uniform() < 0.4 ? 1.0 : 0.0;
        W(i, j) = w;
        W(j, i) = w;
      }
    }
    const Eigen::MatrixXd L = acdt::build_laplacian(W);
    const Eigen::MatrixXd D = random_matrix(rng, 3, N);
    const Eigen::MatrixXd B = random_matrix(rng, 3, 2);
    const Eigen::MatrixXd Psi = B.transpose() * D;  // columns are psi(d_i)

    Eigen::VectorXd deg = W.rowwise().sum();
    double direct = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      if (deg[i] == 0.0) {
        direct += Psi.col(i).squaredNorm();  // unit-diagonal convention
        continue;
      }
      for (Eigen::Index j = 0; j < N; ++j) {
        if (W(i, j) > 0.0) {
          const Eigen::VectorXd diff = Psi.col(i) / std::sqrt(deg[i]) -
                                       Psi.col(j) / std::sqrt(deg[j]);
          direct += 0.5 * W(i, j) * diff.squaredNorm();
        }
      }
    }
    const double quad = (B.transpose() * D * L * D.transpose() * B).trace();
    REQUIRE(direct == Approx(quad).margin(1e-10).epsilon(1e-10));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(L);
    REQUIRE(eig.eigenvalues().minCoeff() > -1e-10);
    REQUIRE(eig.eigenvalues().maxCoeff() < 2.0 + 1e-10);
  }
}

TEST_CASE("isolated vertices keep unit diagonal in the laplacian", "[transfer]") {
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(3, 3);
  W(0, 1) = W(1, 0) = 1.0;
  const Eigen::MatrixXd L = acdt::build_laplacian(W);
  REQUIRE(L(2, 2) == 1.0);
  REQUIRE(L.row(2).cwiseAbs().sum() == 1.0);
}

TEST_CASE("centering matrix identities", "[transfer]") {
  const Eigen::MatrixXd H2 = acdt::build_H(2);
  Eigen::MatrixXd want(2, 2);
  want << 0.5, -0.5, -0.5, 0.5;
  REQUIRE((H2 - want).cwiseAbs().maxCoeff() < 1e-15);

  const Eigen::MatrixXd H = acdt::build_H(7);
  REQUIRE((H * Eigen::VectorXd::Ones(7)).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE((H * H - H).cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("response-penalty matrix", "[transfer]") {
  REQUIRE((acdt::build_J(3, 1.0) - Eigen::MatrixXd::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  const Eigen::MatrixXd J = acdt::build_J(1, 3.0);
  REQUIRE(J(0, 0) == 1.0);
  REQUIRE(J(1, 1) == 3.0);
  REQUIRE(J(0, 1) == 0.0);
  REQUIRE_THROWS_AS(acdt::build_J(1, -0.5), std::invalid_argument);
}

TEST_CASE("pencil solver on closed-form cases", "[transfer]") {
  Eigen::MatrixXd A(2, 2);
  A << 2, 0, 0, 1;
  const Eigen::MatrixXd C = Eigen::MatrixXd::Identity(2, 2);
  auto [B, vals] = acdt::detail::solve_pencil(A, C, 1);
  REQUIRE(vals[0] == Approx(1.0).epsilon(1e-12));
  REQUIRE(std::abs(B(0, 0)) < 1e-12);
  REQUIRE(B(1, 0) == Approx(1.0).epsilon(1e-12));  // sign canonicalized

  Rng rng(9);
  const Eigen::MatrixXd spd = test_util::random_spd(rng, 4);
  auto [Bi, vi] = acdt::detail::solve_pencil(spd, spd, 3);
  REQUIRE((vi.array() - 1.0).cwiseAbs().maxCoeff() < 1e-10);
  REQUIRE((Bi.transpose() * spd * Bi - Eigen::MatrixXd::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-8);
}

TEST_CASE("pencil solver matches a spectral-square-root oracle", "[transfer]") {
  Rng rng(10);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index d = 5;
    const Eigen::MatrixXd A = test_util::random_spd(rng, d);
    const Eigen::MatrixXd C = test_util::random_spd(rng, d);
    const int q = 3;
    auto [B, vals] = acdt::detail::solve_pencil(A, C, q);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ceig(C);
    const Eigen::MatrixXd c_inv_sqrt =
        ceig.eigenvectors() *
        ceig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
        ceig.eigenvectors().transpose();
    Eigen::MatrixXd K = c_inv_sqrt * A * c_inv_sqrt;
    K = 0.5 * (K + K.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> keig(K);

    for (int i = 0; i < q; ++i) {
      REQUIRE(vals[i] == Approx(keig.eigenvalues()[i]).margin(1e-8).epsilon(1e-8));
    }
    REQUIRE((B.transpose() * C * B - Eigen::MatrixXd::Identity(q, q))
                .cwiseAbs()
                .maxCoeff() < 1e-8);
    // objective equals the eigenvalue sum
    const double obj = (B.transpose() * A * B).trace();
    REQUIRE(obj == Approx(vals.sum()).margin(1e-8).epsilon(1e-8));
  }
}

TEST_CASE("learned map beats random constraint-orthonormal maps", "[transfer]") {
  // two shifted domains plus a target in between; no graph, no regularizer,
  // so the solver minimizes the domain contrast outright
  Rng rng(11);
  const Eigen::Index p = 2;
  const std::vector<int> sizes = {10, 10, 10};
  Eigen::MatrixXd D(p + 1, 30);
  for (int k = 0; k < 3; ++k) {
    const double shift = k == 0 ? 0.0 : (k == 1 ? 3.0 : 1.5);
    for (int i = 0; i < 10; ++i) {
      D(0, 10 * k + i) = shift + rng.normal();
      D(1, 10 * k + i) = -shift + rng.normal();
      D(2, 10 * k + i) = 0.0;  // response channel muted
    }
  }
  const Eigen::MatrixXd S = acdt::build_S(sizes);
  const Eigen::MatrixXd H = acdt::build_H(30);
  const Eigen::MatrixXd J = acdt::build_J(p, 1.0);
  acdt::TransferConfig cfg;
  cfg.alpha = 0.0;
  cfg.mu = 0.0;
  cfg.tau = 0.0;
  cfg.q = 2;
  const acdt::TransferSolution sol =
      acdt::solve_transfer(D, S, Eigen::MatrixXd(), H, J, cfg, {"x1", "x2", "response"});

  Eigen::MatrixXd C = D * H * D.transpose();
  C.diagonal().array() += sol.jitter_used;
  const double learned =
      (sol.map.B.transpose() * D * S * D.transpose() * sol.map.B).trace();
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd B = c_orthonormalize(random_matrix(rng, p + 1, 2), C);
    const double randomized = (B.transpose() * D * S * D.transpose() * B).trace();
    REQUIRE(learned <= randomized + 1e-10);
  }
}

TEST_CASE("zero response channel decouples from the feature block", "[transfer]") {
  // with a muted response row, the feature rows of the learned map must match
  // an x-only solve that pins the same absolute jitter
  Rng rng(12);
  const Eigen::Index p = 3;
  const Eigen::Index N = 24;
  const std::vector<int> sizes = {8, 8, 8};
  Eigen::MatrixXd D(p + 1, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const double shift = j < 8 ? 0.0 : (j < 16 ? 2.0 : 1.0);
    for (Eigen::Index i = 0; i < p; ++i) {
      D(i, j) = shift + rng.normal();
    }
    D(p, j) = 0.0;
  }
  const Eigen::MatrixXd S = acdt::build_S(sizes);
  const Eigen::MatrixXd H = acdt::build_H(N);
  acdt::TransferConfig cfg;
  cfg.alpha = 0.0;
  cfg.beta = 1.0;
  cfg.mu = 0.7;
  cfg.tau = 0.0;
  cfg.q = 2;
  const acdt::TransferSolution full = acdt::solve_transfer(
      D, S, Eigen::MatrixXd(), H, acdt::build_J(p, cfg.beta), cfg,
      {"a", "b", "c", "response"});

  const Eigen::MatrixXd Dx = D.topRows(p);
  const acdt::TransferSolution xonly = acdt::solve_transfer(
      Dx, S, Eigen::MatrixXd(), H, Eigen::MatrixXd::Identity(p, p), cfg,
      {"a", "b", "c"}, full.jitter_used);

  REQUIRE(full.map.B.row(p).cwiseAbs().maxCoeff() < 1e-8);
  for (int c = 0; c < cfg.q; ++c) {
    const Eigen::VectorXd a = full.map.B.col(c).head(p);
    const Eigen::VectorXd b = xonly.map.B.col(c);
    const double diff = std::min((a - b).cwiseAbs().maxCoeff(),
                                 (a + b).cwiseAbs().maxCoeff());
    REQUIRE(diff < 1e-8);
  }
}

TEST_CASE("transform applies the map to columns", "[transfer]") {
  acdt::AffineMap map;
  map.B = Eigen::MatrixXd::Identity(3, 3);
  map.q = 3;
  Rng rng(13);
  const Eigen::MatrixXd D = random_matrix(rng, 3, 5);
  REQUIRE((acdt::transform(map, D) - D).cwiseAbs().maxCoeff() == 0.0);

  acdt::AffineMap sel;
  sel.B = Eigen::MatrixXd::Zero(3, 1);
  sel.B(0, 0) = 1.0;
  sel.q = 1;
  REQUIRE((acdt::transform(sel, D) - D.row(0)).cwiseAbs().maxCoeff() == 0.0);

  REQUIRE_THROWS_AS(acdt::transform(sel, Eigen::MatrixXd(2, 5)),
                    std::invalid_argument);
}

TEST_CASE("solver validates shapes and conditions degenerate constraints",
          "[transfer]") {
  Rng rng(14);
  const Eigen::Index p = 2;
  const Eigen::MatrixXd D = random_matrix(rng, p + 1, 4);
  const Eigen::MatrixXd S = acdt::build_S({2, 2});
  const Eigen::MatrixXd H = acdt::build_H(4);
  const Eigen::MatrixXd J = acdt::build_J(p, 1.0);
  acdt::TransferConfig cfg;
  cfg.tau = 0.0;
  cfg.q = 5;  // more than p+1
  REQUIRE_THROWS_AS(
      acdt::solve_transfer(D, S, Eigen::MatrixXd(), H, J, cfg, {}),
      std::invalid_argument);
  cfg.q = 2;
  REQUIRE_THROWS_AS(
      acdt::solve_transfer(D, acdt::build_S({2, 3}), Eigen::MatrixXd(), H, J,
                           cfg, {}),
      std::invalid_argument);
  cfg.tau = 0.5;
  REQUIRE_THROWS_AS(
      acdt::solve_transfer(D, S, Eigen::MatrixXd(), H, J, cfg, {}),
      std::invalid_argument);

  // N = 2 columns in dimension 3: DHD' is rank deficient, jitter must engage
  cfg.tau = 0.0;
  cfg.q = 2;
  const Eigen::MatrixXd D2 = random_matrix(rng, p + 1, 2);
  const acdt::TransferSolution sol = acdt::solve_transfer(
      D2, acdt::build_S({1, 1}), Eigen::MatrixXd(), acdt::build_H(2), J, cfg, {});
  REQUIRE(sol.jitter_used > 0.0);
  REQUIRE(sol.map.B.allFinite());
}
