#include <gtest/gtest.h>

#include <cmath>

#include "random_ops.hpp"
#include "specgraph/dense_eig.hpp"
#include "specgraph/eigensolver.hpp"
#include "specgraph/regularize.hpp"

using namespace specgraph;

namespace {

Eigen::MatrixXd wigner(Eigen::Index n, Seed seed) {
  Stream rng(seed);
  Eigen::MatrixXd W(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) W(i, j) = W(j, i) = rng.normal();
  return W;
}

}  // namespace

TEST(DenseOracle, DiagonalAndSwap) {
  Eigen::MatrixXd D = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const auto e = dense_eig_oracle(D);
  EXPECT_DOUBLE_EQ(e.values[0], 1);
  EXPECT_DOUBLE_EQ(e.values[1], 2);
  EXPECT_DOUBLE_EQ(e.values[2], 3);
  Eigen::MatrixXd S(2, 2);
  S << 0, 1, 1, 0;
  const auto s = dense_eig_oracle(S);
  EXPECT_NEAR(s.values[0], -1, 1e-15);
  EXPECT_NEAR(s.values[1], 1, 1e-15);
}

TEST(DenseOracle, ReconstructsWignerMatrix) {
  const auto W = wigner(64, 3);
  const auto e = dense_eig_oracle(W);
  const Eigen::MatrixXd R = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  EXPECT_LE((W - R).norm() / W.norm(), 1e-8);
  EXPECT_LE((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(64, 64)).norm(), 1e-10);
  for (Eigen::Index i = 1; i < 64; ++i) EXPECT_LE(e.values[i - 1], e.values[i]);
}

TEST(DenseOracle, RejectsBadInput) {
  Eigen::MatrixXd M(2, 2);
  M << 0, 1, 0, 0;
  EXPECT_THROW(dense_eig_oracle(M), ParameterError);
  EXPECT_THROW(dense_eig_oracle(Eigen::MatrixXd::Zero(300, 300)), ParameterError);
}

TEST(SpectralNorm, SimpleCases) {
  EXPECT_EQ(spectral_norm(SymmetricOperator::zero(10)), 0.0);
  EXPECT_NEAR(spectral_norm(SymmetricOperator::rank_one(10, 0.5)), 5.0, 1e-8);
  EXPECT_NEAR(spectral_norm(SymmetricOperator::rank_one(10, -0.5)), 5.0, 1e-8);
}

TEST(SpectralNorm, MatchesOracleOnRandomMatrix) {
  const auto W = wigner(32, 8);
  const auto e = dense_eig_oracle(W);
  const double truth = std::max(-e.values[0], e.values[31]);
  EXPECT_NEAR(spectral_norm(SymmetricOperator::dense(W)), truth, 1e-6 * truth);
}

TEST(SpectralNorm, BoundedBelowByColumnNorms) {
  for (std::size_t c = 0; c < 12; ++c) {
    const auto oc = fixtures::random_operator_case(c, 40, derive_seed(5, {c}));
    const double norm = spectral_norm(oc.op);
    for (Eigen::Index i = 0; i < 40; ++i) EXPECT_GE(norm * (1 + 1e-8), oc.dense.col(i).norm()) << oc.label;
  }
}

TEST(TopEigs, DiagonalOperator) {
  Eigen::MatrixXd D = Eigen::Vector3d(3, 2, 1).asDiagonal();
  const auto pairs = top_eigs(SymmetricOperator::dense(D), 2, Which::kLargestAlgebraic);
  EXPECT_NEAR(pairs[0].value, 3, 1e-10);
  EXPECT_NEAR(pairs[1].value, 2, 1e-10);
  EXPECT_NEAR(std::abs(pairs[0].vector[0]), 1, 1e-8);
  EXPECT_NEAR(std::abs(pairs[1].vector[1]), 1, 1e-8);
}

TEST(TopEigs, PlantedPartitionExpectationClosedForm) {
  for (auto [a, b, n] : {std::tuple{5.0, 0.1, 50}, {12.0, 3.0, 200}, {30.0, 29.0, 64}}) {
    const auto P = realize_expectation(PlantedPartition{a, b}, static_cast<std::size_t>(n), 0).second;
    const auto pairs = top_eigs(SymmetricOperator::expected(P), 2, Which::kLargestAlgebraic, {1e-12});
    EXPECT_NEAR(pairs[0].value, (a + b) / 2 - a / n, 1e-8);
    EXPECT_NEAR(pairs[1].value, (a - b) / 2 - a / n, 1e-8);
    // v1 on span{1}, v2 on span{(+1..., -1...)}.
    EXPECT_NEAR(std::abs(pairs[0].vector.sum()) / std::sqrt(n), 1.0, 1e-8);
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u[i] = i < (n + 1) / 2 ? 1.0 : -1.0;
    EXPECT_NEAR(std::abs(pairs[1].vector.dot(u)) / u.norm(), 1.0, 1e-8);
  }
}

TEST(TopEigs, MatchesOracleOnSparseGraph) {
  const auto s = sample(ErdosRenyi{0.2}, 24, 4);
  const auto op = SymmetricOperator::adjacency(s.graph);
  const auto e = dense_eig_oracle(op.to_dense());
  const auto top = top_eigs(op, 3, Which::kLargestAlgebraic);
  const auto bottom = top_eigs(op, 3, Which::kSmallestAlgebraic);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(top[static_cast<std::size_t>(k)].value, e.values[23 - k], 1e-6);
    EXPECT_NEAR(bottom[static_cast<std::size_t>(k)].value, e.values[k], 1e-6);
  }
}

TEST(TopEigs, ResidualAndNormContract) {
  for (std::size_t c = 0; c < 18; ++c) {
    const auto oc = fixtures::random_operator_case(c, 30 + c, derive_seed(17, {c}));
    for (auto which : {Which::kLargestAlgebraic, Which::kSmallestAlgebraic, Which::kLargestMagnitude}) {
      SolverOptions opt;
      opt.tol = 1e-9;
      const auto pairs = top_eigs(oc.op, 3, which, opt);
      for (const auto& p : pairs) {
        EXPECT_NEAR(p.vector.norm(), 1.0, 1e-10);
        EXPECT_LE((oc.dense * p.vector - p.value * p.vector).norm(), 1e-9 * std::max(1.0, std::abs(p.value)) * 1.01)
            << oc.label;
      }
    }
  }
}

TEST(TopEigs, EigenvaluesDoNotDependOnSeed) {
  const auto W = wigner(48, 21);
  const auto op = SymmetricOperator::dense(W);
  SolverOptions a, b;
  a.seed = 1;
  b.seed = 2;
  const auto pa = top_eigs(op, 4, Which::kLargestAlgebraic, a);
  const auto pb = top_eigs(op, 4, Which::kLargestAlgebraic, b);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(pa[static_cast<std::size_t>(k)].value, pb[static_cast<std::size_t>(k)].value, 1e-7);
}

TEST(TopEigs, DegenerateEigenspaceIsSpanned) {
  // Three disjoint triangles: eigenvalue 2 with multiplicity 3.
  std::vector<Edge> edges;
  for (NodeId t = 0; t < 3; ++t) {
    edges.push_back({3 * t, 3 * t + 1, 1});
    edges.push_back({3 * t, 3 * t + 2, 1});
    edges.push_back({3 * t + 1, 3 * t + 2, 1});
  }
  const auto pairs = top_eigs(SymmetricOperator::adjacency(Graph(9, edges)), 3, Which::kLargestAlgebraic);
  Eigen::MatrixXd V(9, 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(pairs[static_cast<std::size_t>(k)].value, 2.0, 1e-8);
    V.col(k) = pairs[static_cast<std::size_t>(k)].vector;
  }
  // Subspace check: V spans the block indicators.
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(9, 3);
  for (int t = 0; t < 3; ++t) U.block(3 * t, t, 3, 1).setConstant(1.0 / std::sqrt(3.0));
  const Eigen::MatrixXd proj = V.transpose() * U;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj);
  EXPECT_NEAR(svd.singularValues().minCoeff(), 1.0, 1e-8);
}

TEST(TopEigs, BudgetExhaustionRaisesWithEstimate) {
  const auto W = wigner(200, 2);
  SolverOptions opt;
  opt.max_matvecs = 5;
  opt.basis_size = 4;
  opt.tol = 1e-14;
  try {
    top_eigs(SymmetricOperator::dense(W), 1, Which::kLargestAlgebraic, opt);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_TRUE(std::isfinite(e.best_estimate()));
  }
}

TEST(TopEigs, RejectsBadArguments) {
  EXPECT_THROW(top_eigs(SymmetricOperator::zero(3), 4, Which::kLargestAlgebraic), ParameterError);
  EXPECT_THROW(top_eigs(SymmetricOperator::zero(3), 0, Which::kLargestAlgebraic), ParameterError);
  SolverOptions opt;
  opt.tol = 0;
  EXPECT_THROW(top_eigs(SymmetricOperator::zero(3), 1, Which::kLargestAlgebraic, opt), ParameterError);
}

TEST(TopEigs, LaplacianSpectrumContainment) {
  for (Seed seed = 0; seed < 30; ++seed) {
    const auto s = sample(PlantedPartition{6, 1}, 60, seed);
    const double tau = choose_tau(s.graph, 0.5);
    for (const auto& op : {laplacian(s.graph), regularized_laplacian(s.graph, tau)}) {
      const auto e = dense_eig_oracle(op.to_dense());
      EXPECT_GE(e.values[0], -1 - 1e-8);
      EXPECT_LE(e.values[59], 1 + 1e-8);
    }
    const auto top = top_eigs(regularized_laplacian(s.graph, tau), 1, Which::kLargestAlgebraic, {1e-10});
    EXPECT_NEAR(top[0].value, 1.0, 1e-8);
  }
}
