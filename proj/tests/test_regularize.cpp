#include <gtest/gtest.h>

#include <cmath>

#include "specgraph/dense_eig.hpp"
#include "specgraph/eigensolver.hpp"
#include "specgraph/models.hpp"
#include "specgraph/regularize.hpp"

using namespace specgraph;

namespace {

Graph star(NodeId leaves) {
  std::vector<Edge> edges;
  for (NodeId j = 1; j <= leaves; ++j) edges.push_back({0, j, 1.0});
  return Graph(leaves + 1, edges);
}

Graph complete(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  return Graph(n, edges);
}

}  // namespace

TEST(DegreeRegularize, CompliantGraphIsUnchanged) {
  const auto s = sample(ErdosRenyi{0.1}, 30, 2);
  const double d_hat = s.graph.max_degree();
  auto [g, report] = degree_regularize(s.graph, d_hat);
  EXPECT_EQ(g, s.graph);
  EXPECT_TRUE(report.touched.empty());
}

TEST(DegreeRegularize, StarIsScaledProportionally) {
  auto [g, report] = degree_regularize(star(9), 2.0, 2.0);
  ASSERT_EQ(report.touched, (std::vector<NodeId>{0}));
  EXPECT_NEAR(report.scale_factors[0], 4.0 / 9.0, 1e-15);
  for (const auto& e : g.edges()) EXPECT_NEAR(e.weight, 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(g.degree(0), 4.0, 1e-12);
  for (std::size_t j = 1; j <= 9; ++j) EXPECT_NEAR(g.degree(j), 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(report.max_degree_before, 9.0, 0);
  EXPECT_NEAR(report.max_degree_after, 4.0, 1e-12);
}

TEST(DegreeRegularize, PlantedPartitionRespectsTwiceA) {
  for (Seed seed = 0; seed < 20; ++seed) {
    const auto s = sample(PlantedPartition{5, 0.1}, 50, seed);
    auto [g, report] = degree_regularize(s.graph, 5.0);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(g.degree(i), 10.0 * (1 + 1e-12));
    for (double f : report.scale_factors) {
      EXPECT_GT(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
  }
}

TEST(DegreeRegularize, IdempotentAndLocal) {
  for (Seed seed = 0; seed < 20; ++seed) {
    const auto s = sample(ErdosRenyi{3.0 / 400}, 400, seed);
    auto [once, report] = degree_regularize(s.graph, 3.0, 1.5);
    auto [twice, report2] = degree_regularize(once, 3.0, 1.5);
    EXPECT_EQ(once, twice);
    EXPECT_TRUE(report2.touched.empty());
    // Entries never grow, and untouched rows keep their exact weights.
    std::vector<char> touched(400, 0);
    for (auto v : report.touched) touched[v] = 1;
    ASSERT_EQ(once.num_edges(), s.graph.num_edges());
    for (std::size_t k = 0; k < once.num_edges(); ++k) {
      const auto& before = s.graph.edges()[k];
      const auto& after = once.edges()[k];
      EXPECT_LE(after.weight, before.weight);
      if (!touched[before.i] && !touched[before.j]) {
        EXPECT_EQ(after.weight, before.weight);
      }
    }
  }
}

TEST(DegreeRegularize, BudgetIsReported) {
  auto [g, report] = degree_regularize(star(9), 2.0);
  EXPECT_EQ(report.budget, 50u);
  EXPECT_FALSE(report.over_budget);
  EXPECT_THROW(degree_regularize(star(3), 0.0), ParameterError);
}

TEST(RemoveHighDegree, StarAndNoOps) {
  EXPECT_EQ(remove_high_degree(star(9), 5.0).num_edges(), 0u);
  EXPECT_EQ(remove_high_degree(Graph(5), 1.0), Graph(5));
  const auto k4 = complete(4);
  EXPECT_EQ(remove_high_degree(k4, 3.0), k4);
}

TEST(RemoveHighDegree, HighVerticesEndIsolated) {
  for (Seed seed = 0; seed < 10; ++seed) {
    const auto s = sample(ErdosRenyi{0.01}, 500, seed);
    const double threshold = 8.0;
    const auto out = remove_high_degree(s.graph, threshold);
    for (std::size_t i = 0; i < 500; ++i)
      if (s.graph.degree(i) > threshold) {
        EXPECT_EQ(out.degree(i), 0.0);
      }
  }
}

TEST(Laplacian, SingleEdgeAndK4) {
  const auto L = laplacian(Graph(2, {{0, 1, 1.0}})).to_dense();
  EXPECT_NEAR(L(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(L(0, 0), 0.0, 0);
  const auto e = dense_eig_oracle(L);
  EXPECT_NEAR(e.values[0], -1, 1e-14);
  EXPECT_NEAR(e.values[1], 1, 1e-14);
  const auto L4 = laplacian(complete(4)).to_dense();
  const Eigen::MatrixXd expect = (Eigen::MatrixXd::Ones(4, 4) - Eigen::MatrixXd::Identity(4, 4)) / 3.0;
  EXPECT_LE((L4 - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(dense_eig_oracle(L4).values[3], 1.0, 1e-14);
}

TEST(Laplacian, IsolatedVertexGivesZeroRow) {
  const auto L = laplacian(Graph(3, {{0, 1, 1.0}})).to_dense();
  EXPECT_EQ(L.row(2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(L.col(2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(TauRegularize, ZeroTauAndEmptyGraph) {
  const auto s = sample(ErdosRenyi{0.2}, 20, 1);
  EXPECT_EQ(tau_regularize(s.graph, 0.0).to_dense(), s.graph.to_dense());
  const auto op = tau_regularize(Graph(6), 6.0);
  EXPECT_EQ(op.to_dense(), Eigen::MatrixXd::Ones(6, 6));
  EXPECT_NEAR(spectral_norm(op), 6.0, 1e-8);
  EXPECT_THROW(tau_regularize(s.graph, -1.0), ParameterError);
}

TEST(TauRegularize, SmallTwoCommunityGraphHasNoIsolatedVertices) {
  for (Seed seed = 0; seed < 20; ++seed) {
    const auto s = sample(PlantedPartition{5, 0.1}, 50, seed);
    const double tau = choose_tau(s.graph, 0.1);
    for (double d : regularized_degrees(s.graph, tau)) EXPECT_GT(d, 0.0);
  }
}

TEST(RegularizedLaplacian, K4TopEigenvectorIsConstant) {
  for (double tau : {0.1, 1.0, 10.0}) {
    const auto pairs = top_eigs(regularized_laplacian(complete(4), tau), 1, Which::kLargestAlgebraic, {1e-12});
    EXPECT_NEAR(pairs[0].value, 1.0, 1e-10);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(pairs[0].vector[i]), 0.5, 1e-9);
  }
}

TEST(RegularizedLaplacian, TwoDisjointEdgesBecomeConnected) {
  const Graph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  const auto e = dense_eig_oracle(regularized_laplacian(g, 0.5).to_dense());
  EXPECT_NEAR(e.values[3], 1.0, 1e-12);
  EXPECT_LT(e.values[2], 1.0 - 1e-6);
}

TEST(RegularizedLaplacian, TopEigenvectorIsSqrtDegree) {
  for (Seed seed = 0; seed < 25; ++seed) {
    const auto s = sample(ErdosRenyi{0.05}, 80, seed);
    const double tau = 0.3 + 0.1 * static_cast<double>(seed);
    const auto op = regularized_laplacian(s.graph, tau);
    Eigen::VectorXd v(80);
    const auto d = regularized_degrees(s.graph, tau);
    for (int i = 0; i < 80; ++i) v[i] = std::sqrt(d[static_cast<std::size_t>(i)]);
    v.normalize();
    EXPECT_LE((op * v - v).norm(), 1e-8);
    const auto e = dense_eig_oracle(op.to_dense());
    EXPECT_GE(e.values[0], -1 - 1e-8);
    EXPECT_LE(e.values[79], 1 + 1e-8);
  }
}

TEST(RegularizedLaplacian, ZeroTauNeedsPositiveDegrees) {
  EXPECT_THROW(regularized_laplacian(Graph(3, {{0, 1, 1.0}}), 0.0), ParameterError);
  EXPECT_NO_THROW(regularized_laplacian(complete(3), 0.0));
}

TEST(ChooseTau, Examples) {
  EXPECT_NEAR(choose_tau(complete(4), 1.0), 3.0, 1e-15);
  EXPECT_NEAR(choose_tau(star(9), 0.25), 0.45, 1e-15);
  WarningSink previous = set_warning_sink([](const std::string&) {});
  EXPECT_EQ(choose_tau(Graph(5), 0.5), 0.0);
  set_warning_sink(previous);
  EXPECT_THROW(choose_tau(complete(3), 0.0), ParameterError);
  EXPECT_THROW(choose_tau(complete(3), 1.5), ParameterError);
}
