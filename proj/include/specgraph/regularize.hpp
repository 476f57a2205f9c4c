#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/error.hpp"
#include "specgraph/graph.hpp"
#include "specgraph/operator.hpp"

namespace specgraph {

struct RegularizationReport {
  std::vector<NodeId> touched;        ///< vertices whose edges were down-weighted, ascending
  std::vector<double> scale_factors;  ///< cumulative factor per touched vertex, in (0, 1]
  double d_hat = 0.0;
  double cap = 0.0;
  double max_degree_before = 0.0;
  double max_degree_after = 0.0;
  std::size_t budget = 0;  ///< ceil(10 n / d_hat)
  bool over_budget = false;
};

/// Down-weight edges at high-degree vertices until every weighted degree is at
/// most cap_multiplier * d_hat. Vertices are visited in decreasing degree order
/// and a violator has all its incident weights multiplied by cap / degree.
/// Scaling a vertex only lowers its neighbors' degrees, so one pass normally
/// suffices; passes repeat until nothing exceeds the cap.
inline std::pair<Graph, RegularizationReport> degree_regularize(const Graph& g, double d_hat,
                                                                double cap_multiplier = 2.0) {
  if (!(d_hat > 0.0)) throw ParameterError("d_hat must be positive");
  if (!(cap_multiplier > 0.0)) throw ParameterError("cap multiplier must be positive");
  const std::size_t n = g.size();
  const double cap = cap_multiplier * d_hat;
  // Relative slack so an exactly-capped vertex is not rescaled by rounding.
  const double limit = cap * (1.0 + 1e-12);

  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    incident[edges[e].i].push_back(e);
    incident[edges[e].j].push_back(e);
  }
  std::vector<double> degree = g.degrees();
  std::vector<double> factor(n, 1.0);

  RegularizationReport report;
  report.d_hat = d_hat;
  report.cap = cap;
  report.max_degree_before = degree.empty() ? 0.0 : *std::max_element(degree.begin(), degree.end());
  report.budget = static_cast<std::size_t>(std::ceil(10.0 * static_cast<double>(n) / d_hat));

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return degree[a] > degree[b]; });

  for (std::size_t pass = 0; pass <= n; ++pass) {
    bool changed = false;
    for (NodeId v : order) {
      if (degree[v] <= limit) continue;
      const double s = cap / degree[v];
      for (std::size_t e : incident[v]) {
        Edge& edge = edges[e];
        const NodeId other = edge.i == v ? edge.j : edge.i;
        const double reduced = edge.weight * s;
        degree[other] -= edge.weight - reduced;
        edge.weight = reduced;
      }
      degree[v] = 0.0;
      for (std::size_t e : incident[v]) degree[v] += edges[e].weight;
      factor[v] *= s;
      changed = true;
    }
    if (!changed) break;
    if (pass == n) throw NumericalError("degree regularization did not settle", 0.0);
  }

  // Weights that underflow to zero would drop the edge from the support.
  for (auto& e : edges) e.weight = std::max(e.weight, std::numeric_limits<double>::min());

  for (NodeId v = 0; v < n; ++v) {
    if (factor[v] < 1.0) {
      report.touched.push_back(v);
      report.scale_factors.push_back(factor[v]);
    }
  }
  Graph out(n, std::move(edges));
  report.max_degree_after = out.max_degree();
  report.over_budget = report.touched.size() > report.budget;
  if (report.over_budget)
    warn("degree regularization touched " + std::to_string(report.touched.size()) +
         " vertices, above the 10n/d budget of " + std::to_string(report.budget));
  return {std::move(out), std::move(report)};
}

/// Delete every edge incident to a vertex whose degree exceeds `threshold`.
/// Degrees are taken from the input graph; the vertex set is kept.
inline Graph remove_high_degree(const Graph& g, double threshold) {
  if (!(threshold > 0.0)) throw ParameterError("threshold must be positive");
  const auto degree = g.degrees();
  std::vector<Edge> kept;
  for (const auto& e : g.edges())
    if (degree[e.i] <= threshold && degree[e.j] <= threshold) kept.push_back(e);
  return Graph(g.size(), std::move(kept));
}

namespace detail {
inline Eigen::VectorXd inverse_sqrt(const std::vector<double>& d, double shift) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = d[i] + shift;
    s[static_cast<Eigen::Index>(i)] = v > 0.0 ? 1.0 / std::sqrt(v) : 0.0;
  }
  return s;
}
}  // namespace detail

/// D^{-1/2} A D^{-1/2}, with 0^{-1/2} taken as 0 so isolated vertices give
/// zero rows and columns.
inline SymmetricOperator laplacian(const Graph& g) {
  return SymmetricOperator::adjacency(g).scaled(detail::inverse_sqrt(g.degrees(), 0.0));
}

/// A + (tau/n) 11^T, kept matrix-free.
inline SymmetricOperator tau_regularize(const Graph& g, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  auto op = SymmetricOperator::adjacency(g);
  if (tau == 0.0 || g.size() == 0) return op;
  return op.plus_rank_one(tau / static_cast<double>(g.size()));
}

/// Degrees of A_tau, i.e. d_i + tau.
inline std::vector<double> regularized_degrees(const Graph& g, double tau) {
  auto d = g.degrees();
  for (auto& v : d) v += tau;
  return d;
}

/// L(A_tau) = D_tau^{-1/2} (A + (tau/n) 11^T) D_tau^{-1/2} with D_tau = D + tau I.
inline SymmetricOperator regularized_laplacian(const Graph& g, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  const auto d = g.degrees();
  if (tau == 0.0 && std::any_of(d.begin(), d.end(), [](double v) { return v <= 0.0; }))
    throw ParameterError("tau = 0 requires a graph without isolated vertices");
  return tau_regularize(g, tau).scaled(detail::inverse_sqrt(d, tau));
}

/// tau = rho * average degree. rho = 1 gives the plain average-degree choice.
inline double choose_tau(const Graph& g, double rho = 0.25) {
  if (!(rho > 0.0 && rho <= 1.0)) throw ParameterError("rho must lie in (0, 1]");
  const double dbar = g.average_degree();
  if (dbar == 0.0) warn("choose_tau: graph has no edges, returning tau = 0");
  return rho * dbar;
}

}  // namespace specgraph
