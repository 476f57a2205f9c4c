#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/eigensolver.hpp"
#include "specgraph/error.hpp"
#include "specgraph/graph.hpp"
#include "specgraph/operator.hpp"
#include "specgraph/rng.hpp"

namespace specgraph {

/// Label 1 where v_i >= 0, label 2 where v_i < 0.
inline LabelVector sign_partition(std::span<const double> v) {
  LabelVector labels(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) labels[i] = v[i] < 0.0 ? 2 : 1;
  return labels;
}

inline LabelVector sign_partition(const Eigen::VectorXd& v) {
  return sign_partition(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

struct KMeansOptions {
  int restarts = 20;
  int max_iterations = 200;
  Seed seed = 0;
};

struct KMeansResult {
  LabelVector labels;  ///< 1..K
  Eigen::MatrixXd centers;
  double inertia = 0.0;
};

namespace detail {

inline KMeansResult kmeans_once(const Eigen::MatrixXd& points, int K, int max_iterations, Stream& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(K, points.cols());
  // k-means++ seeding.
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < K; ++c) {
    const double total = dist2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (pick = 0; pick < n - 1; ++pick) {
        u -= dist2[pick];
        if (u < 0.0) break;
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(c) = points.row(pick);
    dist2 = dist2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool moved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < K; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        moved = true;
      }
    }
    if (!moved) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(K), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < K; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
  }

  KMeansResult out;
  out.labels.resize(static_cast<std::size_t>(n));
  out.centers = centers;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = assign[static_cast<std::size_t>(i)];
    out.labels[static_cast<std::size_t>(i)] = c + 1;
    out.inertia += (points.row(i) - centers.row(c)).squaredNorm();
  }
  return out;
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding; the best of `restarts` runs by
/// inertia. Each restart has its own stream so the result is fixed by the seed.
inline KMeansResult kmeans(const Eigen::MatrixXd& points, int K, const KMeansOptions& opt = {}) {
  if (K < 1) throw ParameterError("K must be at least 1");
  if (points.rows() < K) throw ParameterError("need at least K points");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    Stream rng(derive_seed(opt.seed, {0x4b4d, static_cast<std::uint64_t>(r)}));
    auto result = detail::kmeans_once(points, K, opt.max_iterations, rng);
    if (result.inertia < best.inertia) best = std::move(result);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

namespace detail {

/// Maximum-weight perfect matching on a square matrix (Hungarian algorithm,
/// shortest augmenting path form). Returns column assigned to each row.
inline std::vector<int> hungarian_max(const Eigen::MatrixXd& weight) {
  const int K = static_cast<int>(weight.rows());
  const double big = weight.cwiseAbs().maxCoeff();
  // Minimize cost = big - weight; 1-based arrays with a sentinel row/col 0.
  std::vector<double> u(static_cast<std::size_t>(K + 1), 0.0), v(static_cast<std::size_t>(K + 1), 0.0);
  std::vector<int> match(static_cast<std::size_t>(K + 1), 0), way(static_cast<std::size_t>(K + 1), 0);
  for (int row = 1; row <= K; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(K + 1), std::numeric_limits<double>::infinity());
    std::vector<char> used(static_cast<std::size_t>(K + 1), 0);
    do {
      used[static_cast<std::size_t>(col0)] = 1;
      const int r0 = match[static_cast<std::size_t>(col0)];
      double delta = std::numeric_limits<double>::infinity();
      int col1 = 0;
      for (int col = 1; col <= K; ++col) {
        if (used[static_cast<std::size_t>(col)]) continue;
        const double cost = big - weight(r0 - 1, col - 1);
        const double cur = cost - u[static_cast<std::size_t>(r0)] - v[static_cast<std::size_t>(col)];
        if (cur < minv[static_cast<std::size_t>(col)]) {
          minv[static_cast<std::size_t>(col)] = cur;
          way[static_cast<std::size_t>(col)] = col0;
        }
        if (minv[static_cast<std::size_t>(col)] < delta) {
          delta = minv[static_cast<std::size_t>(col)];
          col1 = col;
        }
      }
      for (int col = 0; col <= K; ++col) {
        if (used[static_cast<std::size_t>(col)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(col)])] += delta;
          v[static_cast<std::size_t>(col)] -= delta;
        } else {
          minv[static_cast<std::size_t>(col)] -= delta;
        }
      }
      col0 = col1;
    } while (match[static_cast<std::size_t>(col0)] != 0);
    do {
      const int col1 = way[static_cast<std::size_t>(col0)];
      match[static_cast<std::size_t>(col0)] = match[static_cast<std::size_t>(col1)];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(K), -1);
  for (int col = 1; col <= K; ++col) assignment[static_cast<std::size_t>(match[static_cast<std::size_t>(col)] - 1)] = col - 1;
  return assignment;
}

/// Exhaustive search over permutations; K <= 8 keeps this under 40320 cases.
inline double best_permutation_agreement(const Eigen::MatrixXd& confusion) {
  const int K = static_cast<int>(confusion.rows());
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  do {
    double s = 0.0;
    for (int r = 0; r < K; ++r) s += confusion(r, perm[static_cast<std::size_t>(r)]);
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Eigen::MatrixXd confusion_matrix(const LabelVector& estimate, const LabelVector& truth, int K) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (estimate[i] < 1 || truth[i] < 1) throw ParameterError("labels must be >= 1");
    c(estimate[i] - 1, truth[i] - 1) += 1.0;
  }
  return c;
}

}  // namespace detail

/// Fraction of nodes mislabeled, minimized over relabelings of `estimate`.
inline double misclassification_rate(const LabelVector& estimate, const LabelVector& truth) {
  if (estimate.size() != truth.size()) throw ParameterError("label vectors differ in length");
  if (truth.empty()) return 0.0;
  const int K = std::max(num_communities(estimate), num_communities(truth));
  const Eigen::MatrixXd confusion = detail::confusion_matrix(estimate, truth, K);
  double agree = 0.0;
  if (K <= 8) {
    agree = detail::best_permutation_agreement(confusion);
  } else {
    const auto assignment = detail::hungarian_max(confusion);
    for (int r = 0; r < K; ++r) agree += confusion(r, assignment[static_cast<std::size_t>(r)]);
  }
  return 1.0 - agree / static_cast<double>(truth.size());
}

// ---------------------------------------------------------------------------
// Spectral clustering
// ---------------------------------------------------------------------------

enum class ClusterMode {
  kAdjacencySecondSmallest,  ///< sign of the eigenvector of the 2nd smallest eigenvalue
  kSecondLargest,            ///< sign of the eigenvector of the 2nd largest eigenvalue
  kTopKEmbedding,            ///< k-means on rows of the K leading eigenvectors
};

struct ClusterOptions {
  Seed seed = 0;
  double tol = 1e-8;
  KMeansOptions kmeans = {};
};

/// Eigenvector behind a sign-based bisection.
inline Eigen::VectorXd bisection_vector(const SymmetricOperator& op, ClusterMode mode, const ClusterOptions& opt = {}) {
  SolverOptions solver;
  solver.tol = opt.tol;
  solver.seed = opt.seed;
  const Which which = mode == ClusterMode::kAdjacencySecondSmallest ? Which::kSmallestAlgebraic : Which::kLargestAlgebraic;
  auto pairs = top_eigs(op, 2, which, solver);
  return pairs[1].vector;
}

inline LabelVector spectral_cluster(const SymmetricOperator& op, int K, ClusterMode mode,
                                    const ClusterOptions& opt = {}) {
  if (K < 2) throw ParameterError("spectral clustering needs K >= 2");
  if (static_cast<std::size_t>(K) > op.size()) throw ParameterError("K exceeds the number of nodes");
  if (mode != ClusterMode::kTopKEmbedding) {
    if (K != 2) throw ParameterError("sign-based modes produce exactly two communities");
    return sign_partition(bisection_vector(op, mode, opt));
  }
  SolverOptions solver;
  solver.tol = opt.tol;
  solver.seed = opt.seed;
  auto pairs = top_eigs(op, static_cast<std::size_t>(K), Which::kLargestAlgebraic, solver);
  Eigen::MatrixXd embedding(static_cast<Eigen::Index>(op.size()), K);
  for (int c = 0; c < K; ++c) embedding.col(c) = pairs[static_cast<std::size_t>(c)].vector;
  KMeansOptions km = opt.kmeans;
  km.seed = derive_seed(opt.seed, {0x454d42});
  return kmeans(embedding, K, km).labels;
}

inline std::string to_string(ClusterMode mode) {
  switch (mode) {
    case ClusterMode::kAdjacencySecondSmallest: return "second-smallest";
    case ClusterMode::kSecondLargest: return "second-largest";
    case ClusterMode::kTopKEmbedding: return "top-k-embedding";
  }
  return "?";
}

}  // namespace specgraph
