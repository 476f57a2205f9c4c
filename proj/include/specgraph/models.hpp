#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/error.hpp"
#include "specgraph/graph.hpp"
#include "specgraph/rng.hpp"

namespace specgraph {

// ---------------------------------------------------------------------------
// Model zoo
// ---------------------------------------------------------------------------

struct ErdosRenyi {
  double p = 0.0;
};

/// Balanced two-community model G(n, a/n, b/n).
struct PlantedPartition {
  double a = 0.0;
  double b = 0.0;
};

struct StochasticBlock {
  std::vector<double> pi;
  Eigen::MatrixXd B;
};

struct DegreeCorrectedBlock {
  std::vector<double> pi;
  Eigen::MatrixXd B;
  std::vector<double> theta;
};

/// Monotone non-increasing map from latent distance to an edge probability.
struct Kernel {
  std::string name;
  std::function<double(double)> fn;

  static Kernel exponential() {
    return {"exp", [](double r) { return std::exp(-r); }};
  }
  static Kernel inverse() {
    return {"inverse", [](double r) { return 1.0 / (1.0 + r); }};
  }
  static Kernel by_name(const std::string& name) {
    if (name == "exp") return exponential();
    if (name == "inverse") return inverse();
    throw ParameterError("unknown latent-space kernel '" + name + "'");
  }
};

struct LatentSpace {
  Eigen::MatrixXd positions;  // n x dim
  Kernel kernel = Kernel::exponential();
};

struct Inhomogeneous {
  Eigen::MatrixXd P;
};

using ModelSpec =
    std::variant<ErdosRenyi, PlantedPartition, StochasticBlock, DegreeCorrectedBlock, LatentSpace, Inhomogeneous>;

inline std::string model_name(const ModelSpec& spec) {
  static constexpr const char* names[] = {"er", "planted_partition", "sbm", "dcsbm", "lsm", "ierm"};
  return names[spec.index()];
}

// ---------------------------------------------------------------------------
// Expected adjacency matrix
// ---------------------------------------------------------------------------

/// E[A] with zero diagonal. Block models keep the (labels, B, theta) form so
/// products cost O(nK); latent-space and inhomogeneous models are dense.
class ExpectedMatrix {
 public:
  /// `community` is 0-based here.
  static ExpectedMatrix block(std::vector<int> community, Eigen::MatrixXd B,
                              std::optional<Eigen::VectorXd> theta = std::nullopt) {
    ExpectedMatrix m;
    m.n_ = community.size();
    m.community_ = std::move(community);
    m.B_ = std::move(B);
    m.theta_ = std::move(theta);
    m.members_.assign(static_cast<std::size_t>(m.B_.rows()), {});
    for (std::size_t i = 0; i < m.n_; ++i) {
      const int c = m.community_[i];
      if (c < 0 || c >= m.B_.rows()) throw ParameterError("community index out of range");
      m.members_[static_cast<std::size_t>(c)].push_back(static_cast<NodeId>(i));
    }
    if (m.theta_ && static_cast<std::size_t>(m.theta_->size()) != m.n_)
      throw ParameterError("theta must have one entry per node");
    return m;
  }

  static ExpectedMatrix dense(Eigen::MatrixXd P) {
    if (P.rows() != P.cols()) throw ParameterError("expected matrix must be square");
    P.diagonal().setZero();
    ExpectedMatrix m;
    m.n_ = static_cast<std::size_t>(P.rows());
    m.dense_ = std::move(P);
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  bool is_block() const noexcept { return !dense_.has_value(); }
  int num_blocks() const noexcept { return static_cast<int>(B_.rows()); }
  const std::vector<int>& communities() const noexcept { return community_; }
  const Eigen::MatrixXd& block_matrix() const noexcept { return B_; }
  const std::vector<std::vector<NodeId>>& members() const noexcept { return members_; }

  double theta(std::size_t i) const noexcept {
    return theta_ ? (*theta_)[static_cast<Eigen::Index>(i)] : 1.0;
  }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (dense_) return (*dense_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return theta(i) * theta(j) * B_(community_[i], community_[j]);
  }

  /// y = E[A] x.
  void multiply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) const {
    if (dense_) {
      y.noalias() = (*dense_) * x;
      return;
    }
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(B_.rows());
    for (std::size_t j = 0; j < n_; ++j) sums[community_[j]] += theta(j) * x[static_cast<Eigen::Index>(j)];
    const Eigen::VectorXd mixed = B_ * sums;
    for (std::size_t i = 0; i < n_; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const int c = community_[i];
      const double t = theta(i);
      y[ii] = t * mixed[c] - t * t * B_(c, c) * x[ii];
    }
  }

  Eigen::VectorXd row_sums() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(n_));
    multiply(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n_)), y);
    return y;
  }

  /// Sum over j of E[A]_ij^2 for each row.
  Eigen::VectorXd row_square_sums() const {
    const auto n = static_cast<Eigen::Index>(n_);
    if (dense_) return dense_->rowwise().squaredNorm();
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(B_.rows());
    for (std::size_t j = 0; j < n_; ++j) sq[community_[j]] += theta(j) * theta(j);
    const Eigen::MatrixXd B2 = B_.cwiseAbs2();
    const Eigen::VectorXd mixed = B2 * sq;
    Eigen::VectorXd out(n);
    for (std::size_t i = 0; i < n_; ++i) {
      const int c = community_[i];
      const double t2 = theta(i) * theta(i);
      out[static_cast<Eigen::Index>(i)] = t2 * mixed[c] - t2 * t2 * B2(c, c);
    }
    return out;
  }

  /// Largest off-diagonal entry.
  double max_entry() const {
    if (n_ < 2) return 0.0;
    if (dense_) return dense_->maxCoeff();
    // Per community: the two largest theta values (distinct nodes).
    const auto K = static_cast<std::size_t>(B_.rows());
    std::vector<double> top1(K, -1.0), top2(K, -1.0);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto c = static_cast<std::size_t>(community_[i]);
      const double t = theta(i);
      if (t > top1[c]) {
        top2[c] = top1[c];
        top1[c] = t;
      } else if (t > top2[c]) {
        top2[c] = t;
      }
    }
    double best = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
      for (std::size_t d = c; d < K; ++d) {
        const double tc = top1[c];
        const double td = (c == d) ? top2[c] : top1[d];
        if (tc < 0.0 || td < 0.0) continue;
        best = std::max(best, tc * td * B_(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(d)));
      }
    }
    return best;
  }

  Eigen::MatrixXd to_dense() const {
    if (dense_) return *dense_;
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        P(i, j) = (*this)(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return P;
  }

 private:
  ExpectedMatrix() = default;

  std::size_t n_ = 0;
  std::vector<int> community_;
  Eigen::MatrixXd B_;
  std::optional<Eigen::VectorXd> theta_;
  std::vector<std::vector<NodeId>> members_;
  std::optional<Eigen::MatrixXd> dense_;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError(std::string(what) + " must lie in [0, 1]");
}

inline void check_block_params(const std::vector<double>& pi, const Eigen::MatrixXd& B) {
  if (B.rows() < 1 || B.rows() != B.cols()) throw ParameterError("B must be a non-empty square matrix");
  if (static_cast<Eigen::Index>(pi.size()) != B.rows()) throw ParameterError("pi and B disagree on K");
  double total = 0.0;
  for (double w : pi) {
    if (!(w >= 0.0)) throw ParameterError("pi entries must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("pi must sum to 1");
  for (Eigen::Index r = 0; r < B.rows(); ++r)
    for (Eigen::Index c = 0; c < B.cols(); ++c) {
      check_probability(B(r, c), "B entries");
      if (std::abs(B(r, c) - B(c, r)) > 1e-12) throw ParameterError("B must be symmetric");
    }
}

inline void check_dense_probabilities(const Eigen::MatrixXd& P) {
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    if (P(i, i) != 0.0) throw ParameterError("P must have a zero diagonal");
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      check_probability(P(i, j), "P entries");
      if (std::abs(P(i, j) - P(j, i)) > 1e-12) throw ParameterError("P must be symmetric");
    }
  }
}

inline std::vector<int> to_zero_based(const LabelVector& labels, int K) {
  std::vector<int> c(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > K)
      throw ParameterError("label " + std::to_string(labels[i]) + " out of range 1.." + std::to_string(K));
    c[i] = labels[i] - 1;
  }
  return c;
}

inline LabelVector balanced_split(std::size_t n) {
  LabelVector labels(n, 2);
  std::fill_n(labels.begin(), (n + 1) / 2, 1);
  return labels;
}

inline Eigen::MatrixXd latent_probabilities(const LatentSpace& lsm) {
  const Eigen::Index n = lsm.positions.rows();
  if (!lsm.kernel.fn) throw ParameterError("latent-space kernel is empty");
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = (lsm.positions.row(i) - lsm.positions.row(j)).norm();
      const double p = lsm.kernel.fn(r);
      check_probability(p, "kernel values");
      P(i, j) = P(j, i) = p;
    }
  return P;
}

inline Eigen::MatrixXd planted_block_matrix(const PlantedPartition& pp, std::size_t n) {
  const double nn = static_cast<double>(n);
  Eigen::MatrixXd B(2, 2);
  B << pp.a / nn, pp.b / nn, pp.b / nn, pp.a / nn;
  return B;
}

}  // namespace detail

/// Checks every invariant that does not depend on labels.
inline void validate(const ModelSpec& spec, std::size_t n) {
  std::visit(
      [n](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ErdosRenyi>) {
          detail::check_probability(m.p, "p");
        } else if constexpr (std::is_same_v<M, PlantedPartition>) {
          if (!(m.a >= 0.0) || !(m.b >= 0.0)) throw ParameterError("a and b must be non-negative");
          detail::check_probability(m.a / static_cast<double>(n), "a/n");
          detail::check_probability(m.b / static_cast<double>(n), "b/n");
        } else if constexpr (std::is_same_v<M, StochasticBlock>) {
          detail::check_block_params(m.pi, m.B);
        } else if constexpr (std::is_same_v<M, DegreeCorrectedBlock>) {
          detail::check_block_params(m.pi, m.B);
          if (m.theta.size() != n) throw ParameterError("theta must have one entry per node");
          for (double t : m.theta)
            if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("theta entries must be positive");
        } else if constexpr (std::is_same_v<M, LatentSpace>) {
          if (static_cast<std::size_t>(m.positions.rows()) != n)
            throw ParameterError("positions must have one row per node");
          if (!m.kernel.fn) throw ParameterError("latent-space kernel is empty");
        } else if constexpr (std::is_same_v<M, Inhomogeneous>) {
          if (static_cast<std::size_t>(m.P.rows()) != n || m.P.cols() != m.P.rows())
            throw ParameterError("P must be n x n");
          detail::check_dense_probabilities(m.P);
        }
      },
      spec);
}

/// E[A] given node labels. Models without communities ignore the label values
/// but still require one label per node.
inline ExpectedMatrix expected_matrix(const ModelSpec& spec, const LabelVector& labels) {
  const std::size_t n = labels.size();
  validate(spec, n);
  return std::visit(
      [&](const auto& m) -> ExpectedMatrix {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ErdosRenyi>) {
          return ExpectedMatrix::block(std::vector<int>(n, 0), Eigen::MatrixXd::Constant(1, 1, m.p));
        } else if constexpr (std::is_same_v<M, PlantedPartition>) {
          return ExpectedMatrix::block(detail::to_zero_based(labels, 2), detail::planted_block_matrix(m, n));
        } else if constexpr (std::is_same_v<M, StochasticBlock>) {
          return ExpectedMatrix::block(detail::to_zero_based(labels, static_cast<int>(m.B.rows())), m.B);
        } else if constexpr (std::is_same_v<M, DegreeCorrectedBlock>) {
          Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(m.theta.data(), static_cast<Eigen::Index>(n));
          auto P = ExpectedMatrix::block(detail::to_zero_based(labels, static_cast<int>(m.B.rows())), m.B,
                                         std::move(theta));
          if (P.max_entry() > 1.0 + 1e-12) throw ParameterError("theta_i * theta_j * B exceeds 1");
          return P;
        } else if constexpr (std::is_same_v<M, LatentSpace>) {
          return ExpectedMatrix::dense(detail::latent_probabilities(m));
        } else {
          return ExpectedMatrix::dense(m.P);
        }
      },
      spec);
}

struct ExpectedDegree {
  double row_sum_max = 0.0;  ///< max_i sum_j P_ij
  double entry_max = 0.0;    ///< n * max_ij P_ij
};

inline ExpectedDegree max_expected_degree(const ExpectedMatrix& P) {
  const Eigen::VectorXd rows = P.row_sums();
  return {rows.size() ? rows.maxCoeff() : 0.0, static_cast<double>(P.size()) * P.max_entry()};
}

/// Label-free version. Exact for ER, planted partition, latent-space and
/// inhomogeneous models. SBM and DCSBM use expected community sizes n*pi_c
/// (and, for DCSBM, max theta times mean theta), since the realized labels are
/// not known; pass an ExpectedMatrix for the exact value.
inline ExpectedDegree max_expected_degree(const ModelSpec& spec, std::size_t n) {
  validate(spec, n);
  const double nn = static_cast<double>(n);
  return std::visit(
      [&](const auto& m) -> ExpectedDegree {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, ErdosRenyi>) {
          return {n ? (nn - 1.0) * m.p : 0.0, n > 1 ? nn * m.p : 0.0};
        } else if constexpr (std::is_same_v<M, PlantedPartition>) {
          return max_expected_degree(expected_matrix(m, detail::balanced_split(n)));
        } else if constexpr (std::is_same_v<M, StochasticBlock> || std::is_same_v<M, DegreeCorrectedBlock>) {
          double tmax = 1.0, tmean = 1.0;
          if constexpr (std::is_same_v<M, DegreeCorrectedBlock>) {
            tmax = *std::max_element(m.theta.begin(), m.theta.end());
            tmean = std::accumulate(m.theta.begin(), m.theta.end(), 0.0) / nn;
          }
          ExpectedDegree out;
          const auto K = m.B.rows();
          for (Eigen::Index k = 0; k < K; ++k) {
            if (m.pi[static_cast<std::size_t>(k)] <= 0.0) continue;
            double row = 0.0;
            for (Eigen::Index c = 0; c < K; ++c) row += nn * m.pi[static_cast<std::size_t>(c)] * m.B(k, c);
            out.row_sum_max = std::max(out.row_sum_max, tmax * tmean * (row - m.B(k, k)));
            for (Eigen::Index c = 0; c < K; ++c)
              if (m.pi[static_cast<std::size_t>(c)] > 0.0) out.entry_max = std::max(out.entry_max, nn * m.B(k, c));
          }
          out.entry_max *= tmax * tmax;
          return out;
        } else {
          return max_expected_degree(expected_matrix(m, LabelVector(n, 1)));
        }
      },
      spec);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct Sample {
  Graph graph;
  LabelVector labels;
};

namespace detail {

inline constexpr std::uint64_t kRowStreamTag = 0x524f57;
inline constexpr std::uint64_t kLabelStreamTag = 0x4c4142;

/// Independent Bernoulli(P_ij) for every j > i, skipping geometrically within
/// each community. For degree-corrected blocks the envelope theta_i*max(theta)*B
/// is thinned by theta_j / max(theta).
inline void sample_block_row(const ExpectedMatrix& P, std::size_t i, const std::vector<double>& theta_max,
                             Stream& rng, std::vector<Edge>& out) {
  const int ci = P.communities()[i];
  const double ti = P.theta(i);
  const auto& members = P.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto& list = members[c];
    const auto first = std::upper_bound(list.begin(), list.end(), static_cast<NodeId>(i));
    const auto count = static_cast<std::size_t>(list.end() - first);
    if (count == 0) continue;
    const double b = P.block_matrix()(ci, static_cast<Eigen::Index>(c));
    const double envelope = std::min(1.0, ti * theta_max[c] * b);
    if (envelope <= 0.0) continue;
    const bool thinned = P.theta(i) != 1.0 || theta_max[c] != 1.0;
    auto visit = [&](std::size_t pos) {
      const NodeId j = *(first + static_cast<std::ptrdiff_t>(pos));
      if (thinned) {
        const double actual = ti * P.theta(j) * b;
        if (actual < envelope && !rng.bernoulli(actual / envelope)) return;
      }
      out.push_back({static_cast<NodeId>(i), j, 1.0});
    };
    if (envelope >= 1.0) {
      for (std::size_t pos = 0; pos < count; ++pos) visit(pos);
      continue;
    }
    const double log1m = std::log1p(-envelope);
    std::size_t pos = 0;
    while (true) {
      const std::uint64_t skip = rng.geometric_skip(log1m);
      if (skip >= count - pos) break;
      pos += static_cast<std::size_t>(skip);
      visit(pos);
      ++pos;
      if (pos >= count) break;
    }
  }
}

inline Graph sample_from_expected(const ExpectedMatrix& P, Seed seed) {
  const std::size_t n = P.size();
  std::vector<Edge> edges;
  if (P.is_block()) {
    std::vector<double> theta_max(P.members().size(), 0.0);
    for (std::size_t c = 0; c < theta_max.size(); ++c)
      for (NodeId j : P.members()[c]) theta_max[c] = std::max(theta_max[c], P.theta(j));
    for (std::size_t i = 0; i < n; ++i) {
      Stream rng(derive_seed(seed, {kRowStreamTag, i}));
      sample_block_row(P, i, theta_max, rng, edges);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      Stream rng(derive_seed(seed, {kRowStreamTag, i}));
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.bernoulli(P(i, j))) edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
    }
  }
  return Graph(n, std::move(edges));
}

inline LabelVector draw_labels(const std::vector<double>& pi, std::size_t n, Seed seed) {
  Stream rng(derive_seed(seed, {kLabelStreamTag}));
  std::vector<double> cumulative(pi.size());
  std::partial_sum(pi.begin(), pi.end(), cumulative.begin());
  LabelVector labels(n);
  for (auto& c : labels) {
    const double u = rng.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    // upper_bound never lands on a zero-mass community; the guard covers rounding at the top.
    if (it == cumulative.end()) it = std::prev(cumulative.end());
    c = static_cast<int>(it - cumulative.begin()) + 1;
  }
  return labels;
}

}  // namespace detail

/// Labels and E[A] for a spec at size n: planted partition uses the balanced
/// split (first ceil(n/2) nodes in community 1); SBM/DCSBM draw i.i.d. labels
/// from pi; other models label every node 1.
inline std::pair<LabelVector, ExpectedMatrix> realize_expectation(const ModelSpec& spec, std::size_t n, Seed seed) {
  validate(spec, n);
  LabelVector labels = std::visit(
      [&](const auto& m) -> LabelVector {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, PlantedPartition>) return detail::balanced_split(n);
        else if constexpr (std::is_same_v<M, StochasticBlock> || std::is_same_v<M, DegreeCorrectedBlock>)
          return detail::draw_labels(m.pi, n, seed);
        else
          return LabelVector(n, 1);
      },
      spec);
  auto P = expected_matrix(spec, labels);
  return {std::move(labels), std::move(P)};
}

/// Draw A with independent Bernoulli(P_ij) entries above the diagonal. Each
/// row's randomness comes from its own stream keyed by (seed, row), so the
/// result depends only on (spec, n, seed).
inline Sample sample(const ModelSpec& spec, std::size_t n, Seed seed) {
  if (n < 1) throw ParameterError("n must be at least 1");
  auto [labels, P] = realize_expectation(spec, n, seed);
  return {detail::sample_from_expected(P, seed), std::move(labels)};
}

}  // namespace specgraph
