#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/error.hpp"

namespace specgraph {

using NodeId = std::uint32_t;

/// Community assignment per node, values in 1..K.
using LabelVector = std::vector<int>;

struct Edge {
  NodeId i;
  NodeId j;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  NodeId node;
  double weight;
};

/// Undirected weighted graph with zero diagonal. The upper triangle is stored
/// as a sorted edge list; a symmetric CSR copy gives O(deg) row access.
class Graph {
 public:
  Graph() = default;

  explicit Graph(std::size_t n) : n_(n), offsets_(n + 1, 0) {}

  /// Edges may be given with i > j; they are normalized to i < j. Self-loops,
  /// duplicates, out-of-range endpoints and non-positive weights are rejected.
  Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (auto& e : edges_) {
      if (e.i == e.j) throw ParameterError("self-loop at node " + std::to_string(e.i));
      if (e.i > e.j) std::swap(e.i, e.j);
      if (e.j >= n_) throw ParameterError("edge endpoint " + std::to_string(e.j) + " out of range");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw ParameterError("edge weight must be positive and finite");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    for (std::size_t k = 1; k < edges_.size(); ++k) {
      if (edges_[k].i == edges_[k - 1].i && edges_[k].j == edges_[k - 1].j)
        throw ParameterError("duplicate edge (" + std::to_string(edges_[k].i) + ", " +
                             std::to_string(edges_[k].j) + ")");
    }
    build_rows();
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::span<const Neighbor> neighbors(std::size_t i) const noexcept {
    if (adjacency_.empty()) return {};
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }

  /// Weighted degree (row sum).
  double degree(std::size_t i) const noexcept {
    double s = 0.0;
    for (const auto& nb : neighbors(i)) s += nb.weight;
    return s;
  }

  std::vector<double> degrees() const {
    std::vector<double> d(n_, 0.0);
    for (const auto& e : edges_) {
      d[e.i] += e.weight;
      d[e.j] += e.weight;
    }
    return d;
  }

  double max_degree() const {
    const auto d = degrees();
    return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
  }

  /// Average weighted degree 2*sum(w)/n.
  double average_degree() const {
    if (n_ == 0) return 0.0;
    double s = 0.0;
    for (const auto& e : edges_) s += e.weight;
    return 2.0 * s / static_cast<double>(n_);
  }

  /// y = A x.
  void multiply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (const auto& nb : neighbors(i)) s += nb.weight * x[nb.node];
      y[static_cast<Eigen::Index>(i)] = s;
    }
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (const auto& e : edges_) {
      m(e.i, e.j) = e.weight;
      m(e.j, e.i) = e.weight;
    }
    return m;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

 private:
  void build_rows() {
    offsets_.assign(n_ + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.i + 1];
      ++offsets_[e.j + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    // Lower neighbors first, then upper; both passes walk the sorted edge list,
    // so every row comes out sorted by neighbor id.
    for (const auto& e : edges_) adjacency_[fill[e.j]++] = {e.i, e.weight};
    for (const auto& e : edges_) adjacency_[fill[e.i]++] = {e.j, e.weight};
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_ = {0};
  std::vector<Neighbor> adjacency_;
};

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// TSV edge list: `# n=<n>` header, then `i<TAB>j<TAB>weight` with i < j, 0-indexed.
inline void write_graph_tsv(std::ostream& out, const Graph& g) {
  out << "# n=" << g.size() << '\n';
  for (const auto& e : g.edges()) out << e.i << '\t' << e.j << '\t' << format_double(e.weight) << '\n';
}

inline Graph read_graph_tsv(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!have_header && line.rfind("# n=", 0) == 0) {
        try {
          std::size_t pos = 0;
          n = std::stoull(line.substr(4), &pos);
          if (pos != line.size() - 4) throw ParameterError("bad header");
        } catch (const std::exception&) {
          throw ParameterError("malformed header on line " + std::to_string(lineno));
        }
        have_header = true;
      }
      continue;
    }
    if (!have_header) throw ParameterError("missing '# n=<n>' header before edges");
    std::istringstream fields(line);
    long long i = -1, j = -1;
    double w = 1.0;
    std::string extra;
    if (!(fields >> i >> j >> w) || (fields >> extra) || i < 0 || j < 0)
      throw ParameterError("malformed edge on line " + std::to_string(lineno));
    if (i >= j) throw ParameterError("edge on line " + std::to_string(lineno) + " must have i < j");
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), w});
  }
  if (!have_header) throw ParameterError("missing '# n=<n>' header");
  return Graph(n, std::move(edges));
}

inline void write_labels(std::ostream& out, const LabelVector& labels) {
  for (int c : labels) out << c << '\n';
}

inline LabelVector read_labels(std::istream& in) {
  LabelVector labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t pos = 0;
    int c = 0;
    try {
      c = std::stoi(line, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != line.size() || c < 1) throw ParameterError("bad label on line " + std::to_string(lineno));
    labels.push_back(c);
  }
  return labels;
}

/// Number of communities, i.e. the largest label.
inline int num_communities(const LabelVector& labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

}  // namespace specgraph
