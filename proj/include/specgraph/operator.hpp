#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/error.hpp"
#include "specgraph/graph.hpp"
#include "specgraph/models.hpp"

namespace specgraph {

/// Matrix-free symmetric operator built from a small algebra of pieces:
///
///   M = sum_g  c_g * S_g ( sum_t  w_t * core_t ) S_g
///
/// where each core is a sparse graph, an explicit dense matrix, a structured
/// E[A], the all-ones matrix or the identity, and S_g is an optional diagonal
/// scaling. That covers A, A - E[A], A + (tau/n) 11^T, D^{-1/2} A D^{-1/2},
/// the regularized Laplacian and differences of Laplacians without ever
/// forming an n x n matrix. Cores are shared, so copies are cheap.
class SymmetricOperator {
 public:
  struct Ones {};
  struct Identity {};
  using Core = std::variant<std::shared_ptr<const Graph>, std::shared_ptr<const Eigen::MatrixXd>,
                            std::shared_ptr<const ExpectedMatrix>, Ones, Identity>;

  static SymmetricOperator zero(std::size_t n) { return SymmetricOperator(n); }

  static SymmetricOperator adjacency(Graph g) {
    const std::size_t n = g.size();
    return single(n, std::make_shared<const Graph>(std::move(g)));
  }

  static SymmetricOperator dense(Eigen::MatrixXd m, double symmetry_tol = 1e-10) {
    if (m.rows() != m.cols()) throw ParameterError("dense operator must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale)
      throw ParameterError("dense operator must be symmetric");
    const auto n = static_cast<std::size_t>(m.rows());
    return single(n, std::make_shared<const Eigen::MatrixXd>(std::move(m)));
  }

  static SymmetricOperator expected(ExpectedMatrix P) {
    const std::size_t n = P.size();
    return single(n, std::make_shared<const ExpectedMatrix>(std::move(P)));
  }

  /// gamma * 11^T
  static SymmetricOperator rank_one(std::size_t n, double gamma) { return single(n, Ones{}, gamma); }

  static SymmetricOperator identity(std::size_t n, double c = 1.0) { return single(n, Identity{}, c); }

  std::size_t size() const noexcept { return n_; }

  /// this + gamma * 11^T. Added inside the scaling when the operator is a
  /// single unscaled group, otherwise as its own group.
  SymmetricOperator plus_rank_one(double gamma) const { return *this + rank_one(n_, gamma); }

  SymmetricOperator minus_expected(ExpectedMatrix P) const { return *this - expected(std::move(P)); }

  /// diag(s) * this * diag(s).
  SymmetricOperator scaled(const Eigen::VectorXd& s) const {
    if (static_cast<std::size_t>(s.size()) != n_) throw ParameterError("scaling vector has wrong length");
    SymmetricOperator out = *this;
    for (auto& g : out.groups_) g.scale = g.scale ? Eigen::VectorXd(g.scale->cwiseProduct(s)) : s;
    return out;
  }

  friend SymmetricOperator operator+(const SymmetricOperator& a, const SymmetricOperator& b) {
    if (a.n_ != b.n_) throw ParameterError("operator sizes differ");
    SymmetricOperator out = a;
    if (out.groups_.size() == 1 && b.groups_.size() == 1 && !out.groups_[0].scale && !b.groups_[0].scale) {
      const double ca = out.groups_[0].coef, cb = b.groups_[0].coef;
      auto& terms = out.groups_[0].terms;
      for (auto& t : terms) t.weight *= ca;
      for (auto t : b.groups_[0].terms) {
        t.weight *= cb;
        terms.push_back(std::move(t));
      }
      out.groups_[0].coef = 1.0;
      return out;
    }
    out.groups_.insert(out.groups_.end(), b.groups_.begin(), b.groups_.end());
    return out;
  }

  friend SymmetricOperator operator*(double c, const SymmetricOperator& a) {
    SymmetricOperator out = a;
    for (auto& g : out.groups_) g.coef *= c;
    return out;
  }

  friend SymmetricOperator operator-(const SymmetricOperator& a, const SymmetricOperator& b) {
    return a + (-1.0) * b;
  }

  /// y = M x
  void apply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) const {
    y.setZero();
    Eigen::VectorXd z, inner(static_cast<Eigen::Index>(n_)), tmp(static_cast<Eigen::Index>(n_));
    for (const auto& g : groups_) {
      if (g.scale) z = g.scale->cwiseProduct(x);
      else z = x;
      inner.setZero();
      for (const auto& t : g.terms) {
        apply_core(t.core, z, tmp);
        inner += t.weight * tmp;
      }
      if (g.scale) y += g.coef * g.scale->cwiseProduct(inner);
      else y += g.coef * inner;
    }
  }

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(n_));
    apply(x, y);
    return y;
  }

  /// Dense materialization, for tests and small problems.
  Eigen::MatrixXd to_dense() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (const auto& g : groups_) {
      Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(n, n);
      for (const auto& t : g.terms) inner += t.weight * core_dense(t.core);
      if (g.scale) inner = g.scale->asDiagonal() * inner * g.scale->asDiagonal();
      M += g.coef * inner;
    }
    return M;
  }

 private:
  struct Term {
    Core core;
    double weight = 1.0;
  };
  struct Group {
    double coef = 1.0;
    std::optional<Eigen::VectorXd> scale;
    std::vector<Term> terms;
  };

  explicit SymmetricOperator(std::size_t n) : n_(n) {}

  static SymmetricOperator single(std::size_t n, Core core, double weight = 1.0) {
    SymmetricOperator op(n);
    op.groups_.push_back(Group{1.0, std::nullopt, {Term{std::move(core), weight}}});
    return op;
  }

  void apply_core(const Core& core, const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    std::visit(
        [&](const auto& c) {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, std::shared_ptr<const Graph>>) c->multiply(x, y);
          else if constexpr (std::is_same_v<C, std::shared_ptr<const Eigen::MatrixXd>>) y.noalias() = (*c) * x;
          else if constexpr (std::is_same_v<C, std::shared_ptr<const ExpectedMatrix>>) c->multiply(x, y);
          else if constexpr (std::is_same_v<C, Ones>) y.setConstant(x.sum());
          else y = x;
        },
        core);
  }

  Eigen::MatrixXd core_dense(const Core& core) const {
    const auto n = static_cast<Eigen::Index>(n_);
    return std::visit(
        [&](const auto& c) -> Eigen::MatrixXd {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, std::shared_ptr<const Graph>>) return c->to_dense();
          else if constexpr (std::is_same_v<C, std::shared_ptr<const Eigen::MatrixXd>>) return *c;
          else if constexpr (std::is_same_v<C, std::shared_ptr<const ExpectedMatrix>>) return c->to_dense();
          else if constexpr (std::is_same_v<C, Ones>) return Eigen::MatrixXd::Ones(n, n);
          else return Eigen::MatrixXd::Identity(n, n);
        },
        core);
  }

  std::size_t n_ = 0;
  std::vector<Group> groups_;
};

}  // namespace specgraph
