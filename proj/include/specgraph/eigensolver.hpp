#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/error.hpp"
#include "specgraph/operator.hpp"
#include "specgraph/rng.hpp"

namespace specgraph {

enum class Which { kLargestAlgebraic, kSmallestAlgebraic, kLargestMagnitude };

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;  ///< unit norm
};

struct SolverOptions {
  double tol = 1e-8;
  Seed seed = 0;
  /// Matrix-vector product budget; 0 means 10 * n.
  std::size_t max_matvecs = 0;
  /// Krylov basis size before a restart; 0 picks one from k.
  std::size_t basis_size = 0;
};

namespace detail {

using ApplyFn = std::function<void(const Eigen::Ref<const Eigen::VectorXd>&, Eigen::Ref<Eigen::VectorXd>)>;

/// Orthogonalize `x` against the first `cols` columns of `basis` (two passes of
/// classical Gram-Schmidt). Returns the norm left over.
inline double orthogonalize(const Eigen::MatrixXd& basis, Eigen::Index cols, Eigen::VectorXd& x) {
  for (int pass = 0; pass < 2; ++pass) {
    if (cols == 0) break;
    const Eigen::VectorXd h = basis.leftCols(cols).transpose() * x;
    x.noalias() -= basis.leftCols(cols) * h;
  }
  return x.norm();
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Stream& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

/// Thick-restart block Krylov method with explicit Rayleigh-Ritz. Keeps the
/// basis V orthonormal to working precision, stores M*V alongside it, and
/// restarts from the best Ritz vectors plus the residuals of the unconverged
/// ones. The block size equals k so an eigenvalue of multiplicity up to k is
/// captured from a random start.
inline std::vector<EigenPair> krylov_eigs(const ApplyFn& apply, Eigen::Index n, Eigen::Index k, bool by_magnitude,
                                          const SolverOptions& opt) {
  const Eigen::Index block = k;
  Eigen::Index m = opt.basis_size ? static_cast<Eigen::Index>(opt.basis_size) : std::max<Eigen::Index>(4 * k, k + 30);
  m = std::min(std::max(m, 2 * block), n);
  const std::size_t budget = opt.max_matvecs ? opt.max_matvecs : static_cast<std::size_t>(10 * n);

  Stream rng(derive_seed(opt.seed, {0x4b52594c}));
  Eigen::MatrixXd V(n, m), AV(n, m);
  Eigen::Index cols = 0;
  std::size_t matvecs = 0;

  std::vector<Eigen::VectorXd> pending;
  for (Eigen::Index b = 0; b < block; ++b) pending.push_back(random_vector(n, rng));

  double best_estimate = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd image(n);

  while (true) {
    // Expand the basis block by block.
    while (cols < m) {
      std::vector<Eigen::Index> added;
      for (auto& x : pending) {
        if (cols >= m) break;
        const double before = x.norm();
        double after = orthogonalize(V, cols, x);
        // A (near-)dependent direction means the Krylov space is exhausted
        // along it; continue with a fresh random direction instead.
        for (int tries = 0; (after <= 1e-10 * before || after == 0.0) && tries < 8; ++tries) {
          x = random_vector(n, rng);
          const double b2 = x.norm();
          after = orthogonalize(V, cols, x);
          if (after > 1e-8 * b2) break;
        }
        if (after == 0.0) continue;
        V.col(cols) = x / after;
        apply(V.col(cols), image);
        AV.col(cols) = image;
        ++matvecs;
        added.push_back(cols);
        ++cols;
      }
      pending.clear();
      if (added.empty()) {
        for (Eigen::Index b = 0; b < block; ++b) pending.push_back(random_vector(n, rng));
        if (cols >= n) break;
        continue;
      }
      for (auto c : added) pending.push_back(AV.col(c));
    }

    // Rayleigh-Ritz on span(V).
    Eigen::MatrixXd H = V.leftCols(cols).transpose() * AV.leftCols(cols);
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(H);
    const Eigen::VectorXd& theta = ritz.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(cols));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return by_magnitude ? std::abs(theta[a]) > std::abs(theta[b]) : theta[a] > theta[b];
    });

    const Eigen::Index keep = std::min<Eigen::Index>(cols, std::max<Eigen::Index>(k, std::min(m - block, k + (m - k) / 2)));
    Eigen::MatrixXd Y(cols, keep);
    for (Eigen::Index c = 0; c < keep; ++c) Y.col(c) = ritz.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    Eigen::MatrixXd U = V.leftCols(cols) * Y;
    Eigen::MatrixXd AU = AV.leftCols(cols) * Y;

    std::vector<double> residual(static_cast<std::size_t>(keep));
    bool converged = true;
    for (Eigen::Index c = 0; c < keep; ++c) {
      const double lambda = theta[order[static_cast<std::size_t>(c)]];
      residual[static_cast<std::size_t>(c)] = (AU.col(c) - lambda * U.col(c)).norm();
      if (c < k && residual[static_cast<std::size_t>(c)] > opt.tol * std::max(1.0, std::abs(lambda))) converged = false;
    }
    best_estimate = theta[order[0]];

    if (converged || cols >= n) {
      std::vector<EigenPair> out;
      for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::VectorXd u = U.col(c);
        u.normalize();
        out.push_back({theta[order[static_cast<std::size_t>(c)]], std::move(u)});
      }
      return out;
    }
    if (matvecs >= budget)
      throw NumericalError("eigensolver did not converge within " + std::to_string(budget) + " matrix-vector products",
                           best_estimate);

    // Restart: keep the leading Ritz vectors, continue from residual directions.
    V.leftCols(keep) = U;
    AV.leftCols(keep) = AU;
    cols = keep;
    pending.clear();
    for (Eigen::Index c = 0; c < keep && static_cast<Eigen::Index>(pending.size()) < block; ++c) {
      const double lambda = theta[order[static_cast<std::size_t>(c)]];
      if (residual[static_cast<std::size_t>(c)] <= opt.tol * std::max(1.0, std::abs(lambda))) continue;
      pending.push_back(AU.col(c) - lambda * U.col(c));
    }
    while (static_cast<Eigen::Index>(pending.size()) < block) pending.push_back(random_vector(n, rng));
  }
}

}  // namespace detail

/// Leading k eigenpairs of a symmetric operator, ordered by `which`
/// (descending value, ascending value, or descending magnitude). Residuals
/// satisfy ||Mv - lambda v|| <= tol * max(1, |lambda|). Vectors of a repeated
/// eigenvalue are some orthonormal basis of its eigenspace.
inline std::vector<EigenPair> top_eigs(const SymmetricOperator& op, std::size_t k, Which which,
                                       const SolverOptions& opt = {});

/// Largest |lambda|, certified by two independent random starts that agree to
/// within `tol`; falls back to power iteration when they do not.
inline double spectral_norm(const SymmetricOperator& op, double tol = 1e-8, Seed seed = 0);

namespace detail {

inline double power_iteration_norm(const SymmetricOperator& op, double tol, Seed seed, std::size_t budget,
                                   double warm_start_estimate) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Stream rng(derive_seed(seed, {0x504f574552}));
  Eigen::VectorXd v = random_vector(n, rng);
  v.normalize();
  Eigen::VectorXd w(n);
  double previous = 0.0, estimate = warm_start_estimate;
  // Two applications per step so a +/-lambda pair cannot make the estimate oscillate.
  for (std::size_t it = 0; 2 * it < budget; ++it) {
    op.apply(v, w);
    const double first = w.norm();
    if (first == 0.0) return std::isnan(estimate) ? 0.0 : std::max(0.0, estimate);
    v = w / first;
    op.apply(v, w);
    const double second = w.norm();
    if (second == 0.0) return 0.0;
    v = w / second;
    const double current = std::sqrt(first * second);
    estimate = std::isnan(estimate) ? current : std::max(estimate, current);
    if (it > 0 && std::abs(current - previous) <= tol * std::max(1e-300, current)) return estimate;
    previous = current;
  }
  throw NumericalError("power iteration did not converge", estimate);
}

}  // namespace detail

inline std::vector<EigenPair> top_eigs(const SymmetricOperator& op, std::size_t k, Which which,
                                       const SolverOptions& opt) {
  const std::size_t n = op.size();
  if (k < 1 || k > n) throw ParameterError("need 1 <= k <= n");
  if (!(opt.tol > 0.0)) throw ParameterError("tol must be positive");
  const auto nn = static_cast<Eigen::Index>(n);
  const auto kk = static_cast<Eigen::Index>(k);

  if (which == Which::kSmallestAlgebraic) {
    // Largest eigenvalues of c*I - M with c above the spectral radius.
    const double c = 1.01 * spectral_norm(op, 1e-6, opt.seed) + 1e-12;
    detail::ApplyFn shifted = [&](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) {
      op.apply(x, y);
      y = c * x - y;
    };
    // Residuals are shift invariant, but the stopping rule is relative to the
    // shifted eigenvalue (up to 2c); tighten so it still bounds tol*max(1,|lambda|).
    SolverOptions shifted_opt = opt;
    shifted_opt.tol = opt.tol / std::max(1.0, 2.0 * c);
    auto pairs = detail::krylov_eigs(shifted, nn, kk, false, shifted_opt);
    for (auto& p : pairs) p.value = c - p.value;
    return pairs;
  }
  detail::ApplyFn plain = [&](const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) {
    op.apply(x, y);
  };
  return detail::krylov_eigs(plain, nn, kk, which == Which::kLargestMagnitude, opt);
}

inline double spectral_norm(const SymmetricOperator& op, double tol, Seed seed) {
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  const std::size_t n = op.size();
  if (n == 0) return 0.0;
  SolverOptions opt;
  opt.tol = std::min(tol, 1e-6);
  double a = std::numeric_limits<double>::quiet_NaN(), b = a;
  try {
    opt.seed = derive_seed(seed, {1});
    a = std::abs(top_eigs(op, 1, Which::kLargestMagnitude, opt).front().value);
    opt.seed = derive_seed(seed, {2});
    b = std::abs(top_eigs(op, 1, Which::kLargestMagnitude, opt).front().value);
  } catch (const NumericalError& e) {
    if (std::isnan(a)) a = std::abs(e.best_estimate());
  }
  if (!std::isnan(b) && std::abs(a - b) <= tol * std::max({a, b, 1e-300})) return std::max(a, b);
  if (!std::isnan(b) && std::max(a, b) == 0.0) return 0.0;
  const std::size_t budget = std::max<std::size_t>(10 * n, 2000);
  return detail::power_iteration_norm(op, tol, seed, budget, std::max(a, std::isnan(b) ? 0.0 : b));
}

}  // namespace specgraph
