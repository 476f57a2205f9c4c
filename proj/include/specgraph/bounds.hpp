#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/error.hpp"
#include "specgraph/graph.hpp"
#include "specgraph/models.hpp"

namespace specgraph {

// Every hidden absolute constant is an explicit parameter `C`, default 1.

/// Asymptotic edge of the spectrum of A - E[A] for G(n, d/n): 2 sqrt(d).
inline double bai_yin_limit(double d) {
  if (!(d >= 0.0)) throw ParameterError("d must be non-negative");
  return 2.0 * std::sqrt(d);
}

/// Matrix Bernstein tail: min(1, 2n exp(-(t^2/2) / (sigma2 + K t / 3))).
inline double bernstein_tail(double sigma2, double K, double n, double t) {
  if (!(sigma2 >= 0.0) || !(K > 0.0) || !(t >= 0.0) || !(n >= 1.0))
    throw ParameterError("bernstein_tail needs sigma2 >= 0, K > 0, n >= 1, t >= 0");
  if (t == 0.0) return 1.0;
  const double exponent = -(t * t / 2.0) / (sigma2 + K * t / 3.0);
  return std::min(1.0, 2.0 * n * std::exp(exponent));
}

/// Expected-norm form: C (sigma sqrt(log n) + K log n).
inline double bernstein_expectation(double sigma, double K, double n, double C = 1.0) {
  if (!(sigma >= 0.0) || !(K >= 0.0) || !(C >= 0.0) || !(n >= 2.0))
    throw ParameterError("bernstein_expectation needs non-negative inputs and n >= 2");
  const double L = std::log(n);
  return C * (sigma * std::sqrt(L) + K * L);
}

/// C (max_i sqrt(sum_j sigma_ij^2) + sqrt(log n) max_ij K_ij).
inline double bvh_bound(const Eigen::MatrixXd& variances, const Eigen::MatrixXd& sup_bounds, double C = 1.0) {
  if (variances.rows() != variances.cols() || sup_bounds.rows() != variances.rows() ||
      sup_bounds.cols() != variances.cols())
    throw ParameterError("bvh_bound needs two n x n matrices of the same shape");
  const Eigen::Index n = variances.rows();
  if (n == 0) return 0.0;
  const double row = std::sqrt(variances.rowwise().sum().maxCoeff());
  const double log_n = n > 1 ? std::log(static_cast<double>(n)) : 0.0;
  return C * (row + std::sqrt(log_n) * sup_bounds.maxCoeff());
}

/// Homogeneous entries off the diagonal: every sigma_ij^2 = sigma2, K_ij = K.
inline double bvh_bound_uniform(double sigma2, double K, std::size_t n, double C = 1.0) {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n);
  return C * (std::sqrt((nn - 1.0) * sigma2) + (n > 1 ? std::sqrt(std::log(nn)) : 0.0) * K);
}

/// Largest column norm of A.
inline double seginer_stat(const Graph& g) {
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = 0.0;
    for (const auto& nb : g.neighbors(i)) s += nb.weight * nb.weight;
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

/// Largest column norm of A - E[A], computed without forming E[A]:
/// ||col_i||^2 = sum_j P_ij^2 + sum_{j ~ i} (w_ij^2 - 2 w_ij P_ij).
inline double seginer_stat(const Graph& g, const ExpectedMatrix& P) {
  if (g.size() != P.size()) throw ParameterError("graph and expected matrix sizes differ");
  const Eigen::VectorXd base = P.row_square_sums();
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double s = base[static_cast<Eigen::Index>(i)];
    for (const auto& nb : g.neighbors(i)) s += nb.weight * nb.weight - 2.0 * nb.weight * P(i, nb.node);
    best = std::max(best, s);
  }
  return std::sqrt(std::max(0.0, best));
}

struct BenaychResult {
  double value = 0.0;  ///< NaN when 1 + log(log n / d) <= 0
  bool in_window = false;  ///< 4 <= d <= n^(2/13)
  bool in_domain = false;
};

/// 2 sqrt(d) + C sqrt(log n / (1 + log(log n / d))). Evaluated outside the
/// window too (with a warning); undefined where the inner log term is <= 0.
inline BenaychResult benaych_bound(double d, double n, double C = 1.0) {
  if (!(d > 0.0) || !(n > 1.0)) throw ParameterError("benaych_bound needs d > 0 and n > 1");
  BenaychResult out;
  const double L = std::log(n);
  out.in_window = d >= 4.0 && d <= std::pow(n, 2.0 / 13.0);
  const double denom = 1.0 + std::log(L / d);
  out.in_domain = denom > 0.0;
  if (!out.in_window) warn("benaych_bound evaluated outside 4 <= d <= n^(2/13)");
  if (!out.in_domain) {
    warn("benaych_bound: 1 + log(log n / d) <= 0, bound undefined");
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.value = 2.0 * std::sqrt(d) + C * std::sqrt(L / denom);
  return out;
}

/// Deviation bound for the degree-regularized adjacency matrix: C r^{3/2}
/// sqrt(d), holding with probability at least 1 - n^{-r}.
inline double regularized_concentration_bound(double r, double d, double C = 1.0) {
  if (!(r >= 1.0) || !(d >= 0.0)) throw ParameterError("need r >= 1 and d >= 0");
  return C * std::pow(r, 1.5) * std::sqrt(d);
}

inline double regularized_concentration_failure_probability(double r, double n) { return std::pow(n, -r); }

/// Deviation bound for the tau-regularized Laplacian: (C r^2 / sqrt(tau)) (1 + d/tau)^{5/2}.
inline double regularized_laplacian_bound(double r, double tau, double d, double C = 1.0) {
  if (!(r >= 1.0) || !(tau > 0.0) || !(d >= 0.0)) throw ParameterError("need r >= 1, tau > 0, d >= 0");
  return C * r * r / std::sqrt(tau) * std::pow(1.0 + d / tau, 2.5);
}

struct RecoveryThresholds {
  double snr = 0.0;                 ///< (a-b)^2 / (a+b), 0 when a = b = 0
  bool weak_recovery = false;       ///< (a-b)^2 > 2(a+b)
  bool strong_consistency = false;  ///< |sqrt(a/log n) - sqrt(b/log n)| > sqrt(2)
  bool partial_recovery = false;    ///< (a-b)^2 > C(a+b) for the caller's C
};

inline RecoveryThresholds recovery_thresholds(double a, double b, double n, double C = 1.0) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(n >= 2.0)) throw ParameterError("need a, b >= 0 and n >= 2");
  RecoveryThresholds out;
  const double gap2 = (a - b) * (a - b);
  const double sum = a + b;
  out.snr = sum > 0.0 ? gap2 / sum : 0.0;
  out.weak_recovery = gap2 > 2.0 * sum;
  const double L = std::log(n);
  out.strong_consistency = std::abs(std::sqrt(a / L) - std::sqrt(b / L)) > std::sqrt(2.0);
  out.partial_recovery = gap2 > C * sum;
  return out;
}

enum class Regime { kSparse, kSemiSparse, kSemiDense, kDense };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::kSparse: return "sparse";
    case Regime::kSemiSparse: return "semi-sparse";
    case Regime::kSemiDense: return "semi-dense";
    case Regime::kDense: return "dense";
  }
  return "?";
}

/// Finite-n proxies for the asymptotic density classes: dense if d >= n/10,
/// otherwise sparse if d <= 10, semi-sparse if d <= 3 log n, else semi-dense.
inline Regime classify_regime(double n, double d) {
  if (!(n >= 2.0) || !(d >= 0.0)) throw ParameterError("need n >= 2 and d >= 0");
  if (d >= n / 10.0) return Regime::kDense;
  if (d <= 10.0) return Regime::kSparse;
  if (d <= 3.0 * std::log(n)) return Regime::kSemiSparse;
  return Regime::kSemiDense;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

using BoundParams = std::map<std::string, double>;

struct BoundInfo {
  std::string name;
  std::vector<std::string> required;
  std::string formula;
};

inline const std::vector<BoundInfo>& bound_registry() {
  static const std::vector<BoundInfo> registry = {
      {"bai-yin", {"d"}, "2 sqrt(d)"},
      {"bernstein", {"sigma2", "K", "n", "t"}, "min(1, 2n exp(-(t^2/2)/(sigma2 + K t/3)))"},
      {"bernstein-expectation", {"sigma", "K", "n"}, "C (sigma sqrt(log n) + K log n)"},
      {"bvh", {"sigma2", "K", "n"}, "C (sqrt((n-1) sigma2) + sqrt(log n) K)"},
      {"benaych", {"d", "n"}, "2 sqrt(d) + C sqrt(log n / (1 + log(log n / d)))"},
      {"degree-cap", {"r", "d"}, "C r^{3/2} sqrt(d)"},
      {"tau-laplacian", {"r", "tau", "d"}, "C r^2 / sqrt(tau) (1 + d/tau)^{5/2}"},
  };
  return registry;
}

/// Evaluate a registered bound by name. `C` defaults to 1 where it applies.
inline double evaluate_bound(const std::string& name, const BoundParams& params) {
  const auto& reg = bound_registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const BoundInfo& b) { return b.name == name; });
  if (it == reg.end()) throw ParameterError("unknown bound '" + name + "'");
  for (const auto& key : it->required)
    if (!params.count(key)) throw ParameterError("bound '" + name + "' needs parameter '" + key + "'");
  auto get = [&](const std::string& key, double fallback) {
    const auto p = params.find(key);
    return p == params.end() ? fallback : p->second;
  };
  const double C = get("C", 1.0);
  if (name == "bai-yin") return bai_yin_limit(get("d", 0));
  if (name == "bernstein") return bernstein_tail(get("sigma2", 0), get("K", 0), get("n", 0), get("t", 0));
  if (name == "bernstein-expectation") return bernstein_expectation(get("sigma", 0), get("K", 0), get("n", 0), C);
  if (name == "bvh") {
    const double n = get("n", 0);
    if (!(n >= 1.0)) throw ParameterError("bvh needs n >= 1");
    return bvh_bound_uniform(get("sigma2", 0), get("K", 0), static_cast<std::size_t>(n), C);
  }
  if (name == "benaych") return benaych_bound(get("d", 0), get("n", 0), C).value;
  if (name == "degree-cap") return regularized_concentration_bound(get("r", 1), get("d", 0), C);
  return regularized_laplacian_bound(get("r", 1), get("tau", 0), get("d", 0), C);
}

}  // namespace specgraph
