#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specgraph/bounds.hpp"
#include "specgraph/detect.hpp"
#include "specgraph/eigensolver.hpp"
#include "specgraph/error.hpp"
#include "specgraph/graph.hpp"
#include "specgraph/models.hpp"
#include "specgraph/operator.hpp"
#include "specgraph/parallel.hpp"
#include "specgraph/regularize.hpp"
#include "specgraph/rng.hpp"

namespace specgraph {

// ---------------------------------------------------------------------------
// Records and CSV
// ---------------------------------------------------------------------------

/// One aggregated statistic at one grid point. `seed` is the grid-point seed;
/// replicate r used derive_seed(seed, {r}).
struct Record {
  std::string experiment;
  std::size_t n = 0;
  double d = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::string mode;
  std::string statistic;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t R = 0;
  std::size_t failures = 0;
  Seed seed = 0;
};

inline constexpr const char* kCsvHeader = "experiment,n,d,a,b,mode,statistic,mean,stderr,R,failures,seed";

inline void write_csv(std::ostream& out, const std::vector<Record>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records)
    out << r.experiment << ',' << r.n << ',' << format_double(r.d) << ',' << format_double(r.a) << ','
        << format_double(r.b) << ',' << r.mode << ',' << r.statistic << ',' << format_double(r.mean) << ','
        << format_double(r.stderr_) << ',' << r.R << ',' << r.failures << ',' << r.seed << '\n';
}

inline std::string to_csv(const std::vector<Record>& records) {
  std::ostringstream out;
  write_csv(out, records);
  return out.str();
}

/// Mean and standard error of the finite entries.
struct Summary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;
};

inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  double sum = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) {
      sum += x;
      ++s.count;
    }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count < 2) {
    s.stderr_ = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) ss += (x - s.mean) * (x - s.mean);
  s.stderr_ = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
  return s;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

// ---------------------------------------------------------------------------
// Concentration sweeps
// ---------------------------------------------------------------------------

enum class RegMode { kNone, kDegreeCap, kVertexRemoval, kTauLaplacian };

inline std::string to_string(RegMode m) {
  switch (m) {
    case RegMode::kNone: return "none";
    case RegMode::kDegreeCap: return "degree-cap";
    case RegMode::kVertexRemoval: return "vertex-removal";
    case RegMode::kTauLaplacian: return "tau-laplacian";
  }
  return "?";
}

inline RegMode reg_mode_from_string(const std::string& s) {
  for (auto m : {RegMode::kNone, RegMode::kDegreeCap, RegMode::kVertexRemoval, RegMode::kTauLaplacian})
    if (to_string(m) == s) return m;
  throw ParameterError("unknown regularization mode '" + s + "'");
}

enum class Family { kErdosRenyi, kPlantedPartition };

inline std::string to_string(Family f) { return f == Family::kErdosRenyi ? "er" : "planted_partition"; }

struct ExperimentConfig {
  Family family = Family::kErdosRenyi;
  std::vector<std::size_t> n_grid = {2000};
  /// ER: expected degree d, p = d/n.
  std::vector<double> d_grid = {40.0};
  /// Planted partition: (a, b) pairs, P_in = a/n, P_out = b/n.
  std::vector<std::array<double, 2>> ab_grid;
  std::size_t replicates = 20;
  RegMode mode = RegMode::kNone;
  /// degree-cap: cap = cap_multiplier * d_hat with d_hat = n max_ij P_ij.
  double cap_multiplier = 2.0;
  /// vertex-removal: drop edges at vertices of degree > removal_multiplier * d_hat.
  double removal_multiplier = 2.0;
  /// tau-laplacian: tau = tau_rho * observed average degree.
  double tau_rho = 0.25;
  Seed seed = 0;
  std::size_t threads = 0;
  double tol = 1e-6;
  std::string output_path;
};

struct GridPoint {
  std::size_t index = 0;
  std::size_t n = 0;
  double d = 0.0;  ///< ER: d. Planted partition: (a + b) / 2.
  double a = 0.0;
  double b = 0.0;
};

inline void validate(const ExperimentConfig& c) {
  if (c.replicates < 1) throw ParameterError("replicate count must be at least 1");
  if (c.n_grid.empty()) throw ParameterError("n grid is empty");
  if (c.family == Family::kErdosRenyi && c.d_grid.empty()) throw ParameterError("d grid is empty");
  if (c.family == Family::kPlantedPartition && c.ab_grid.empty()) throw ParameterError("(a, b) grid is empty");
  if (!(c.cap_multiplier > 0.0) || !(c.removal_multiplier > 0.0)) throw ParameterError("multipliers must be positive");
  if (!(c.tau_rho > 0.0 && c.tau_rho <= 1.0)) throw ParameterError("tau_rho must lie in (0, 1]");
  if (!(c.tol > 0.0)) throw ParameterError("tol must be positive");
  for (auto n : c.n_grid)
    if (n < 2) throw ParameterError("grid sizes must be at least 2");
}

/// Grid points in row-major order over (n, d) or (n, (a, b)).
inline std::vector<GridPoint> grid_points(const ExperimentConfig& c) {
  validate(c);
  std::vector<GridPoint> out;
  for (auto n : c.n_grid) {
    if (c.family == Family::kErdosRenyi) {
      for (double d : c.d_grid) out.push_back({out.size(), n, d, 0.0, 0.0});
    } else {
      for (const auto& ab : c.ab_grid) out.push_back({out.size(), n, (ab[0] + ab[1]) / 2.0, ab[0], ab[1]});
    }
  }
  return out;
}

inline ModelSpec model_at(const ExperimentConfig& c, const GridPoint& g) {
  if (c.family == Family::kErdosRenyi) return ErdosRenyi{g.d / static_cast<double>(g.n)};
  return PlantedPartition{g.a, g.b};
}

inline Seed grid_seed(Seed master, std::size_t grid_index) { return derive_seed(master, {0x47524944, grid_index}); }
inline Seed replicate_seed(Seed grid, std::size_t r) { return derive_seed(grid, {r}); }

/// Raw measurements from one replicate.
struct ReplicateResult {
  bool ok = true;
  std::string failure;
  double deviation = std::numeric_limits<double>::quiet_NaN();  ///< spectral norm of the centered matrix
  double seginer = std::numeric_limits<double>::quiet_NaN();    ///< largest column norm of A' - E[A]
  double max_degree = 0.0;                                      ///< of the (regularized) graph
  double touched = 0.0;                                         ///< vertices changed by regularization
  double tau = 0.0;
};

/// E[L(A_tau)] proxy: D_tau^{-1/2} (E[A] + (tau/n) 11^T) D_tau^{-1/2} with
/// D_tau built from the expected degrees.
inline SymmetricOperator expected_regularized_laplacian(const ExpectedMatrix& P, double tau) {
  const Eigen::VectorXd rows = P.row_sums();
  std::vector<double> d(rows.data(), rows.data() + rows.size());
  auto op = SymmetricOperator::expected(P);
  if (tau > 0.0) op = op.plus_rank_one(tau / static_cast<double>(P.size()));
  return op.scaled(detail::inverse_sqrt(d, tau));
}

/// One replicate: sample, regularize, and measure the deviation from the
/// ORIGINAL model's E[A] (or E[L(A_tau)] in tau-laplacian mode).
inline ReplicateResult run_replicate(const ExperimentConfig& c, const GridPoint& g, Seed seed) {
  ReplicateResult out;
  const ModelSpec spec = model_at(c, g);
  auto [labels, P] = realize_expectation(spec, g.n, seed);
  Graph A = detail::sample_from_expected(P, seed);
  const double d_hat = max_expected_degree(P).entry_max;
  const Seed solver_seed = derive_seed(seed, {0x534f4c56});

  SymmetricOperator centered = SymmetricOperator::zero(g.n);
  switch (c.mode) {
    case RegMode::kNone:
      break;
    case RegMode::kDegreeCap:
      if (d_hat > 0.0) {
        auto [reg, report] = degree_regularize(A, d_hat, c.cap_multiplier);
        out.touched = static_cast<double>(report.touched.size());
        A = std::move(reg);
      }
      break;
    case RegMode::kVertexRemoval:
      if (d_hat > 0.0) {
        const double threshold = c.removal_multiplier * d_hat;
        const auto deg = A.degrees();
        out.touched = static_cast<double>(std::count_if(deg.begin(), deg.end(), [&](double v) { return v > threshold; }));
        A = remove_high_degree(A, threshold);
      }
      break;
    case RegMode::kTauLaplacian:
      break;
  }
  out.max_degree = A.max_degree();

  try {
    if (c.mode == RegMode::kTauLaplacian) {
      out.tau = c.tau_rho * A.average_degree();
      if (out.tau == 0.0) {
        out.deviation = 0.0;
        out.seginer = 0.0;
        return out;
      }
      centered = regularized_laplacian(A, out.tau) - expected_regularized_laplacian(P, out.tau);
    } else {
      out.seginer = seginer_stat(A, P);
      centered = SymmetricOperator::adjacency(A).minus_expected(P);
    }
    out.deviation = spectral_norm(centered, c.tol, solver_seed);
  } catch (const NumericalError& e) {
    out.ok = false;
    out.failure = e.what();
  }
  return out;
}

/// Bounds at a grid point with every constant set to 1. Row variance and
/// entry range come from the model's E[A]; K = 0 when E[A] = 0.
struct GridBounds {
  double bai_yin = 0.0;
  double bvh = 0.0;
  double bernstein = 0.0;
  double benaych = std::numeric_limits<double>::quiet_NaN();
  double degree_cap = std::numeric_limits<double>::quiet_NaN();
};

inline GridBounds grid_bounds(const ExperimentConfig& c, const GridPoint& g) {
  const ModelSpec spec = model_at(c, g);
  auto [labels, P] = realize_expectation(spec, g.n, 0);
  const Eigen::VectorXd var = P.row_sums() - P.row_square_sums();
  const double sigma = std::sqrt(std::max(0.0, var.maxCoeff()));
  const double K = P.max_entry() > 0.0 ? 1.0 : 0.0;
  const double n = static_cast<double>(g.n);
  const double d_hat = max_expected_degree(P).entry_max;
  GridBounds out;
  out.bai_yin = bai_yin_limit(d_hat);
  out.bvh = sigma + std::sqrt(std::log(n)) * K;
  out.bernstein = bernstein_expectation(sigma, K, n);
  if (d_hat > 0.0) {
    WarningSink quiet = set_warning_sink([](const std::string&) {});
    out.benaych = benaych_bound(d_hat, n).value;
    set_warning_sink(quiet);
    out.degree_cap = regularized_concentration_bound(1.0, d_hat);
  }
  return out;
}

namespace detail {

inline double safe_ratio(double num, double den) {
  if (!std::isfinite(num) || !std::isfinite(den)) return std::numeric_limits<double>::quiet_NaN();
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

inline std::vector<ReplicateResult> run_grid_point(const ExperimentConfig& c, const GridPoint& g, Seed gseed) {
  std::vector<ReplicateResult> reps(c.replicates);
  parallel_for(c.replicates, c.threads, [&](std::size_t r) { reps[r] = run_replicate(c, g, replicate_seed(gseed, r)); });
  for (std::size_t r = 0; r < reps.size(); ++r)
    if (!reps[r].ok) warn("replicate " + std::to_string(r) + " at grid point " + std::to_string(g.index) + ": " + reps[r].failure);
  return reps;
}

inline Record make_record(const std::string& experiment, const ExperimentConfig& c, const GridPoint& g, Seed gseed,
                          const std::string& statistic, const std::vector<double>& values, std::size_t failures) {
  const Summary s = summarize(values);
  return {experiment, g.n, g.d, g.a, g.b, to_string(c.mode), statistic, s.mean, s.stderr_, c.replicates, failures, gseed};
}

template <class F>
std::vector<double> column(const std::vector<ReplicateResult>& reps, F&& f) {
  std::vector<double> out;
  for (const auto& r : reps) out.push_back(r.ok ? f(r) : std::numeric_limits<double>::quiet_NaN());
  return out;
}

inline std::vector<Record> concentration_records(const ExperimentConfig& c, const GridPoint& g, Seed gseed,
                                                 const std::vector<ReplicateResult>& reps, bool scorecard) {
  std::size_t failures = 0;
  for (const auto& r : reps) failures += r.ok ? 0 : 1;
  const std::string exp = scorecard ? "scorecard" : "concentration";
  std::vector<Record> out;
  auto add = [&](const std::string& stat, const std::vector<double>& v) {
    out.push_back(make_record(exp, c, g, gseed, stat, v, failures));
  };
  add("deviation", column(reps, [](const auto& r) { return r.deviation; }));

  if (c.mode == RegMode::kTauLaplacian) {
    add("tau", column(reps, [](const auto& r) { return r.tau; }));
    add("ratio_tau_bound", column(reps, [&](const auto& r) {
          if (r.tau <= 0.0) return 0.0;
          return safe_ratio(r.deviation, regularized_laplacian_bound(1.0, r.tau, g.d));
        }));
    return out;
  }

  const double sqrt_d = std::sqrt(g.d);
  add("ratio_sqrt_d", column(reps, [&](const auto& r) { return safe_ratio(r.deviation, sqrt_d); }));
  add("seginer", column(reps, [](const auto& r) { return r.seginer; }));
  add("max_degree", column(reps, [](const auto& r) { return r.max_degree; }));
  if (c.mode != RegMode::kNone) add("touched", column(reps, [](const auto& r) { return r.touched; }));
  if (!scorecard) return out;

  const GridBounds b = grid_bounds(c, g);
  const std::vector<std::pair<std::string, double>> bounds = {
      {"bai-yin", b.bai_yin}, {"bvh", b.bvh}, {"bernstein-expectation", b.bernstein}, {"benaych", b.benaych}};
  for (const auto& [name, value] : bounds) {
    add("bound:" + name, std::vector<double>(1, value));
    out.back().stderr_ = 0.0;
    add("ratio:" + name, column(reps, [&](const auto& r) { return safe_ratio(r.deviation, value); }));
  }
  if (c.mode == RegMode::kDegreeCap) {
    add("bound:degree-cap", std::vector<double>(1, b.degree_cap));
    out.back().stderr_ = 0.0;
    add("ratio:degree-cap", column(reps, [&](const auto& r) { return safe_ratio(r.deviation, b.degree_cap); }));
  }
  add("ratio:seginer", column(reps, [](const auto& r) { return safe_ratio(r.deviation, r.seginer); }));
  return out;
}

}  // namespace detail

/// Monte-Carlo deviation norms over the grid. Replicate failures are counted
/// in each record and left out of the means.
inline std::vector<Record> measure_concentration(const ExperimentConfig& c) {
  std::vector<Record> out;
  for (const auto& g : grid_points(c)) {
    const Seed gseed = grid_seed(c.seed, g.index);
    auto recs = detail::concentration_records(c, g, gseed, detail::run_grid_point(c, g, gseed), false);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

/// Empirical deviations next to every applicable bound (C = 1) and their ratios.
inline std::vector<Record> bound_scorecard(const ExperimentConfig& c) {
  std::vector<Record> out;
  for (const auto& g : grid_points(c)) {
    const Seed gseed = grid_seed(c.seed, g.index);
    auto recs = detail::concentration_records(c, g, gseed, detail::run_grid_point(c, g, gseed), true);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

/// Recompute the replicates behind a concentration record from its own fields
/// and seed, without touching the rest of the grid.
inline std::vector<ReplicateResult> replay(const ExperimentConfig& c, const Record& r) {
  GridPoint g{0, r.n, r.d, r.a, r.b};
  ExperimentConfig single = c;
  single.mode = reg_mode_from_string(r.mode);
  single.replicates = r.R;
  return detail::run_grid_point(single, g, r.seed);
}

// ---------------------------------------------------------------------------
// Eigenvector localization (two-community illustration)
// ---------------------------------------------------------------------------

/// (sum v_i^2)^2 / (n sum v_i^4): near 1 for spread-out vectors, about k/n
/// for a vector supported on k nodes.
inline double participation_ratio(const Eigen::VectorXd& v) {
  const double s2 = v.squaredNorm();
  const double s4 = v.array().pow(4).sum();
  if (s4 == 0.0) return 0.0;
  return s2 * s2 / (static_cast<double>(v.size()) * s4);
}

/// Fix the sign so the entries sum to a non-negative value (ties: first
/// nonzero entry positive).
inline void normalize_sign(Eigen::VectorXd& v) {
  const double s = v.sum();
  double key = s;
  if (std::abs(s) <= 1e-12 * std::max(1.0, v.cwiseAbs().sum())) {
    key = 0.0;
    for (Eigen::Index i = 0; i < v.size() && key == 0.0; ++i) key = v[i];
  }
  if (key < 0.0) v = -v;
}

struct EigvecResult {
  std::size_t n = 0;
  double a = 0.0, b = 0.0, rho = 0.0, tau = 0.0;
  Seed seed = 0;
  LabelVector truth;
  Eigen::MatrixXd unregularized;  ///< n x 3, leading eigenvectors of L(A)
  Eigen::MatrixXd regularized;    ///< n x 3, leading eigenvectors of L(A_tau)
  std::array<double, 3> unregularized_values{};
  std::array<double, 3> regularized_values{};
  std::array<double, 3> unregularized_participation{};
  std::array<double, 3> regularized_participation{};
  double misclassification_unregularized = 0.0;
  double misclassification_regularized = 0.0;
};

/// Leading three eigenvectors of L(A) and L(A_tau), tau = rho * average degree,
/// for one planted-partition draw, and the sign-of-v2 misclassification of each.
inline EigvecResult eigvec_run(std::size_t n = 50, double a = 5.0, double b = 0.1, double rho = 0.1, Seed seed = 0,
                             double tol = 1e-10) {
  if (n < 3) throw ParameterError("eigvec_run needs n >= 3");
  EigvecResult out;
  out.n = n;
  out.a = a;
  out.b = b;
  out.rho = rho;
  out.seed = seed;
  auto s = sample(PlantedPartition{a, b}, n, seed);
  out.truth = s.labels;
  out.tau = s.graph.average_degree() > 0.0 ? choose_tau(s.graph, rho) : 0.0;

  SolverOptions opt;
  opt.tol = tol;
  auto fill = [&](const SymmetricOperator& op, Seed solver_seed, Eigen::MatrixXd& vecs, std::array<double, 3>& values,
                  std::array<double, 3>& participation) {
    opt.seed = solver_seed;
    const auto pairs = top_eigs(op, 3, Which::kLargestAlgebraic, opt);
    vecs.resize(static_cast<Eigen::Index>(n), 3);
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd v = pairs[static_cast<std::size_t>(k)].vector;
      normalize_sign(v);
      vecs.col(k) = v;
      values[static_cast<std::size_t>(k)] = pairs[static_cast<std::size_t>(k)].value;
      participation[static_cast<std::size_t>(k)] = participation_ratio(v);
    }
  };
  fill(laplacian(s.graph), derive_seed(seed, {0x554e52}), out.unregularized, out.unregularized_values,
       out.unregularized_participation);
  fill(regularized_laplacian(s.graph, out.tau), derive_seed(seed, {0x524547}), out.regularized,
       out.regularized_values, out.regularized_participation);
  out.misclassification_unregularized =
      misclassification_rate(sign_partition(Eigen::VectorXd(out.unregularized.col(1))), out.truth);
  out.misclassification_regularized =
      misclassification_rate(sign_partition(Eigen::VectorXd(out.regularized.col(1))), out.truth);
  return out;
}

/// Six columns, v1..v3 of L(A) then v1..v3 of L(A_tau); row i is node i.
inline void write_eigvec_csv(std::ostream& out, const EigvecResult& f) {
  out << "laplacian_v1,laplacian_v2,laplacian_v3,regularized_v1,regularized_v2,regularized_v3\n";
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(f.n); ++i) {
    for (int k = 0; k < 3; ++k) out << format_double(f.unregularized(i, k)) << ',';
    for (int k = 0; k < 3; ++k) out << format_double(f.regularized(i, k)) << (k < 2 ? "," : "\n");
  }
}

struct EigvecSummary {
  std::vector<double> misclassification_unregularized;
  std::vector<double> misclassification_regularized;
  std::vector<double> min_participation_unregularized;  ///< min over v1, v2
  double median_unregularized = 0.0;
  double median_regularized = 0.0;
  double fraction_regularized_within_3 = 0.0;  ///< share of seeds with <= 3 errors
  double fraction_localized = 0.0;             ///< share with min participation < 0.2
  std::size_t failures = 0;
};

/// eigvec_run repeated over `seeds` draws with seeds derive_seed(master, {s}).
inline EigvecSummary eigvec_batch(std::size_t seeds, Seed master, std::size_t threads = 0, std::size_t n = 50,
                                    double a = 5.0, double b = 0.1, double rho = 0.1) {
  std::vector<std::optional<EigvecResult>> runs(seeds);
  parallel_for(seeds, threads, [&](std::size_t s) {
    try {
      runs[s] = eigvec_run(n, a, b, rho, derive_seed(master, {s}));
    } catch (const NumericalError&) {
    }
  });
  EigvecSummary out;
  std::size_t within = 0, localized = 0;
  for (const auto& r : runs) {
    if (!r) {
      ++out.failures;
      continue;
    }
    out.misclassification_unregularized.push_back(r->misclassification_unregularized);
    out.misclassification_regularized.push_back(r->misclassification_regularized);
    const double pr = std::min(r->unregularized_participation[0], r->unregularized_participation[1]);
    out.min_participation_unregularized.push_back(pr);
    if (r->misclassification_regularized * static_cast<double>(n) <= 3.0 + 1e-9) ++within;
    if (pr < 0.2) ++localized;
  }
  const double ok = static_cast<double>(out.misclassification_regularized.size());
  out.median_unregularized = median(out.misclassification_unregularized);
  out.median_regularized = median(out.misclassification_regularized);
  out.fraction_regularized_within_3 = ok > 0 ? static_cast<double>(within) / ok : 0.0;
  out.fraction_localized = ok > 0 ? static_cast<double>(localized) / ok : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Phase sweep
// ---------------------------------------------------------------------------

enum class PhaseMethod { kRegularizedAdjacency, kRegularizedLaplacian };

inline std::string to_string(PhaseMethod m) {
  return m == PhaseMethod::kRegularizedAdjacency ? "reg-adjacency" : "reg-laplacian";
}

struct PhaseConfig {
  std::size_t n = 4000;
  double d = 10.0;  ///< (a + b) / 2
  std::vector<double> snr_grid = {0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0};
  std::size_t replicates = 50;
  std::vector<PhaseMethod> methods = {PhaseMethod::kRegularizedAdjacency, PhaseMethod::kRegularizedLaplacian};
  /// Regularized adjacency: cap at cap_multiplier * a.
  double cap_multiplier = 2.0;
  /// Which eigenvector of A' to split on.
  ClusterMode adjacency_mode = ClusterMode::kSecondLargest;
  /// Regularized Laplacian: tau = tau_rho * average degree.
  double tau_rho = 1.0;
  Seed seed = 0;
  std::size_t threads = 0;
  double tol = 1e-6;
};

/// a = d + sqrt(2 d s) / 2, b = d - sqrt(2 d s) / 2, so (a+b)/2 = d and
/// (a-b)^2/(a+b) = s. Empty when b < 0 or a > n.
inline std::optional<std::array<double, 2>> planted_parameters(double d, double snr, std::size_t n) {
  if (!(d >= 0.0) || !(snr >= 0.0)) return std::nullopt;
  const double half_gap = std::sqrt(2.0 * d * snr) / 2.0;
  const double a = d + half_gap, b = d - half_gap;
  if (b < 0.0 || a > static_cast<double>(n)) return std::nullopt;
  return std::array<double, 2>{a, std::max(0.0, b)};
}

/// Accuracy (1 - misclassification) of one method on one planted draw.
inline double phase_accuracy(const Graph& g, const LabelVector& truth, double a, PhaseMethod method,
                             const PhaseConfig& c, Seed solver_seed) {
  ClusterOptions opt;
  opt.seed = solver_seed;
  opt.tol = c.tol;
  Eigen::VectorXd v;
  if (method == PhaseMethod::kRegularizedAdjacency) {
    const Graph reg = a > 0.0 ? degree_regularize(g, a, c.cap_multiplier).first : g;
    v = bisection_vector(SymmetricOperator::adjacency(reg), c.adjacency_mode, opt);
  } else {
    const double tau = g.average_degree() > 0.0 ? choose_tau(g, c.tau_rho) : 0.0;
    if (tau == 0.0) return 1.0 - misclassification_rate(LabelVector(g.size(), 1), truth);
    v = bisection_vector(regularized_laplacian(g, tau), ClusterMode::kSecondLargest, opt);
  }
  return 1.0 - misclassification_rate(sign_partition(v), truth);
}

/// Mean accuracy per SNR value and method. Both methods see the same draws.
inline std::vector<Record> phase_sweep(const PhaseConfig& c) {
  if (c.replicates < 1) throw ParameterError("replicate count must be at least 1");
  if (c.snr_grid.empty()) throw ParameterError("SNR grid is empty");
  if (c.methods.empty()) throw ParameterError("no methods selected");
  if (c.n < 2) throw ParameterError("n must be at least 2");
  std::vector<Record> out;
  for (std::size_t gi = 0; gi < c.snr_grid.size(); ++gi) {
    const double snr = c.snr_grid[gi];
    const Seed gseed = grid_seed(c.seed, gi);
    const auto ab = planted_parameters(c.d, snr, c.n);
    if (!ab) {
      for (auto m : c.methods)
        out.push_back({"phase", c.n, c.d, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(), to_string(m), "infeasible:snr=" + format_double(snr),
                       std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0, 0, gseed});
      continue;
    }
    const double a = (*ab)[0], b = (*ab)[1];
    const std::size_t M = c.methods.size();
    std::vector<double> acc(c.replicates * M, std::numeric_limits<double>::quiet_NaN());
    parallel_for(c.replicates, c.threads, [&](std::size_t r) {
      const Seed rs = replicate_seed(gseed, r);
      const auto s = sample(PlantedPartition{a, b}, c.n, rs);
      for (std::size_t k = 0; k < M; ++k) {
        try {
          acc[r * M + k] = phase_accuracy(s.graph, s.labels, a, c.methods[k], c, derive_seed(rs, {0x504841, k}));
        } catch (const NumericalError&) {
        }
      }
    });
    for (std::size_t k = 0; k < M; ++k) {
      std::vector<double> vals;
      std::size_t failures = 0;
      for (std::size_t r = 0; r < c.replicates; ++r) {
        vals.push_back(acc[r * M + k]);
        if (std::isnan(acc[r * M + k])) ++failures;
      }
      const Summary s = summarize(vals);
      out.push_back({"phase", c.n, c.d, a, b, to_string(c.methods[k]), "accuracy:snr=" + format_double(snr), s.mean,
                     s.stderr_, c.replicates, failures, gseed});
    }
  }
  return out;
}

}  // namespace specgraph
