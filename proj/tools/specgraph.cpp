// specgraph command-line tool: sampling, regularization, detection, sweeps.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specgraph/config.hpp"
#include "specgraph/specgraph.hpp"

namespace sg = specgraph;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

sg::Seed default_seed() {
  if (const char* env = std::getenv("SPECGRAPH_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw sg::ParameterError("SPECGRAPH_SEED must be a non-negative integer");
  }
  return 0;
}

/// Output sink: a file when a path is given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw sg::ParameterError("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw sg::ParameterError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sg::ParameterError("cannot open '" + path + "'");
  return in;
}

sg::Graph load_graph(const std::string& path) {
  auto in = open_input(path);
  return sg::read_graph_tsv(in);
}

sg::LabelVector load_labels(const std::string& path) {
  auto in = open_input(path);
  return sg::read_labels(in);
}

struct Common {
  std::optional<sg::Seed> seed;
  std::size_t threads = 0;
  sg::Seed resolved_seed() const { return seed ? *seed : default_seed(); }
};

void add_common(CLI::App* cmd, Common& c, bool threads) {
  cmd->add_option("--seed", c.seed, "Master seed (default: $SPECGRAPH_SEED or 0)");
  if (threads) cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
}

// ---------------------------------------------------------------------------

struct GenArgs {
  Common common;
  std::string model = "er";
  std::size_t n = 0;
  std::optional<double> p, a, b;
  std::string config, out, labels_out;
};

int run_gen(const GenArgs& g) {
  sg::ModelSpec spec;
  if (!g.config.empty()) {
    auto in = open_input(g.config);
    spec = sg::model_from_json(sg::parse_json(in));
  } else if (g.model == "er") {
    if (!g.p) throw sg::ParameterError("--model er needs --p");
    spec = sg::ErdosRenyi{*g.p};
  } else if (g.model == "pp" || g.model == "planted_partition") {
    if (!g.a || !g.b) throw sg::ParameterError("--model pp needs --a and --b");
    spec = sg::PlantedPartition{*g.a, *g.b};
  } else {
    throw sg::ParameterError("--model " + g.model + " needs --config with the model parameters");
  }
  const auto s = sg::sample(spec, g.n, g.common.resolved_seed());
  Output out(g.out);
  sg::write_graph_tsv(out.stream(), s.graph);
  out.finish();
  std::string labels_path = g.labels_out;
  if (labels_path.empty() && !g.out.empty() && g.out != "-") labels_path = g.out + ".labels";
  if (!labels_path.empty()) {
    Output lab(labels_path);
    sg::write_labels(lab.stream(), s.labels);
    lab.finish();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RegArgs {
  std::string mode = "cap";
  std::string in, out, report;
  std::optional<double> d_hat, threshold, tau;
  double cap_multiplier = 2.0;
  double tau_rho = 0.25;
};

int run_reg(const RegArgs& r) {
  const sg::Graph g = load_graph(r.in);
  nlohmann::ordered_json report;
  report["mode"] = r.mode;
  report["n"] = g.size();
  report["edges_in"] = g.num_edges();
  sg::Graph result = g;
  if (r.mode == "cap") {
    const double d_hat = r.d_hat ? *r.d_hat : g.average_degree();
    auto [reg, rep] = sg::degree_regularize(g, d_hat, r.cap_multiplier);
    report["d_hat"] = rep.d_hat;
    report["cap"] = rep.cap;
    report["max_degree_before"] = rep.max_degree_before;
    report["max_degree_after"] = rep.max_degree_after;
    report["touched"] = rep.touched;
    report["scale_factors"] = rep.scale_factors;
    report["budget"] = rep.budget;
    report["over_budget"] = rep.over_budget;
    result = std::move(reg);
  } else if (r.mode == "remove") {
    const double threshold = r.threshold ? *r.threshold : 2.0 * (r.d_hat ? *r.d_hat : g.average_degree());
    result = sg::remove_high_degree(g, threshold);
    report["threshold"] = threshold;
  } else if (r.mode == "tau") {
    const double tau = r.tau ? *r.tau : sg::choose_tau(g, r.tau_rho);
    if (!(tau >= 0.0)) throw sg::ParameterError("tau must be non-negative");
    report["tau"] = tau;
    report["rank_one_weight"] = g.size() ? tau / static_cast<double>(g.size()) : 0.0;
    report["note"] = "A_tau = A + (tau/n) 11^T is kept implicit; the edge list is unchanged";
  } else {
    throw sg::ParameterError("unknown --mode '" + r.mode + "' (expected cap, remove or tau)");
  }
  report["edges_out"] = result.num_edges();
  Output out(r.out);
  sg::write_graph_tsv(out.stream(), result);
  out.finish();
  if (r.report.empty()) {
    std::cerr << report.dump(2) << '\n';
  } else {
    Output rep(r.report);
    rep.stream() << report.dump(2) << '\n';
    rep.finish();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DetectArgs {
  Common common;
  std::string in, labels_out, truth;
  std::string method = "reg-laplacian";
  int k = 2;
  double tau_rho = 0.25;
  std::optional<double> d_hat;
  double tol = 1e-8;
};

int run_detect(const DetectArgs& d) {
  static const std::vector<std::string> methods = {"laplacian", "reg-laplacian", "reg-adjacency",
                                                   "reg-adjacency-smallest", "embedding"};
  if (std::find(methods.begin(), methods.end(), d.method) == methods.end())
    throw sg::ParameterError("unknown --method '" + d.method + "'");
  const sg::Graph g = load_graph(d.in);
  sg::ClusterOptions opt;
  opt.seed = d.common.resolved_seed();
  opt.tol = d.tol;
  auto tau = [&] { return g.average_degree() > 0.0 ? sg::choose_tau(g, d.tau_rho) : 0.0; };
  sg::LabelVector labels;
  if (d.method == "laplacian") {
    labels = sg::spectral_cluster(sg::laplacian(g), d.k, sg::ClusterMode::kSecondLargest, opt);
  } else if (d.method == "reg-laplacian") {
    labels = sg::spectral_cluster(sg::regularized_laplacian(g, tau()), d.k, sg::ClusterMode::kSecondLargest, opt);
  } else if (d.method == "embedding") {
    labels = sg::spectral_cluster(sg::regularized_laplacian(g, tau()), d.k, sg::ClusterMode::kTopKEmbedding, opt);
  } else {
    const double d_hat = d.d_hat ? *d.d_hat : g.average_degree();
    const sg::Graph reg = d_hat > 0.0 ? sg::degree_regularize(g, d_hat).first : g;
    const auto mode = d.method == "reg-adjacency" ? sg::ClusterMode::kSecondLargest
                                                  : sg::ClusterMode::kAdjacencySecondSmallest;
    labels = sg::spectral_cluster(sg::SymmetricOperator::adjacency(reg), d.k, mode, opt);
  }
  Output out(d.labels_out);
  sg::write_labels(out.stream(), labels);
  out.finish();
  if (!d.truth.empty()) {
    const auto truth = load_labels(d.truth);
    std::cerr << "misclassification " << sg::format_double(sg::misclassification_rate(labels, truth)) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  Common common;
  std::string config, out;
  std::string family = "er";
  std::vector<std::size_t> n = {2000};
  std::vector<double> d = {40.0};
  std::vector<double> ab;
  std::size_t replicates = 20;
  std::string mode = "none";
  double tau_rho = 0.25;
  double tol = 1e-6;
  bool scorecard = false;
};

int run_sweep(const SweepArgs& s) {
  sg::ExperimentConfig c;
  if (!s.config.empty()) {
    auto in = open_input(s.config);
    c = sg::experiment_from_json(sg::parse_json(in));
  } else {
    nlohmann::json j;
    j["family"] = s.family;
    j["n"] = s.n;
    j["d"] = s.d;
    if (!s.ab.empty()) {
      if (s.ab.size() % 2) throw sg::ParameterError("--ab takes a, b pairs");
      std::vector<std::array<double, 2>> pairs;
      for (std::size_t i = 0; i < s.ab.size(); i += 2) pairs.push_back({s.ab[i], s.ab[i + 1]});
      j["ab"] = pairs;
    }
    j["replicates"] = s.replicates;
    j["mode"] = s.mode;
    j["tau_rho"] = s.tau_rho;
    j["tol"] = s.tol;
    c = sg::experiment_from_json(j);
  }
  if (s.common.seed || s.config.empty()) c.seed = s.common.resolved_seed();
  c.threads = s.common.threads;
  const auto records = s.scorecard ? sg::bound_scorecard(c) : sg::measure_concentration(c);
  Output out(s.out.empty() ? c.output_path : s.out);
  sg::write_csv(out.stream(), records);
  out.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FigArgs {
  Common common;
  std::size_t n = 50;
  double a = 5.0, b = 0.1, rho = 0.1;
  std::size_t seeds = 0;
  std::string out;
};

int run_fig(const FigArgs& f) {
  const sg::Seed seed = f.common.resolved_seed();
  Output out(f.out);
  if (f.seeds == 0) {
    const auto r = sg::eigvec_run(f.n, f.a, f.b, f.rho, seed);
    sg::write_eigvec_csv(out.stream(), r);
    std::cerr << "tau " << sg::format_double(r.tau) << "\nmisclassification laplacian "
              << sg::format_double(r.misclassification_unregularized) << "\nmisclassification regularized "
              << sg::format_double(r.misclassification_regularized) << '\n';
  } else {
    const auto s = sg::eigvec_batch(f.seeds, seed, f.common.threads, f.n, f.a, f.b, f.rho);
    const double d = (f.a + f.b) / 2.0;
    auto rec = [&](const std::string& stat, double value) {
      return sg::Record{"eigvec", f.n, d, f.a, f.b, "tau-laplacian", stat, value, 0.0, f.seeds, s.failures, seed};
    };
    const auto unreg = sg::summarize(s.misclassification_unregularized);
    const auto reg = sg::summarize(s.misclassification_regularized);
    std::vector<sg::Record> records = {
        rec("median_misclassification_laplacian", s.median_unregularized),
        rec("median_misclassification_regularized", s.median_regularized),
        rec("mean_misclassification_laplacian", unreg.mean),
        rec("mean_misclassification_regularized", reg.mean),
        rec("fraction_regularized_within_3", s.fraction_regularized_within_3),
        rec("fraction_laplacian_localized", s.fraction_localized),
    };
    records[2].stderr_ = unreg.stderr_;
    records[3].stderr_ = reg.stderr_;
    sg::write_csv(out.stream(), records);
  }
  out.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PhaseArgs {
  Common common;
  std::size_t n = 4000;
  double d = 10.0;
  std::vector<double> snr = {0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0};
  std::size_t replicates = 50;
  std::string method = "both";
  std::string adjacency_mode = "second-largest";
  double tau_rho = 1.0;
  double tol = 1e-6;
  std::string out;
};

int run_phase(const PhaseArgs& p) {
  sg::PhaseConfig c;
  c.n = p.n;
  c.d = p.d;
  c.snr_grid = p.snr;
  c.replicates = p.replicates;
  c.tau_rho = p.tau_rho;
  c.tol = p.tol;
  c.seed = p.common.resolved_seed();
  c.threads = p.common.threads;
  if (p.method == "reg-adjacency") c.methods = {sg::PhaseMethod::kRegularizedAdjacency};
  else if (p.method == "reg-laplacian") c.methods = {sg::PhaseMethod::kRegularizedLaplacian};
  else if (p.method != "both") throw sg::ParameterError("unknown --method '" + p.method + "'");
  if (p.adjacency_mode == "second-smallest") c.adjacency_mode = sg::ClusterMode::kAdjacencySecondSmallest;
  else if (p.adjacency_mode != "second-largest") throw sg::ParameterError("unknown --adjacency-mode");
  const auto records = sg::phase_sweep(c);
  Output out(p.out);
  sg::write_csv(out.stream(), records);
  out.finish();
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
  std::string bound;
  std::map<std::string, double> params;
  bool list = false;
  std::optional<double> regime_n, regime_d;
};

int run_bounds(const BoundsArgs& b) {
  if (b.list) {
    for (const auto& info : sg::bound_registry()) {
      std::cout << info.name << '\t';
      for (std::size_t i = 0; i < info.required.size(); ++i) std::cout << (i ? "," : "") << info.required[i];
      std::cout << '\t' << info.formula << '\n';
    }
    return kExitOk;
  }
  if (b.bound.empty()) throw sg::ParameterError("--bound is required (see --list)");
  if (b.bound == "regime") {
    if (!b.params.count("n") || !b.params.count("d")) throw sg::ParameterError("regime needs --n and --d");
    std::cout << sg::to_string(sg::classify_regime(b.params.at("n"), b.params.at("d"))) << '\n';
    return kExitOk;
  }
  if (b.bound == "thresholds") {
    for (const char* key : {"a", "b", "n"})
      if (!b.params.count(key)) throw sg::ParameterError(std::string("thresholds needs --") + key);
    const double C = b.params.count("C") ? b.params.at("C") : 1.0;
    const auto t = sg::recovery_thresholds(b.params.at("a"), b.params.at("b"), b.params.at("n"), C);
    std::cout << "snr " << sg::format_double(t.snr) << "\nweak_recovery " << t.weak_recovery
              << "\nstrong_consistency " << t.strong_consistency << "\npartial_recovery " << t.partial_recovery << '\n';
    return kExitOk;
  }
  std::cout << sg::format_double(sg::evaluate_bound(b.bound, b.params)) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random graph spectra, regularization and community detection"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Sample a random graph and its labels");
  add_common(gen_cmd, gen.common, false);
  gen_cmd->add_option("--model", gen.model, "er | pp (others via --config)");
  gen_cmd->add_option("--n", gen.n, "Number of nodes")->required();
  gen_cmd->add_option("--p", gen.p, "Edge probability (er)");
  gen_cmd->add_option("--a", gen.a, "Within-community degree parameter (pp)");
  gen_cmd->add_option("--b", gen.b, "Between-community degree parameter (pp)");
  gen_cmd->add_option("--config", gen.config, "JSON model spec");
  gen_cmd->add_option("--out", gen.out, "Graph TSV (default stdout)");
  gen_cmd->add_option("--labels-out", gen.labels_out, "Labels file (default <out>.labels)");

  RegArgs reg;
  auto* reg_cmd = app.add_subcommand("reg", "Regularize a graph");
  reg_cmd->add_option("--mode", reg.mode, "cap | remove | tau");
  reg_cmd->add_option("--in", reg.in, "Input graph TSV")->required();
  reg_cmd->add_option("--out", reg.out, "Output graph TSV (default stdout)");
  reg_cmd->add_option("--report", reg.report, "JSON report path (default stderr)");
  reg_cmd->add_option("--d-hat", reg.d_hat, "Degree scale (default: average degree)");
  reg_cmd->add_option("--cap-multiplier", reg.cap_multiplier, "cap = multiplier * d_hat");
  reg_cmd->add_option("--threshold", reg.threshold, "remove: degree threshold (default 2 * d_hat)");
  reg_cmd->add_option("--tau", reg.tau, "tau: explicit value");
  reg_cmd->add_option("--tau-rho", reg.tau_rho, "tau: rho * average degree");

  DetectArgs det;
  auto* det_cmd = app.add_subcommand("detect", "Spectral community detection");
  add_common(det_cmd, det.common, false);
  det_cmd->add_option("--in", det.in, "Input graph TSV")->required();
  det_cmd->add_option("--labels-out", det.labels_out, "Output labels (default stdout)");
  det_cmd->add_option("--method", det.method,
                      "laplacian | reg-laplacian | reg-adjacency | reg-adjacency-smallest | embedding");
  det_cmd->add_option("--k", det.k, "Number of communities");
  det_cmd->add_option("--tau-rho", det.tau_rho, "tau = rho * average degree");
  det_cmd->add_option("--d-hat", det.d_hat, "Degree scale for reg-adjacency (default: average degree)");
  det_cmd->add_option("--truth", det.truth, "True labels; prints the misclassification rate");
  det_cmd->add_option("--tol", det.tol, "Eigensolver tolerance");

  SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Concentration sweep (CSV)");
  add_common(sw_cmd, sw.common, true);
  sw_cmd->add_option("--config", sw.config, "JSON experiment config");
  sw_cmd->add_option("--family", sw.family, "er | planted_partition");
  sw_cmd->add_option("--n", sw.n, "Grid of sizes")->expected(1, -1);
  sw_cmd->add_option("--d", sw.d, "Grid of expected degrees (er)")->expected(1, -1);
  sw_cmd->add_option("--ab", sw.ab, "Flat list of a b pairs (planted_partition)")->expected(2, -1);
  sw_cmd->add_option("--R", sw.replicates, "Replicates per grid point");
  sw_cmd->add_option("--mode", sw.mode, "none | degree-cap | vertex-removal | tau-laplacian");
  sw_cmd->add_option("--tau-rho", sw.tau_rho, "tau = rho * average degree");
  sw_cmd->add_option("--tol", sw.tol, "Norm tolerance");
  sw_cmd->add_flag("--scorecard", sw.scorecard, "Add every applicable bound and its ratio");
  sw_cmd->add_option("--out", sw.out, "CSV path (default stdout)");

  FigArgs fig;
  auto* fig_cmd = app.add_subcommand("fig-eigvec", "Leading eigenvectors of L(A) and L(A_tau) (CSV)");
  add_common(fig_cmd, fig.common, true);
  fig_cmd->add_option("--n", fig.n, "Number of nodes");
  fig_cmd->add_option("--a", fig.a, "Within-community parameter");
  fig_cmd->add_option("--b", fig.b, "Between-community parameter");
  fig_cmd->add_option("--rho", fig.rho, "tau = rho * average degree");
  fig_cmd->add_option("--seeds", fig.seeds, "Summarize this many draws instead of printing one table");
  fig_cmd->add_option("--out", fig.out, "CSV path (default stdout)");

  PhaseArgs ph;
  auto* ph_cmd = app.add_subcommand("phase", "Accuracy against (a-b)^2/(a+b) (CSV)");
  add_common(ph_cmd, ph.common, true);
  ph_cmd->add_option("--n", ph.n, "Number of nodes");
  ph_cmd->add_option("--d", ph.d, "(a+b)/2");
  ph_cmd->add_option("--snr", ph.snr, "SNR grid")->expected(1, -1);
  ph_cmd->add_option("--R", ph.replicates, "Replicates per SNR value");
  ph_cmd->add_option("--method", ph.method, "both | reg-adjacency | reg-laplacian");
  ph_cmd->add_option("--adjacency-mode", ph.adjacency_mode, "second-largest | second-smallest");
  ph_cmd->add_option("--tau-rho", ph.tau_rho, "tau = rho * average degree");
  ph_cmd->add_option("--tol", ph.tol, "Eigensolver tolerance");
  ph_cmd->add_option("--out", ph.out, "CSV path (default stdout)");

  BoundsArgs bd;
  auto* bd_cmd = app.add_subcommand("bounds", "Evaluate a bound formula");
  bd_cmd->add_option("--bound", bd.bound, "Registered bound name, 'regime' or 'thresholds'");
  bd_cmd->add_flag("--list", bd.list, "List registered bounds");
  std::map<std::string, std::optional<double>> raw;
  for (const char* key : {"d", "n", "sigma", "sigma2", "K", "t", "r", "tau", "C", "a", "b"})
    bd_cmd->add_option(std::string("--") + key, raw[key], std::string("Parameter ") + key);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*reg_cmd) return run_reg(reg);
    if (*det_cmd) return run_detect(det);
    if (*sw_cmd) return run_sweep(sw);
    if (*fig_cmd) return run_fig(fig);
    if (*ph_cmd) return run_phase(ph);
    if (*bd_cmd) {
      for (const auto& [key, value] : raw)
        if (value) bd.params[key] = *value;
      return run_bounds(bd);
    }
  } catch (const sg::NumericalError& e) {
    std::cerr << "error: " << e.what() << " (best estimate " << sg::format_double(e.best_estimate()) << ")\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
