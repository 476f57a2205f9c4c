#pragma once

#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "specgraph/error.hpp"
#include "specgraph/experiments.hpp"
#include "specgraph/models.hpp"

namespace specgraph {

using Json = nlohmann::json;

namespace detail {

inline Eigen::MatrixXd json_matrix(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParameterError(std::string(what) + " must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParameterError(std::string(what) + " rows must all have the same length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

template <class T>
T json_get(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// {"model": "er", "p": ...}, {"model": "planted_partition", "a": ..., "b": ...},
/// {"model": "sbm", "pi": [...], "B": [[...]]}, dcsbm adds "theta",
/// {"model": "lsm", "positions": [[...]], "kernel": "exp"}, {"model": "ierm", "P": [[...]]}.
inline ModelSpec model_from_json(const Json& j) {
  const auto name = detail::json_get<std::string>(j, "model");
  if (name == "er") return ErdosRenyi{detail::json_get<double>(j, "p")};
  if (name == "planted_partition" || name == "pp")
    return PlantedPartition{detail::json_get<double>(j, "a"), detail::json_get<double>(j, "b")};
  if (name == "sbm")
    return StochasticBlock{detail::json_get<std::vector<double>>(j, "pi"), detail::json_matrix(j.at("B"), "B")};
  if (name == "dcsbm") {
    if (!j.contains("B")) throw ParameterError("missing field 'B'");
    return DegreeCorrectedBlock{detail::json_get<std::vector<double>>(j, "pi"), detail::json_matrix(j.at("B"), "B"),
                                detail::json_get<std::vector<double>>(j, "theta")};
  }
  if (name == "lsm") {
    if (!j.contains("positions")) throw ParameterError("missing field 'positions'");
    return LatentSpace{detail::json_matrix(j.at("positions"), "positions"),
                       Kernel::by_name(j.value("kernel", std::string("exp")))};
  }
  if (name == "ierm") {
    if (!j.contains("P")) throw ParameterError("missing field 'P'");
    return Inhomogeneous{detail::json_matrix(j.at("P"), "P")};
  }
  throw ParameterError("unknown model '" + name + "'");
}

/// Concentration experiment: {"family": "er" | "planted_partition",
/// "n": [...], "d": [...] | "ab": [[a, b], ...], "replicates", "mode",
/// "cap_multiplier", "removal_multiplier", "tau_rho", "seed", "tol", "output"}.
inline ExperimentConfig experiment_from_json(const Json& j) {
  ExperimentConfig c;
  try {
    const auto family = j.value("family", std::string("er"));
    if (family == "er") c.family = Family::kErdosRenyi;
    else if (family == "planted_partition" || family == "pp") c.family = Family::kPlantedPartition;
    else throw ParameterError("unknown family '" + family + "'");
    if (j.contains("n")) c.n_grid = j.at("n").get<std::vector<std::size_t>>();
    if (j.contains("d")) c.d_grid = j.at("d").get<std::vector<double>>();
    if (j.contains("ab")) c.ab_grid = j.at("ab").get<std::vector<std::array<double, 2>>>();
    c.replicates = j.value("replicates", c.replicates);
    c.mode = reg_mode_from_string(j.value("mode", to_string(c.mode)));
    c.cap_multiplier = j.value("cap_multiplier", c.cap_multiplier);
    c.removal_multiplier = j.value("removal_multiplier", c.removal_multiplier);
    c.tau_rho = j.value("tau_rho", c.tau_rho);
    c.seed = j.value("seed", c.seed);
    c.tol = j.value("tol", c.tol);
    c.output_path = j.value("output", c.output_path);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("experiment config: ") + e.what());
  }
  validate(c);
  return c;
}

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["family"] = to_string(c.family);
  j["n"] = c.n_grid;
  if (c.family == Family::kErdosRenyi) j["d"] = c.d_grid;
  else j["ab"] = c.ab_grid;
  j["replicates"] = c.replicates;
  j["mode"] = to_string(c.mode);
  j["cap_multiplier"] = c.cap_multiplier;
  j["removal_multiplier"] = c.removal_multiplier;
  j["tau_rho"] = c.tau_rho;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  if (!c.output_path.empty()) j["output"] = c.output_path;
  return j;
}

inline Json parse_json(std::istream& in) {
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace specgraph
