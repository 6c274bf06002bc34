// Copyright 2026 The ldparith Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPARITH_JSON_CODEC_HPP
#define LDPARITH_JSON_CODEC_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ldparith/additive.hpp"
#include "ldparith/measures.hpp"
#include "ldparith/primes.hpp"
#include "ldparith/util.hpp"

namespace ldparith {

/// Configuration problems; the CLI maps these to exit code 2.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j,
                                           const std::string& key,
                                           const std::string& path) {
  if (!j.contains(key)) {
    throw ConfigError("config: missing field '" + path + key + "'");
  }
  return j.at(key);
}

inline double number_at(const nlohmann::json& j, const std::string& key,
                        const std::string& path) {
  const auto& v = require_field(j, key, path);
  if (!v.is_number()) {
    throw ConfigError("config: field '" + path + key + "' must be a number");
  }
  return v.get<double>();
}

inline std::int64_t integer_at(const nlohmann::json& j, const std::string& key,
                               const std::string& path) {
  const auto& v = require_field(j, key, path);
  if (!v.is_number_integer()) {
    throw ConfigError("config: field '" + path + key + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

inline void reject_unknown(const nlohmann::json& j,
                           const std::set<std::string>& allowed,
                           const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown field '" + path + key + "'");
    }
  }
}

}  // namespace detail

inline nlohmann::json to_json(const AdditiveFunctionSpec& g) {
  using Kind = AdditiveFunctionSpec::Kind;
  nlohmann::json j;
  switch (g.kind()) {
    case Kind::kConstant:
      j["kind"] = "constant";
      j["lambda"] = g.lambda();
      break;
    case Kind::kTwoValueByIndex:
      j["kind"] = "two_value_by_index";
      j["lambda1"] = g.lambda1();
      j["lambda2"] = g.lambda2();
      break;
    case Kind::kIntervalOscillating:
      j["kind"] = "interval_oscillating";
      j["lambda1"] = g.lambda1();
      j["lambda2"] = g.lambda2();
      j["breakpoints"] = g.breakpoints();
      break;
    case Kind::kTable: {
      j["kind"] = "table";
      nlohmann::json values = nlohmann::json::object();
      for (const auto& [p, v] : g.table_values()) {
        values[std::to_string(p)] = v;
      }
      j["values"] = values;
      j["default"] = g.table_default();
      break;
    }
  }
  return j;
}

inline AdditiveFunctionSpec additive_from_json(const nlohmann::json& j,
                                               const std::string& path = "g.") {
  if (!j.is_object()) {
    throw ConfigError("config: '" + path + "' must be an object");
  }
  const std::string kind =
      detail::require_field(j, "kind", path).get<std::string>();
  try {
    if (kind == "constant") {
      detail::reject_unknown(j, {"kind", "lambda"}, path);
      return AdditiveFunctionSpec::constant(detail::number_at(j, "lambda", path));
    }
    if (kind == "two_value_by_index") {
      detail::reject_unknown(j, {"kind", "lambda1", "lambda2"}, path);
      return AdditiveFunctionSpec::two_value_by_index(
          detail::number_at(j, "lambda1", path),
          detail::number_at(j, "lambda2", path));
    }
    if (kind == "interval_oscillating") {
      detail::reject_unknown(j, {"kind", "lambda1", "lambda2", "breakpoints"}, path);
      const auto& bp = detail::require_field(j, "breakpoints", path);
      if (!bp.is_array()) {
        throw ConfigError("config: '" + path + "breakpoints' must be an array");
      }
      return AdditiveFunctionSpec::interval_oscillating(
          detail::number_at(j, "lambda1", path),
          detail::number_at(j, "lambda2", path),
          bp.get<std::vector<std::int64_t>>());
    }
    if (kind == "table") {
      detail::reject_unknown(j, {"kind", "values", "default"}, path);
      const auto& values = detail::require_field(j, "values", path);
      if (!values.is_object()) {
        throw ConfigError("config: '" + path + "values' must be an object");
      }
      std::map<std::int64_t, double> table;
      for (const auto& [key, v] : values.items()) {
        table[std::stoll(key)] = v.get<double>();
      }
      return AdditiveFunctionSpec::table(std::move(table),
                                         detail::number_at(j, "default", path));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: field '" + path + "': " + e.what());
  }
  throw ConfigError("config: '" + path + "kind' must be one of constant|"
                    "two_value_by_index|interval_oscillating|table, got '" +
                    kind + "'");
}

inline nlohmann::json to_json(const LimitMeasure& rho) {
  using Kind = LimitMeasure::Kind;
  nlohmann::json j;
  switch (rho.kind()) {
    case Kind::kAtoms:
    case Kind::kEmpirical: {
      j["kind"] = rho.kind() == Kind::kAtoms ? "atoms" : "empirical";
      nlohmann::json atoms = nlohmann::json::array();
      for (const auto& [v, w] : rho.atom_list()) {
        atoms.push_back({v, w});
      }
      j["atoms"] = atoms;
      break;
    }
    case Kind::kPoisson:
      j["kind"] = "poisson";
      j["lambda"] = rho.poisson_lambda();
      break;
    case Kind::kBinomial:
      j["kind"] = "binomial";
      j["n"] = rho.binomial_n();
      j["beta"] = rho.binomial_beta();
      break;
    case Kind::kGaussian:
      j["kind"] = "gaussian";
      break;
  }
  return j;
}

/// Parses a measure. A bare {"kind": "empirical"} has no atoms of its own; it
/// is resolved later against the config's g and n (see resolve_rho).
inline std::optional<LimitMeasure> measure_from_json(
    const nlohmann::json& j, const std::string& path = "rho.") {
  if (!j.is_object()) {
    throw ConfigError("config: '" + path + "' must be an object");
  }
  const std::string kind =
      detail::require_field(j, "kind", path).get<std::string>();
  try {
    if (kind == "atoms" || kind == "empirical") {
      if (kind == "empirical" && !j.contains("atoms")) {
        return std::nullopt;  // contextual; needs g and n
      }
      detail::reject_unknown(j, {"kind", "atoms"}, path);
      const auto& atoms = detail::require_field(j, "atoms", path);
      if (!atoms.is_array()) {
        throw ConfigError("config: '" + path + "atoms' must be an array of [value, weight]");
      }
      std::vector<std::pair<double, double>> list;
      for (const auto& a : atoms) {
        if (!a.is_array() || a.size() != 2) {
          throw ConfigError("config: '" + path + "atoms' entries must be [value, weight]");
        }
        list.emplace_back(a[0].get<double>(), a[1].get<double>());
      }
      if (kind == "atoms") return LimitMeasure::atoms(std::move(list));
      EmpiricalMeasure em;
      em.atoms = std::move(list);
      return LimitMeasure::empirical(std::move(em));
    }
    if (kind == "poisson") {
      detail::reject_unknown(j, {"kind", "lambda"}, path);
      return LimitMeasure::poisson(detail::number_at(j, "lambda", path));
    }
    if (kind == "binomial") {
      detail::reject_unknown(j, {"kind", "n", "beta"}, path);
      return LimitMeasure::binomial(detail::integer_at(j, "n", path),
                                    detail::number_at(j, "beta", path));
    }
    if (kind == "gaussian") {
      detail::reject_unknown(j, {"kind"}, path);
      return LimitMeasure::gaussian();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: field '" + path + "': " + e.what());
  }
  throw ConfigError("config: '" + path + "kind' must be one of atoms|poisson|"
                    "binomial|gaussian|empirical, got '" + kind + "'");
}

struct XGrid {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;
};

struct CounterexampleParams {
  double lambda1 = 1.0;
  double lambda2 = 2.0;
  double delta = 0.1;
  double theta = 1.0;
  int segments = 6;
};

/// One parsed configuration shared by all subcommands; each command reads
/// the fields it needs and ignores the rest.
struct RunConfig {
  std::optional<AdditiveFunctionSpec> g;
  std::optional<nlohmann::json> rho;
  std::int64_t n = 0;
  std::int64_t Q = 0;
  double C = kInfinity;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::optional<XGrid> x_grid;
  std::string output_path;
  std::string format = "csv";
  std::string model = "y";
  bool exact = false;
  bool clt = false;
  std::optional<CounterexampleParams> counterexample;
};

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::reject_unknown(
      j,
      {"g", "rho", "n", "Q", "C", "samples", "seed", "x_grid", "output",
       "format", "model", "exact", "clt", "counterexample"},
      "");
  RunConfig c;
  if (j.contains("g")) c.g = additive_from_json(j.at("g"), "g.");
  if (j.contains("rho")) c.rho = j.at("rho");
  if (j.contains("n")) c.n = detail::integer_at(j, "n", "");
  if (j.contains("Q")) c.Q = detail::integer_at(j, "Q", "");
  if (j.contains("C")) {
    const double v = detail::number_at(j, "C", "");
    if (!(v > 0.0)) throw ConfigError("config: field 'C' must be > 0");
    c.C = v;
  }
  if (j.contains("samples")) c.samples = detail::integer_at(j, "samples", "");
  if (j.contains("seed")) {
    const auto& v = j.at("seed");
    if (!v.is_number_integer()) {
      throw ConfigError("config: field 'seed' must be an integer");
    }
    c.seed = v.get<std::uint64_t>();
  }
  if (j.contains("x_grid")) {
    const auto& grid = j.at("x_grid");
    if (!grid.is_object()) {
      throw ConfigError("config: field 'x_grid' must be an object");
    }
    detail::reject_unknown(grid, {"min", "max", "step"}, "x_grid.");
    XGrid xg;
    xg.min = detail::number_at(grid, "min", "x_grid.");
    xg.max = detail::number_at(grid, "max", "x_grid.");
    xg.step = detail::number_at(grid, "step", "x_grid.");
    if (!(xg.step > 0.0)) {
      throw ConfigError("config: field 'x_grid.step' must be > 0");
    }
    if (xg.max < xg.min) {
      throw ConfigError("config: field 'x_grid.max' must be >= x_grid.min");
    }
    c.x_grid = xg;
  }
  if (j.contains("output")) {
    const auto& out = j.at("output");
    if (!out.is_object()) {
      throw ConfigError("config: field 'output' must be an object");
    }
    detail::reject_unknown(out, {"path", "format"}, "output.");
    if (out.contains("path")) c.output_path = out.at("path").get<std::string>();
    if (out.contains("format")) c.format = out.at("format").get<std::string>();
  }
  if (j.contains("format")) c.format = j.at("format").get<std::string>();
  if (c.format != "csv" && c.format != "svg") {
    throw ConfigError("config: field 'format' must be csv or svg, got '" +
                      c.format + "'");
  }
  if (j.contains("model")) {
    c.model = j.at("model").get<std::string>();
    if (c.model != "y" && c.model != "z") {
      throw ConfigError("config: field 'model' must be y or z, got '" +
                        c.model + "'");
    }
  }
  if (j.contains("exact")) {
    if (!j.at("exact").is_boolean()) {
      throw ConfigError("config: field 'exact' must be a boolean");
    }
    c.exact = j.at("exact").get<bool>();
  }
  if (j.contains("clt")) {
    if (!j.at("clt").is_boolean()) {
      throw ConfigError("config: field 'clt' must be a boolean");
    }
    c.clt = j.at("clt").get<bool>();
  }
  if (j.contains("counterexample")) {
    const auto& ce = j.at("counterexample");
    if (!ce.is_object()) {
      throw ConfigError("config: field 'counterexample' must be an object");
    }
    detail::reject_unknown(
        ce, {"lambda1", "lambda2", "delta", "theta", "segments"},
        "counterexample.");
    CounterexampleParams p;
    if (ce.contains("lambda1")) p.lambda1 = detail::number_at(ce, "lambda1", "counterexample.");
    if (ce.contains("lambda2")) p.lambda2 = detail::number_at(ce, "lambda2", "counterexample.");
    if (ce.contains("delta")) p.delta = detail::number_at(ce, "delta", "counterexample.");
    if (ce.contains("theta")) p.theta = detail::number_at(ce, "theta", "counterexample.");
    if (ce.contains("segments")) {
      p.segments = static_cast<int>(detail::integer_at(ce, "segments", "counterexample."));
    }
    c.counterexample = p;
  }
  return c;
}

/// Resolves the configured measure; a bare empirical kind is built from the
/// configured g over primes up to n.
inline LimitMeasure resolve_rho(const RunConfig& config) {
  if (!config.rho) throw ConfigError("config: missing field 'rho'");
  auto direct = measure_from_json(*config.rho, "rho.");
  if (direct) return *direct;
  if (!config.g) {
    throw ConfigError("config: rho kind 'empirical' needs field 'g'");
  }
  if (config.n < 2) {
    throw ConfigError("config: rho kind 'empirical' needs field 'n' >= 2");
  }
  const PrimeTable table = build_prime_table(config.n);
  return LimitMeasure::empirical(empirical_rho(*config.g, table, config.n));
}

}  // namespace ldparith

#endif  // LDPARITH_JSON_CODEC_HPP
