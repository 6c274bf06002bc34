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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldparith/emit.hpp"
#include "ldparith/json_codec.hpp"
#include "ldparith/ratefn.hpp"
#include "ldparith/simulate.hpp"
#include "ldparith/verify.hpp"

namespace {

using ldparith::AdditiveFunctionSpec;
using ldparith::ChartSeries;
using ldparith::ClosedForm;
using ldparith::ConfigError;
using ldparith::CsvTable;
using ldparith::DiscreteDistribution;
using ldparith::LimitMeasure;
using ldparith::RunConfig;
using ldparith::format_double;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string format;
};

RunConfig load_config(const CommonOptions& opts, bool required) {
  RunConfig config;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("config: cannot open " + opts.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config: " + opts.config_path + ": " + e.what());
    }
    config = ldparith::run_config_from_json(j);
  } else if (required) {
    throw ConfigError("config: --config PATH is required for this command");
  }
  if (opts.seed) config.seed = *opts.seed;
  if (!opts.out_path.empty()) config.output_path = opts.out_path;
  if (!opts.format.empty()) {
    if (opts.format != "csv" && opts.format != "svg") {
      throw ConfigError("config: --format must be csv or svg");
    }
    config.format = opts.format;
  }
  return config;
}

void emit(const RunConfig& config, const std::string& content) {
  if (config.output_path.empty()) {
    std::cout << content;
  } else {
    ldparith::write_text_atomic(config.output_path, content);
  }
}

/// Detects whether the measure is one of the families with a closed-form
/// rate function.
std::optional<ClosedForm> match_closed_form(const LimitMeasure& rho) {
  using Kind = LimitMeasure::Kind;
  switch (rho.kind()) {
    case Kind::kPoisson:
      return ClosedForm::poisson(rho.poisson_lambda());
    case Kind::kGaussian:
      return ClosedForm::gaussian();
    case Kind::kBinomial:
      if (rho.binomial_n() == 1) return ClosedForm::binomial1(rho.binomial_beta());
      if (rho.binomial_n() == 2) return ClosedForm::binomial2(rho.binomial_beta());
      return std::nullopt;
    case Kind::kAtoms: {
      const auto& atoms = rho.atom_list();
      if (atoms.size() == 1 && atoms[0].first > 0.0) {
        return ClosedForm::constant(atoms[0].first);
      }
      if (atoms.size() == 2 && atoms[0].first > 0.0 &&
          atoms[1].first == 2.0 * atoms[0].first &&
          std::abs(atoms[0].second - 0.5) <= 1e-12 &&
          std::abs(atoms[1].second - 0.5) <= 1e-12) {
        return ClosedForm::two_atom_ratio2(atoms[0].first);
      }
      return std::nullopt;
    }
    case Kind::kEmpirical:
      return std::nullopt;
  }
  return std::nullopt;
}

int cmd_rate(const CommonOptions& opts) {
  const RunConfig config = load_config(opts, true);
  if (!config.x_grid) throw ConfigError("config: missing field 'x_grid'");
  const LimitMeasure rho = ldparith::resolve_rho(config);
  const std::optional<ClosedForm> closed = match_closed_form(rho);

  const auto& grid = *config.x_grid;
  const auto steps =
      static_cast<std::int64_t>(std::floor((grid.max - grid.min) / grid.step + 1e-9));

  CsvTable table;
  table.header = closed
                     ? std::vector<std::string>{"x", "I_closed_form", "I_numeric",
                                                "theta_star"}
                     : std::vector<std::string>{"x", "I_numeric", "theta_star"};
  std::vector<std::pair<double, double>> numeric_points;
  std::vector<std::pair<double, double>> closed_points;
  for (std::int64_t i = 0; i <= steps; ++i) {
    const double x = grid.min + grid.step * static_cast<double>(i);
    const auto numeric = ldparith::legendre_rate(rho, x, config.C);
    std::vector<std::string> row;
    row.push_back(format_double(x));
    if (closed) {
      const auto cf = ldparith::closed_form_rate(*closed, x);
      row.push_back(format_double(cf.value));
      if (std::isfinite(cf.value)) closed_points.emplace_back(x, cf.value);
    }
    row.push_back(format_double(numeric.value));
    row.push_back(numeric.theta_star ? format_double(*numeric.theta_star)
                                     : std::string());
    table.rows.push_back(std::move(row));
    if (std::isfinite(numeric.value)) numeric_points.emplace_back(x, numeric.value);
  }

  if (config.format == "svg") {
    std::vector<ChartSeries> series;
    if (closed) series.push_back({"closed form", closed_points});
    series.push_back({"numeric transform", numeric_points});
    emit(config, ldparith::render_polyline_chart(series, "rate function", "x",
                                                 "I(x)"));
  } else {
    emit(config, table.render());
  }
  return kExitOk;
}

DiscreteDistribution exact_distribution_for(const RunConfig& config) {
  if (!config.g) throw ConfigError("config: missing field 'g'");
  if (config.model == "y") {
    if (config.Q < 2) throw ConfigError("config: field 'Q' must be >= 2 for model y");
    return ldparith::exact_y_distribution(config.Q, *config.g, config.C);
  }
  if (config.n < 1) throw ConfigError("config: field 'n' must be >= 1 for model z");
  return ldparith::exact_z_distribution(config.n, *config.g);
}

std::string render_distribution(const RunConfig& config,
                                const DiscreteDistribution& dist) {
  if (config.format == "svg") {
    ChartSeries series{"probability", {}};
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      series.points.emplace_back(dist.value_at(i), dist.probs[i]);
    }
    return ldparith::render_polyline_chart({series}, "exact distribution",
                                           "value", "probability");
  }
  CsvTable table;
  table.header = {"value", "prob"};
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    table.rows.push_back({format_double(dist.value_at(i)),
                          format_double(dist.probs[i])});
  }
  return table.render();
}

int cmd_simulate(const CommonOptions& opts) {
  const RunConfig config = load_config(opts, true);
  if (config.exact) {
    emit(config, render_distribution(config, exact_distribution_for(config)));
    return kExitOk;
  }
  if (!config.g) throw ConfigError("config: missing field 'g'");
  if (config.samples < 1) throw ConfigError("config: field 'samples' must be >= 1");

  ldparith::SampleBatch batch;
  std::int64_t clt_scale = 0;
  if (config.model == "z") {
    if (config.n < 2) throw ConfigError("config: field 'n' must be >= 2 for model z");
    const ldparith::PrimeTable table = ldparith::build_prime_table(config.n);
    batch = ldparith::sample_z(config.n, *config.g, config.samples, config.seed, table);
    clt_scale = config.n;
  } else {
    if (config.Q < 2) throw ConfigError("config: field 'Q' must be >= 2 for model y");
    batch = ldparith::sample_y(config.Q, *config.g, config.samples, config.seed);
    clt_scale = config.Q;
  }

  std::vector<double> stat;
  if (config.clt) stat = ldparith::clt_statistic(batch, clt_scale);

  if (config.format == "svg") {
    // histogram of the sampled values as a polyline over value bins
    std::map<double, std::int64_t> hist;
    for (const double v : batch.values) ++hist[v];
    ChartSeries series{"frequency", {}};
    for (const auto& [v, c] : hist) {
      series.points.emplace_back(
          v, static_cast<double>(c) / static_cast<double>(batch.values.size()));
    }
    emit(config, ldparith::render_polyline_chart({series}, "sample histogram",
                                                 "value", "frequency"));
    return kExitOk;
  }

  CsvTable table;
  table.header = config.clt
                     ? std::vector<std::string>{"index", "value", "clt_statistic"}
                     : std::vector<std::string>{"index", "value"};
  for (std::size_t i = 0; i < batch.values.size(); ++i) {
    std::vector<std::string> row{std::to_string(i), format_double(batch.values[i])};
    if (config.clt) row.push_back(format_double(stat[i]));
    table.rows.push_back(std::move(row));
  }
  emit(config, table.render());
  return kExitOk;
}

int cmd_oracle(const CommonOptions& opts) {
  const RunConfig config = load_config(opts, true);
  emit(config, render_distribution(config, exact_distribution_for(config)));
  return kExitOk;
}

int cmd_counterexample(const CommonOptions& opts) {
  const RunConfig config = load_config(opts, false);
  const ldparith::CounterexampleParams p =
      config.counterexample.value_or(ldparith::CounterexampleParams{});
  const auto schedule = ldparith::counterexample_schedule(
      p.lambda1, p.lambda2, p.delta, p.theta, p.segments);

  if (config.format == "svg") {
    ChartSeries cumulants{"normalized cumulant", {}};
    ChartSeries low{"lower threshold", {}};
    ChartSeries high{"upper threshold", {}};
    for (std::size_t k = 0; k < schedule.breakpoints.size(); ++k) {
      const auto idx = static_cast<double>(k + 1);
      cumulants.points.emplace_back(idx, schedule.cumulants[k]);
      low.points.emplace_back(idx, schedule.lower_threshold);
      high.points.emplace_back(idx, schedule.upper_threshold);
    }
    emit(config, ldparith::render_polyline_chart({cumulants, low, high},
                                                 "oscillating cumulant",
                                                 "breakpoint", "value"));
    return kExitOk;
  }

  CsvTable table;
  table.header = {"k", "u_k", "cumulant", "threshold", "side"};
  for (std::size_t k = 0; k < schedule.breakpoints.size(); ++k) {
    const bool odd = k % 2 == 0;
    table.rows.push_back(
        {std::to_string(k + 1), format_double(schedule.breakpoints[k]),
         format_double(schedule.cumulants[k]),
         format_double(odd ? schedule.lower_threshold : schedule.upper_threshold),
         odd ? "below" : "above"});
  }
  emit(config, table.render());
  return kExitOk;
}

int cmd_verify(const std::string& suite) {
  const ldparith::VerifyReport report = ldparith::verify_suite(suite);
  std::cout << ldparith::format_report(report);
  const std::size_t failures =
      report.checks.size() -
      static_cast<std::size_t>(std::count_if(report.checks.begin(),
                                             report.checks.end(),
                                             [](const auto& c) { return c.pass; }));
  std::cout << (report.all_pass() ? "verify: all checks passed\n"
                                  : "verify: " + std::to_string(failures) +
                                        " check(s) failed\n");
  return report.all_pass() ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rate functions, exact prime-model distributions and "
               "verification suites"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string suite = "all";

  const auto add_common = [&opts](CLI::App* cmd, bool with_seed = true) {
    cmd->add_option("--config", opts.config_path, "JSON configuration path");
    cmd->add_option("--out", opts.out_path, "output path (stdout when omitted)");
    if (with_seed) cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--format", opts.format, "csv or svg");
  };

  CLI::App* rate = app.add_subcommand("rate", "rate-function table over an x grid");
  add_common(rate, false);
  CLI::App* simulate =
      app.add_subcommand("simulate", "sampled batches or exact distributions");
  add_common(simulate);
  CLI::App* oracle = app.add_subcommand("oracle", "exact distribution of a model");
  add_common(oracle, false);
  CLI::App* counterexample =
      app.add_subcommand("counterexample", "oscillating-cumulant schedule");
  add_common(counterexample, false);
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite,
                     "all|duality|oracle|moments|mdp|counterexample");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (rate->parsed()) return cmd_rate(opts);
    if (simulate->parsed()) return cmd_simulate(opts);
    if (oracle->parsed()) return cmd_oracle(opts);
    if (counterexample->parsed()) return cmd_counterexample(opts);
    if (verify->parsed()) return cmd_verify(suite);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitOk;
}
