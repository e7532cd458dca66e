// Copyright 2026 The Bellsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bellsim: simulator and analysis lab for two-wing experiments with
// setting-dependent detection times and coincidence post-selection.
//
// Subcommands:
//   simulate  Monte Carlo run, JSON report + optional per-pair CSV
//   exact     closed-form sweep evaluation at given settings
//   scan      parameter scan (l, delta_t, relative_angle) to CSV
//   verify    property suites for the modified CHSH inequality
//   saturate  the canonical saturating configuration, exact and MC
//
// Exit codes: 0 success; 1 configuration/precondition error (diagnostic on
// stderr); 2 internal assertion failure (a property-suite witness).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bellsim/crosscheck.hpp"
#include "bellsim/engine.hpp"
#include "bellsim/lab.hpp"
#include "bellsim/report.hpp"

namespace {

using namespace bellsim;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssertionFailure = 2;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write \"" + path + "\"");
  out << text;
}

struct ModelFlags {
  std::string config_path;
  std::string model_name = "octant";
  double band_height = kSaturatingBandHeight;
  std::string a = "0";
  std::string b = "pi/2";
  std::string c = "pi/4";
  std::string d = "-pi/4";
  double delta_t = 1.5;
  std::int64_t trials = 1000000;
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;

  void add_common(CLI::App* cmd, bool with_config) {
    if (with_config) {
      cmd->add_option("--config", config_path,
                      "JSON experiment config (overrides the model flags)");
    }
    cmd->add_option("--model", model_name, "Model: octant, classic or qm")
        ->check(CLI::IsMember({"octant", "classic", "qm"}));
    cmd->add_option("--l", band_height, "Octant band height l in [0,1]");
    cmd->add_option("--a", a, "Left-wing setting a (radians or pi expression)");
    cmd->add_option("--b", b, "Left-wing setting b");
    cmd->add_option("--c", c, "Right-wing setting c");
    cmd->add_option("--d", d, "Right-wing setting d");
    cmd->add_option("--delta-t", delta_t, "Coincidence window width");
    cmd->add_option("--trials", trials, "Trials per setting pair");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--stream", stream, "RNG stream");
  }

  ExperimentConfig to_config() const {
    if (!config_path.empty()) return load_config(config_path);
    ExperimentConfig config;
    const auto kind = model_kind_from_string(model_name);
    if (!kind) throw ConfigError("unknown model \"" + model_name + "\"");
    config.model.kind = *kind;
    if (*kind == ModelKind::octant) {
      if (!(band_height >= 0.0 && band_height <= 1.0)) {
        throw ConfigError("config error: \"l\" out of [0,1]");
      }
      config.model.band_height = band_height;
    }
    config.settings = {Setting(parse_angle(a)), Setting(parse_angle(b)),
                       Setting(parse_angle(c)), Setting(parse_angle(d))};
    config.window = CoincidenceWindow(delta_t);
    if (trials < 1) throw ConfigError("config error: \"trials\" must be >= 1");
    config.trials_per_pair = trials;
    config.seed = {seed, stream};
    return config;
  }
};

int cmd_simulate(const ModelFlags& flags, const std::string& out_path,
                 const std::string& csv_path, bool canonical) {
  const ExperimentConfig config = flags.to_config();
  const int lanes = resolve_lane_count(0);
  const ChshEstimate est = run_chsh(config, lanes);

  std::optional<ExactChsh> exact;
  if (config.model.is_piecewise()) {
    exact = exact_chsh(config.model, config.settings, config.window);
  }
  write_text(out_path, simulate_report(config, est, exact, canonical).dump(2) + "\n");
  if (!csv_path.empty()) {
    write_text(csv_path, pairs_csv(est, config.settings));
  }

  for (int k = 0; k < 4; ++k) {
    if (!est.pairs[k].e_conditional) {
      fmt::print(stderr,
                 "error: pair {} produced zero coincidences; "
                 "conditional correlation and S are undefined\n",
                 kPairNames[k]);
      return kExitUsage;
    }
  }
  return kExitOk;
}

int cmd_exact(const ModelFlags& flags, bool pair_only) {
  const ExperimentConfig config = flags.to_config();
  if (!config.model.is_piecewise()) {
    throw ConfigError("exact evaluation needs a piecewise model (octant or classic)");
  }
  if (pair_only) {
    const PairStatistics stats =
        sweep_pair(config.model.pattern(), config.settings[0], config.settings[2],
                   config.window);
    std::cout << pair_statistics_to_json(stats).dump(2) << "\n";
  } else {
    const ExactChsh exact =
        exact_chsh(config.model, config.settings, config.window);
    std::cout << exact_chsh_to_json(exact).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_scan(const ModelFlags& flags, const std::string& parameter, double from,
             double to, int steps, const std::string& out_path) {
  const ExperimentConfig config = flags.to_config();
  ScanParameter param = ScanParameter::band_height;
  if (parameter == "l") {
    param = ScanParameter::band_height;
  } else if (parameter == "delta_t") {
    param = ScanParameter::window_width;
  } else if (parameter == "relative_angle") {
    param = ScanParameter::relative_angle;
  } else {
    throw ConfigError("unknown scan parameter \"" + parameter + "\"");
  }
  const auto rows = scan(config, param, from, to, steps, resolve_lane_count(0));
  write_text(out_path, scan_csv(rows));
  return kExitOk;
}

int cmd_verify(const std::string& suite, int models, std::uint64_t seed,
               std::uint64_t stream, const std::string& out_path) {
  if (models < 1) throw ConfigError("config error: \"models\" must be >= 1");
  const RunSeed run_seed{seed, stream};

  std::vector<SuiteResult> results;
  if (suite == "theorem2" || suite == "all") {
    results.push_back(run_theorem2_suite(models, run_seed));
  }
  if (suite == "proof-chain" || suite == "all") {
    results.push_back(run_proof_chain_suite(models, substream(run_seed, 1)));
  }
  if (suite == "saturation" || suite == "all") {
    results.push_back(run_saturation_suite());
  }

  bool all_ok = true;
  ordered_json report;
  report["schema_version"] = kSchemaVersion;
  report["suites"] = ordered_json::array();
  for (const SuiteResult& result : results) {
    all_ok = all_ok && result.ok();
    report["suites"].push_back(suite_to_json(result));
    fmt::print("{}: {}/{} pass (skipped {}, min margin {:.3e})\n", result.suite,
               result.passed, result.models, result.skipped, result.min_margin);
  }
  if (!out_path.empty()) {
    write_text(out_path, report.dump(2) + "\n");
  }
  if (!all_ok) {
    fmt::print(stderr,
               "error: property suite produced a counterexample witness; "
               "see the JSON report\n");
    if (out_path.empty()) std::cerr << report.dump(2) << "\n";
    return kExitAssertionFailure;
  }
  return kExitOk;
}

int cmd_saturate(bool exact_only, bool mc_only, std::int64_t trials,
                 std::uint64_t seed, std::uint64_t stream) {
  const bool show_exact = !mc_only;
  const bool show_mc = !exact_only;
  const ExperimentConfig config = saturating_config(trials, {seed, stream});

  fmt::print("saturating configuration: octant model, l = {:.9f}, settings "
             "(0, pi/2, pi/4, -pi/4), delta_t = 1.5\n\n",
             kSaturatingBandHeight);

  std::optional<ExactChsh> exact;
  if (show_exact) {
    exact = exact_chsh(config.model, config.settings, config.window);
  }
  std::optional<ChshEstimate> mc;
  if (show_mc) {
    mc = run_chsh(config, resolve_lane_count(0));
  }

  const auto cell = [](std::optional<double> v) {
    return v ? fmt::format("{:>14.9f}", *v) : std::string(14, ' ');
  };
  fmt::print("{:<16}{:>14}{}\n", "quantity", show_exact ? "exact" : "",
             show_mc ? fmt::format("{:>16}{:>12}", "monte-carlo", "std-error") : "");

  const auto row = [&](const char* name, std::optional<double> exact_v,
                       std::optional<double> mc_v, std::optional<double> se) {
    fmt::print("{:<16}{}", name, show_exact ? cell(exact_v) : "");
    if (show_mc) fmt::print("  {}{}", cell(mc_v), se ? fmt::format("{:>12.2e}", *se) : "");
    fmt::print("\n");
  };

  row("gamma", exact ? std::optional(exact->gamma) : std::nullopt,
      mc ? std::optional(mc->gamma_min) : std::nullopt, std::nullopt);
  for (int k = 0; k < 4; ++k) {
    row(fmt::format("E({})", kPairNames[k]).c_str(),
        exact ? exact->pairs[k].conditional_correlation : std::nullopt,
        mc ? mc->pairs[k].e_conditional : std::nullopt,
        mc ? std::optional(mc->pairs[k].std_error) : std::nullopt);
  }
  row("S", exact ? exact->s_value : std::nullopt,
      mc ? mc->s_value : std::nullopt,
      mc ? std::optional(mc->s_std_error) : std::nullopt);
  row("bound_6g4", exact ? exact->bound_gamma : std::nullopt,
      mc ? mc->bound_gamma : std::nullopt, std::nullopt);
  row("margin", exact ? exact->margin : std::nullopt,
      (mc && mc->s_value && mc->bound_gamma)
          ? std::optional(*mc->bound_gamma - *mc->s_value)
          : std::nullopt,
      std::nullopt);
  if (exact && exact->common.delta) {
    row("delta", *exact->common.delta, std::nullopt, std::nullopt);
    row("bound_4m2d", 4.0 - 2.0 * *exact->common.delta, std::nullopt, std::nullopt);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-wing coincidence-window experiment lab"};
  app.require_subcommand(1);

  ModelFlags sim_flags;
  std::string sim_out;
  std::string sim_csv;
  bool sim_canonical = false;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo experiment run");
  sim_flags.add_common(simulate, /*with_config=*/true);
  simulate->add_option("--out", sim_out, "Report JSON path (default: stdout)");
  simulate->add_option("--csv", sim_csv, "Per-pair CSV path");
  simulate->add_flag("--canonical", sim_canonical,
                     "Omit the timestamp so the report depends only on (config, seed)");

  ModelFlags exact_flags;
  CLI::App* exact = app.add_subcommand("exact", "Exact sweep evaluation");
  exact_flags.add_common(exact, /*with_config=*/false);
  bool exact_full = false;
  exact->add_flag("--full", exact_full,
                  "Evaluate all four pairs plus the common part (default: the "
                  "(a,c) pair only)");

  ModelFlags scan_flags;
  std::string scan_param;
  double scan_from = 0.0;
  double scan_to = 1.0;
  int scan_steps = 21;
  std::string scan_out;
  CLI::App* scan_cmd = app.add_subcommand("scan", "Parameter scan to CSV");
  scan_flags.add_common(scan_cmd, /*with_config=*/false);
  scan_cmd->add_option("--param", scan_param, "l, delta_t or relative_angle")
      ->required()
      ->check(CLI::IsMember({"l", "delta_t", "relative_angle"}));
  scan_cmd->add_option("--from", scan_from, "First parameter value")->required();
  scan_cmd->add_option("--to", scan_to, "Last parameter value")->required();
  scan_cmd->add_option("--steps", scan_steps, "Number of rows (>= 2)");
  scan_cmd->add_option("--out", scan_out, "CSV path (default: stdout)");

  std::string verify_suite = "all";
  int verify_models = 10000;
  std::uint64_t verify_seed = 7;
  std::uint64_t verify_stream = 0;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "Inequality property suites");
  verify->add_option("--suite", verify_suite, "theorem2, proof-chain, saturation or all")
      ->check(CLI::IsMember({"theorem2", "proof-chain", "saturation", "all"}));
  verify->add_option("--models", verify_models, "Number of random models per suite");
  verify->add_option("--seed", verify_seed, "RNG seed");
  verify->add_option("--stream", verify_stream, "RNG stream");
  verify->add_option("--out", verify_out, "JSON report path");

  bool sat_exact = false;
  bool sat_mc = false;
  std::int64_t sat_trials = 1000000;
  std::uint64_t sat_seed = 42;
  std::uint64_t sat_stream = 0;
  CLI::App* saturate = app.add_subcommand(
      "saturate", "Run the canonical saturating configuration");
  saturate->add_flag("--exact", sat_exact, "Exact table only");
  saturate->add_flag("--mc", sat_mc, "Monte Carlo table only");
  saturate->add_option("--trials", sat_trials, "Trials per pair for the MC column");
  saturate->add_option("--seed", sat_seed, "RNG seed");
  saturate->add_option("--stream", sat_stream, "RNG stream");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(simulate)) {
      return cmd_simulate(sim_flags, sim_out, sim_csv, sim_canonical);
    }
    if (app.got_subcommand(exact)) {
      return cmd_exact(exact_flags, !exact_full);
    }
    if (app.got_subcommand(scan_cmd)) {
      return cmd_scan(scan_flags, scan_param, scan_from, scan_to, scan_steps, scan_out);
    }
    if (app.got_subcommand(verify)) {
      return cmd_verify(verify_suite, verify_models, verify_seed, verify_stream,
                        verify_out);
    }
    if (app.got_subcommand(saturate)) {
      if (sat_exact && sat_mc) {
        throw ConfigError("--exact and --mc are mutually exclusive");
      }
      return cmd_saturate(sat_exact, sat_mc, sat_trials, sat_seed, sat_stream);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
