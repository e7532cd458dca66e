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

#include "bellsim/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace bellsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ConfigError("config error: " + message); }

void check_known_keys(const ordered_json& obj, const std::string& scope,
                      std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      fail("unknown key \"" + (scope.empty() ? item.key() : scope + "." + item.key()) + "\"");
    }
  }
}

const ordered_json& require_key(const ordered_json& obj, const std::string& scope,
                                const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail("missing key \"" + (scope.empty() ? std::string(key) : scope + "." + key) + "\"");
  }
  return *it;
}

double number_or_fail(const ordered_json& v, const std::string& key) {
  if (!v.is_number()) fail("\"" + key + "\" must be a number");
  return v.get<double>();
}

double angle_or_fail(const ordered_json& v, const std::string& key) {
  if (v.is_string()) {
    try {
      return parse_angle(v.get<std::string>());
    } catch (const ConfigError& e) {
      fail("\"" + key + "\": " + e.what());
    }
  }
  return number_or_fail(v, key);
}

std::uint64_t uint64_or_fail(const ordered_json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  fail("\"" + key + "\" must be a non-negative integer");
}

ordered_json optional_to_json(std::optional<double> v) {
  if (v) return *v;
  return nullptr;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

double parse_angle(const std::string& text) {
  std::string s;
  for (const char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.empty()) throw ConfigError("empty angle");

  const auto parse_number = [](std::string_view v, double& out) {
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
  };

  double plain = 0.0;
  if (parse_number(s, plain)) {
    if (!std::isfinite(plain)) throw ConfigError("angle must be finite");
    return plain;
  }

  std::string_view rest = s;
  double sign = 1.0;
  if (rest.starts_with('+') || rest.starts_with('-')) {
    sign = rest.front() == '-' ? -1.0 : 1.0;
    rest.remove_prefix(1);
  }
  const std::size_t pi_pos = rest.find("pi");
  if (pi_pos == std::string_view::npos) {
    throw ConfigError("cannot parse angle \"" + text + "\" (expected radians or a pi expression)");
  }
  double coefficient = 1.0;
  if (pi_pos > 0 && !parse_number(rest.substr(0, pi_pos), coefficient)) {
    throw ConfigError("cannot parse angle \"" + text + "\"");
  }
  rest.remove_prefix(pi_pos + 2);
  double divisor = 1.0;
  if (!rest.empty()) {
    if (!rest.starts_with('/') || !parse_number(rest.substr(1), divisor) || divisor == 0.0) {
      throw ConfigError("cannot parse angle \"" + text + "\"");
    }
  }
  return sign * coefficient * std::numbers::pi / divisor;
}

ExperimentConfig config_from_json(const ordered_json& j) {
  if (!j.is_object()) fail("top level must be an object");
  check_known_keys(j, "",
                   {"schema_version", "model", "settings", "delta_t",
                    "trials_per_pair", "seed"});

  if (auto it = j.find("schema_version"); it != j.end()) {
    if (!it->is_number_integer() || it->get<int>() != kSchemaVersion) {
      fail("\"schema_version\" must be " + std::to_string(kSchemaVersion));
    }
  }

  ExperimentConfig config;

  const ordered_json& model = require_key(j, "", "model");
  if (!model.is_object()) fail("\"model\" must be an object");
  check_known_keys(model, "model", {"name", "l"});
  const ordered_json& name = require_key(model, "model", "name");
  if (!name.is_string()) fail("\"model.name\" must be a string");
  const auto kind = model_kind_from_string(name.get<std::string>());
  if (!kind) {
    fail("\"model.name\" must be one of octant, classic, qm");
  }
  config.model.kind = *kind;
  if (*kind == ModelKind::octant) {
    const double l = number_or_fail(require_key(model, "model", "l"), "model.l");
    if (!(l >= 0.0 && l <= 1.0)) fail("\"model.l\" out of [0,1]");
    config.model.band_height = l;
  } else if (model.contains("l")) {
    fail("\"model.l\" is only valid for the octant model");
  }

  const ordered_json& settings = require_key(j, "", "settings");
  if (!settings.is_object()) fail("\"settings\" must be an object");
  check_known_keys(settings, "settings", {"a", "b", "c", "d"});
  const char* names[4] = {"a", "b", "c", "d"};
  for (int i = 0; i < 4; ++i) {
    const std::string key = std::string("settings.") + names[i];
    const double radians = angle_or_fail(require_key(settings, "settings", names[i]), key);
    if (!std::isfinite(radians)) fail("\"" + key + "\" must be finite");
    config.settings[i] = Setting(radians);
  }

  const double delta_t = number_or_fail(require_key(j, "", "delta_t"), "delta_t");
  if (!(std::isfinite(delta_t) && delta_t > 0.0)) fail("\"delta_t\" must be > 0");
  config.window = CoincidenceWindow(delta_t);

  const ordered_json& trials = require_key(j, "", "trials_per_pair");
  if (!trials.is_number_integer() || trials.get<std::int64_t>() < 1) {
    fail("\"trials_per_pair\" must be an integer >= 1");
  }
  config.trials_per_pair = trials.get<std::int64_t>();

  const ordered_json& seed = require_key(j, "", "seed");
  if (!seed.is_object()) fail("\"seed\" must be an object");
  check_known_keys(seed, "seed", {"seed", "stream"});
  config.seed.seed = uint64_or_fail(require_key(seed, "seed", "seed"), "seed.seed");
  config.seed.stream = uint64_or_fail(require_key(seed, "seed", "stream"), "seed.stream");

  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open \"" + path + "\"");
  ordered_json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail("\"" + path + "\" is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

ordered_json config_to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["model"]["name"] = to_string(config.model.kind);
  if (config.model.kind == ModelKind::octant) {
    j["model"]["l"] = config.model.band_height;
  }
  const char* names[4] = {"a", "b", "c", "d"};
  for (int i = 0; i < 4; ++i) {
    j["settings"][names[i]] = config.settings[i].angle();
  }
  j["delta_t"] = config.window.delta_t();
  j["trials_per_pair"] = config.trials_per_pair;
  j["seed"]["seed"] = config.seed.seed;
  j["seed"]["stream"] = config.seed.stream;
  return j;
}

ordered_json pair_statistics_to_json(const PairStatistics& stats) {
  ordered_json j;
  j["p_coincidence"] = stats.p_coincidence;
  j["p_equal_and_coincident"] = stats.p_equal_and_coincident;
  j["p_unequal_and_coincident"] = stats.p_unequal_and_coincident;
  j["conditional_correlation"] = optional_to_json(stats.conditional_correlation);
  return j;
}

ordered_json exact_chsh_to_json(const ExactChsh& exact) {
  ordered_json j;
  for (int k = 0; k < 4; ++k) {
    j["pairs"][kPairNames[k]] = pair_statistics_to_json(exact.pairs[k]);
  }
  j["gamma"] = exact.gamma;
  j["p_intersection"] = exact.common.p_intersection;
  j["delta"] = optional_to_json(exact.common.delta);
  j["s_value"] = optional_to_json(exact.s_value);
  j["bound_classic"] = 2.0;
  if (exact.common.delta) {
    j["bound_thm2"] = 4.0 - 2.0 * *exact.common.delta;
  } else {
    j["bound_thm2"] = nullptr;
  }
  j["bound_gamma"] = optional_to_json(exact.bound_gamma);
  j["margin"] = optional_to_json(exact.margin);
  return j;
}

ordered_json chsh_to_json(const ChshEstimate& est,
                          const std::array<Setting, 4>& settings) {
  ordered_json j;
  ordered_json pairs = ordered_json::array();
  for (int k = 0; k < 4; ++k) {
    const PairEstimate& p = est.pairs[k];
    ordered_json pj;
    pj["pair"] = kPairNames[k];
    pj["left_setting"] = settings[kPairLeftIndex[k]].angle();
    pj["right_setting"] = settings[kPairRightIndex[k]].angle();
    pj["n_total"] = p.n_total;
    pj["n_coincident"] = p.n_coincident;
    pj["gamma_hat"] = p.gamma_hat;
    pj["e_conditional"] = optional_to_json(p.e_conditional);
    pj["std_error"] = p.std_error;
    pj["defined"] = p.e_conditional.has_value();
    pairs.push_back(std::move(pj));
  }
  j["pairs"] = std::move(pairs);
  j["s_value"] = optional_to_json(est.s_value);
  j["s_std_error"] = est.s_std_error;
  j["gamma_min"] = est.gamma_min;
  j["bound_classic"] = est.bound_classic;
  j["bound_gamma"] = optional_to_json(est.bound_gamma);
  return j;
}

ordered_json finite_model_to_json(const FiniteModel& model) {
  ordered_json atoms = ordered_json::array();
  for (const auto& at : model.atoms) {
    ordered_json a;
    a["weight"] = at.weight;
    a["a"] = at.a;
    a["b"] = at.b;
    a["c"] = at.c;
    a["d"] = at.d;
    a["sets"] = {at.in_pair_set[0], at.in_pair_set[1], at.in_pair_set[2],
                 at.in_pair_set[3]};
    atoms.push_back(std::move(a));
  }
  ordered_json j;
  j["atoms"] = std::move(atoms);
  return j;
}

ordered_json suite_to_json(const SuiteResult& result) {
  ordered_json j;
  j["suite"] = result.suite;
  j["models"] = result.models;
  j["passed"] = result.passed;
  j["failed"] = result.failed;
  j["skipped"] = result.skipped;
  j["min_margin"] = result.min_margin;
  j["max_margin"] = result.max_margin;
  ordered_json witnesses = ordered_json::array();
  for (const auto& w : result.witnesses) witnesses.push_back(finite_model_to_json(w));
  j["witnesses"] = std::move(witnesses);
  return j;
}

ordered_json crosscheck_to_json(const McExactReport& report) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["pair"] = row.pair;
    r["quantity"] = row.quantity;
    r["exact"] = row.exact_value;
    r["mc"] = row.mc_value;
    r["std_error"] = row.std_error;
    r["z"] = std::isfinite(row.z) ? ordered_json(row.z) : ordered_json(nullptr);
    rows.push_back(std::move(r));
  }
  ordered_json j;
  j["rows"] = std::move(rows);
  j["max_abs_z"] = std::isfinite(report.max_abs_z) ? ordered_json(report.max_abs_z)
                                                   : ordered_json(nullptr);
  return j;
}

RunVerdicts make_verdicts(std::optional<double> s_value,
                          std::optional<double> bound_gamma, double tol) {
  RunVerdicts v;
  if (!s_value) return v;
  v.violates_classic_bound = *s_value > 2.0;
  if (bound_gamma) {
    v.exceeds_coincidence_bound = *s_value > *bound_gamma + tol;
    v.saturates = std::abs(*s_value - *bound_gamma) <= tol;
  }
  return v;
}

ordered_json verdicts_to_json(const RunVerdicts& v) {
  ordered_json j;
  j["violates_classic_bound"] = v.violates_classic_bound;
  j["exceeds_coincidence_bound"] = v.exceeds_coincidence_bound;
  j["saturates"] = v.saturates;
  return j;
}

ordered_json simulate_report(const ExperimentConfig& config, const ChshEstimate& est,
                             const std::optional<ExactChsh>& exact_reference,
                             bool canonical) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "bellsim";
  j["mode"] = "simulate";
  j["config"] = config_to_json(config);
  j["chsh"] = chsh_to_json(est, config.settings);
  j["exact_reference"] =
      exact_reference ? exact_chsh_to_json(*exact_reference) : ordered_json(nullptr);
  j["crosscheck"] = crosscheck_to_json(
      crosscheck_estimate(est, config.model, config.settings, config.window));

  // Saturation tolerance: 4 combined standard errors (S and, through
  // 6/gamma - 4, the min-gamma pair), floored at the exact tolerance.
  double tol = kTheoremTol;
  if (est.s_value && est.gamma_min > 0.0) {
    double gamma_var = 0.0;
    for (const auto& p : est.pairs) {
      if (p.gamma_hat == est.gamma_min && p.n_total > 0) {
        gamma_var = p.gamma_hat * (1.0 - p.gamma_hat) / static_cast<double>(p.n_total);
        break;
      }
    }
    const double dbound_dgamma = 6.0 / (est.gamma_min * est.gamma_min);
    const double combined = std::sqrt(est.s_std_error * est.s_std_error +
                                      dbound_dgamma * dbound_dgamma * gamma_var);
    tol = std::max(tol, 4.0 * combined);
  }
  j["verdicts"] = verdicts_to_json(make_verdicts(est.s_value, est.bound_gamma, tol));

  ordered_json provenance;
  provenance["seed"]["seed"] = config.seed.seed;
  provenance["seed"]["stream"] = config.seed.stream;
  provenance["version"] = kToolVersion;
  if (!canonical) {
    provenance["timestamp"] = utc_timestamp();
  }
  j["provenance"] = std::move(provenance);
  return j;
}

std::string format_double(double x) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

std::string pairs_csv(const ChshEstimate& est, const std::array<Setting, 4>& settings) {
  std::ostringstream out;
  out << "pair,left_setting,right_setting,n_total,n_coincident,gamma_hat,"
         "e_conditional,std_error\n";
  for (int k = 0; k < 4; ++k) {
    const PairEstimate& p = est.pairs[k];
    out << kPairNames[k] << ',' << format_double(settings[kPairLeftIndex[k]].angle())
        << ',' << format_double(settings[kPairRightIndex[k]].angle()) << ','
        << p.n_total << ',' << p.n_coincident << ',' << format_double(p.gamma_hat)
        << ',' << (p.e_conditional ? format_double(*p.e_conditional) : std::string())
        << ',' << format_double(p.std_error) << '\n';
  }
  return out.str();
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream out;
  out << "value,gamma,S,bound_6g4,margin\n";
  for (const auto& row : rows) {
    out << format_double(row.value) << ',' << format_double(row.gamma) << ','
        << (row.s_value ? format_double(*row.s_value) : std::string()) << ','
        << (row.bound_gamma ? format_double(*row.bound_gamma) : std::string()) << ','
        << (row.margin ? format_double(*row.margin) : std::string()) << '\n';
  }
  return out.str();
}

}  // namespace bellsim
