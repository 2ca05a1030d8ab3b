#include "renewal/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "renewal/affinities.hpp"
#include "renewal/parallel.hpp"
#include "renewal/stats.hpp"

namespace renewal {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr std::size_t kValidateSamples = 4000;
constexpr double kValidateKsLevel = 1e-3;

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::string field(const std::string& path, const std::string& name) {
  return path.empty() ? name : path + "." + name;
}

const json& require(const json& obj, const std::string& path, const std::string& name) {
  if (!obj.contains(name)) throw ConfigError(field(path, name), "missing required field");
  return obj.at(name);
}

double number(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    // "p/q" fractions keep weights like 1/6 exact enough to sum to 1.
    const auto s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash == std::string::npos) {
        const double x = std::stod(s, &used);
        if (used == s.size()) return x;
      } else {
        const double num = std::stod(s.substr(0, slash), &used);
        if (used == slash) {
          const auto rest = s.substr(slash + 1);
          const double den = std::stod(rest, &used);
          if (used == rest.size() && den != 0.0) return num / den;
        }
      }
    } catch (const std::logic_error&) {
    }
    throw ConfigError(path, "cannot parse number '" + s + "'");
  }
  throw ConfigError(path, "expected a number");
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << "must be finite and > 0 (got " << x << ")";
    throw ConfigError(path, msg.str());
  }
  return x;
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array");
  return v;
}

IETModel parse_class(const json& c, const std::string& path) {
  if (!c.is_object()) throw ConfigError(path, "expected an object");
  const json& fam = require(c, path, "family");
  if (!fam.is_string()) throw ConfigError(field(path, "family"), "expected a string");
  const auto family = fam.get<std::string>();
  try {
    if (family == "exponential") return IETModel::exponential(positive(require(c, path, "rate"), field(path, "rate")));
    if (family == "gamma")
      return IETModel::gamma(positive(require(c, path, "shape"), field(path, "shape")),
                             positive(require(c, path, "rate"), field(path, "rate")));
    if (family == "erlang_mixture") {
      const auto orders_path = field(path, "orders");
      const auto rates_path = field(path, "rates");
      const auto weights_path = field(path, "weights");
      const json& orders = array(require(c, path, "orders"), orders_path);
      const json& rates = array(require(c, path, "rates"), rates_path);
      const json& weights = array(require(c, path, "weights"), weights_path);
      if (orders.empty()) throw ConfigError(orders_path, "needs at least one component");
      if (rates.size() != orders.size()) throw ConfigError(rates_path, "length differs from orders");
      if (weights.size() != orders.size()) throw ConfigError(weights_path, "length differs from orders");
      std::vector<ErlangComponent> comps;
      for (std::size_t i = 0; i < orders.size(); ++i) {
        if (!orders[i].is_number_integer() || orders[i].get<long long>() < 1)
          throw ConfigError(at(orders_path, i), "expected an integer >= 1");
        const double w = positive(weights[i], at(weights_path, i));
        if (w > 1.0) throw ConfigError(at(weights_path, i), "must be <= 1");
        comps.push_back({orders[i].get<int>(), positive(rates[i], at(rates_path, i)), w});
      }
      try {
        return IETModel::erlang_mixture(std::move(comps));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(weights_path, e.what());
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(field(path, "family"),
                    "unknown family '" + family + "' (expected exponential, gamma or erlang_mixture)");
}

std::vector<double> parse_grid(const json& g, const std::string& path) {
  std::vector<double> grid;
  if (g.is_array()) {
    for (std::size_t i = 0; i < g.size(); ++i) grid.push_back(positive(g[i], at(path, i)));
  } else if (g.is_object()) {
    const double lo = positive(require(g, path, "min"), field(path, "min"));
    const double hi = positive(require(g, path, "max"), field(path, "max"));
    const json& count = require(g, path, "count");
    if (!count.is_number_integer() || count.get<long long>() < 1)
      throw ConfigError(field(path, "count"), "expected an integer >= 1");
    const auto n = count.get<std::size_t>();
    if (hi < lo) throw ConfigError(field(path, "max"), "must be >= min");
    if (n == 1 && hi != lo) throw ConfigError(field(path, "count"), "count 1 needs min == max");
    for (std::size_t i = 0; i < n; ++i)
      grid.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  } else {
    throw ConfigError(path, "expected a list or {min, max, count}");
  }
  if (grid.empty()) throw ConfigError(path, "empty grid");
  return grid;
}

std::size_t positive_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(path, "expected an integer >= 1");
  return v.get<std::size_t>();
}

TrialRule parse_trials(const json& t, const std::string& path) {
  TrialRule rule;
  if (t.is_number()) {
    rule.value = static_cast<double>(positive_count(t, path));
  } else if (t.is_object() && t.contains("fixed")) {
    rule.value = static_cast<double>(positive_count(t.at("fixed"), field(path, "fixed")));
  } else if (t.is_object() && t.contains("budget_over_HR")) {
    rule.kind = TrialRule::Kind::kBudgetOverHR;
    rule.value = positive(t.at("budget_over_HR"), field(path, "budget_over_HR"));
  } else {
    throw ConfigError(path, "expected n, {\"fixed\": n} or {\"budget_over_HR\": B}");
  }
  return rule;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

fs::path prepare_dir(const ExperimentConfig& config) {
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_assumptions_csv(std::ostream& out, const PairConstantsMatrix& matrix) {
  out << "k,j,check,passed,value,detail\n" << std::setprecision(12);
  for (std::size_t k = 0; k < matrix.size(); ++k)
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (k == j) continue;
      for (const auto& c : matrix.at(k, j).diagnostics.checks) {
        std::string detail = c.detail;
        std::replace(detail.begin(), detail.end(), '"', '\'');
        out << k + 1 << ',' << j + 1 << ',' << c.name << ',' << (c.passed ? 1 : 0) << ',' << c.value << ",\""
            << detail << "\"\n";
      }
    }
}

std::size_t failing_pairs(const PairConstantsMatrix& matrix) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < matrix.size(); ++k)
    for (std::size_t j = 0; j < matrix.size(); ++j)
      if (k != j && !matrix.at(k, j).diagnostics.all_passed()) ++n;
  return n;
}

json pairs_json(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  json out = json::array();
  for (const auto& [k, j] : pairs) out.push_back({k + 1, j + 1});
  return out;
}

struct ConstantsStage {
  PairConstantsMatrix matrix;
  std::optional<AsymptoticConstants> aggregate;
};

ConstantsStage run_constants_stage(const ExperimentConfig& config, const fs::path& dir, CommandOutcome& outcome) {
  ConstantsStage stage;
  const auto ensemble = config.ensemble();
  stage.matrix = compute_constants_matrix(ensemble, config.threads, true);

  const auto constants_path = dir / "constants.csv";
  auto constants_out = open_output(constants_path);
  write_constants_csv(constants_out, stage.matrix);
  outcome.files.push_back(constants_path);

  const auto assumptions_path = dir / "assumptions.csv";
  auto assumptions_out = open_output(assumptions_path);
  write_assumptions_csv(assumptions_out, stage.matrix);
  outcome.files.push_back(assumptions_path);

  if (const auto bad = failing_pairs(stage.matrix); bad > 0) {
    outcome.exit_code = 2;
    outcome.messages.push_back(std::to_string(bad) + " pair(s) failed assumption checks; see assumptions.csv");
  }
  try {
    stage.aggregate = aggregate_asymptotics(config.priors, stage.matrix);
  } catch (const NumericError& e) {
    outcome.exit_code = 2;
    outcome.messages.push_back(std::string("aggregation failed: ") + e.what());
    return stage;
  }
  const auto aggregate_path = dir / "aggregate.csv";
  auto aggregate_out = open_output(aggregate_path);
  write_aggregate_csv(aggregate_out, *stage.aggregate);
  outcome.files.push_back(aggregate_path);
  if (stage.aggregate->degenerate())
    outcome.messages.push_back("degenerate ensemble: a dominant rate is 0 (duplicate classes?)");
  return stage;
}

double entropy_bound_at(const AsymptoticConstants& a, double T) {
  return a.alpha_star / std::numbers::ln2 * std::exp(-a.gamma_star * T);
}

json class_json(const IETModel& m) {
  json out;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Exponential>) {
          out = {{"family", "exponential"}, {"rate", p.rate}};
        } else if constexpr (std::is_same_v<P, Gamma>) {
          out = {{"family", "gamma"}, {"shape", p.shape}, {"rate", p.rate}};
        } else {
          json orders = json::array(), rates = json::array(), weights = json::array();
          for (const auto& c : p.components) {
            orders.push_back(c.order);
            rates.push_back(c.rate);
            weights.push_back(c.weight);
          }
          out = {{"family", "erlang_mixture"}, {"orders", orders}, {"rates", rates}, {"weights", weights}};
        }
      },
      m.params());
  return out;
}

}  // namespace

std::size_t TrialRule::trials(double entropy_bound) const {
  if (kind == Kind::kFixed) return static_cast<std::size_t>(value);
  if (!(entropy_bound > 0.0)) throw NumericError("budget_over_HR needs a positive entropy bound");
  const double n = std::ceil(value / entropy_bound);
  if (!(n < 1e15)) throw NumericError("budget_over_HR gives an unreasonable trial count");
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

ExperimentConfig parse_config(const json& input, const std::string& profile) {
  if (!input.is_object()) throw ConfigError("", "config must be a JSON object");
  json doc = input;
  if (doc.contains("manifest_version") && doc.contains("config")) doc = doc.at("config");
  if (!profile.empty()) {
    if (!doc.contains("profiles") || !doc.at("profiles").contains(profile))
      throw ConfigError("profiles." + profile, "profile not defined in config");
    const json patch = doc.at("profiles").at(profile);
    if (!patch.is_object()) throw ConfigError("profiles." + profile, "expected an object");
    doc.merge_patch(patch);
  }

  ExperimentConfig cfg;
  cfg.profile = profile;
  const json& classes = array(require(doc, "", "classes"), "classes");
  for (std::size_t i = 0; i < classes.size(); ++i) cfg.classes.push_back(parse_class(classes[i], at("classes", i)));
  if (cfg.classes.size() < 2) throw ConfigError("classes", "M >= 2 required");

  if (doc.contains("priors")) {
    const json& priors = array(doc.at("priors"), "priors");
    if (priors.size() != cfg.classes.size()) throw ConfigError("priors", "length differs from classes");
    double total = 0.0;
    for (std::size_t i = 0; i < priors.size(); ++i) {
      cfg.priors.push_back(positive(priors[i], at("priors", i)));
      total += cfg.priors.back();
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("priors", "must sum to 1");
  } else {
    cfg.priors.assign(cfg.classes.size(), 1.0 / static_cast<double>(cfg.classes.size()));
  }

  cfg.T_grid = parse_grid(require(doc, "", "T_grid"), "T_grid");
  if (doc.contains("trials")) cfg.trial_rule = parse_trials(doc.at("trials"), "trials");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed", "expected an unsigned integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("simulator")) {
    if (!doc.at("simulator").is_string()) throw ConfigError("simulator", "expected a string");
    try {
      cfg.simulator = simulator_from_string(doc.at("simulator").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("simulator", e.what());
    }
  }
  if (doc.contains("threads")) cfg.threads = static_cast<unsigned>(positive_count(doc.at("threads"), "threads"));
  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) throw ConfigError("output_dir", "expected a string");
    cfg.output_dir = doc.at("output_dir").get<std::string>();
  }
  doc.erase("profiles");
  cfg.effective = std::move(doc);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path, const std::string& profile) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "invalid JSON in " + path.string() + ": " + e.what());
  }
  return parse_config(doc, profile);
}

void override_seed(ExperimentConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.effective["seed"] = seed;
}

void override_threads(ExperimentConfig& config, unsigned threads) {
  config.threads = std::max(1u, threads);
  config.effective["threads"] = config.threads;
}

void override_output_dir(ExperimentConfig& config, const std::string& dir) {
  config.output_dir = dir;
  config.effective["output_dir"] = dir;
}

std::uint64_t grid_stream_offset(std::size_t grid_index) {
  return static_cast<std::uint64_t>(grid_index) << 40;
}

void write_aggregate_csv(std::ostream& out, const AsymptoticConstants& a) {
  const auto pairs = [](const auto& list) {
    std::ostringstream s;
    for (std::size_t i = 0; i < list.size(); ++i) s << (i ? " " : "") << list[i].first + 1 << '-' << list[i].second + 1;
    return s.str();
  };
  out << "quantity,value\n" << std::setprecision(12);
  out << "gamma_star," << a.gamma_star << '\n';
  out << "alpha_star," << a.alpha_star << '\n';
  out << "alpha_star_folded," << a.folded_alpha() << '\n';
  out << "rho_star," << a.rho_star << '\n';
  out << "c_star," << a.c_star << '\n';
  out << "c_over_rho," << a.lower_amplitude() << '\n';
  out << "c_over_rho_ln2," << a.lower_amplitude_nats() << '\n';
  out << "bhattacharyya_pairs," << pairs(a.bhattacharyya_pairs) << '\n';
  out << "kl_pairs," << pairs(a.kl_pairs) << '\n';
  out << "degenerate," << (a.degenerate() ? 1 : 0) << '\n';
}

CommandOutcome cmd_constants(const ExperimentConfig& config) {
  CommandOutcome outcome;
  const auto dir = prepare_dir(config);
  run_constants_stage(config, dir, outcome);
  return outcome;
}

CommandOutcome cmd_bounds(const ExperimentConfig& config) {
  CommandOutcome outcome;
  const auto dir = prepare_dir(config);
  const auto stage = run_constants_stage(config, dir, outcome);
  if (!stage.aggregate) return outcome;
  const auto curve = asymptotic_bound_curves(config.priors, stage.matrix, config.T_grid);
  const auto path = dir / "bounds.csv";
  auto out = open_output(path);
  write_bound_curve_csv(out, curve);
  outcome.files.push_back(path);
  return outcome;
}

CommandOutcome cmd_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  CommandOutcome outcome;
  const auto dir = prepare_dir(config);
  const auto stage = run_constants_stage(config, dir, outcome);
  if (!stage.aggregate) return outcome;
  const auto curve = asymptotic_bound_curves(config.priors, stage.matrix, config.T_grid);
  {
    const auto path = dir / "bounds.csv";
    auto out = open_output(path);
    write_bound_curve_csv(out, curve);
    outcome.files.push_back(path);
  }

  const auto ensemble = config.ensemble();
  const auto errors_path = dir / "errors.csv";
  auto errors = open_output(errors_path);
  outcome.files.push_back(errors_path);
  errors << "T,p_hat,ci_low,ci_high,n_trials,n_errors,upper,lower,lower_valid,ln_p_hat_over_T\n"
         << std::setprecision(12);
  errors.flush();
  json points = json::array();
  for (std::size_t i = 0; i < config.T_grid.size(); ++i) {
    const double T = config.T_grid[i];
    const auto n = config.trial_rule.trials(entropy_bound_at(*stage.aggregate, T));
    McOptions options;
    options.simulator = config.simulator;
    options.threads = config.threads;
    options.stream_offset = grid_stream_offset(i);
    const auto est = mc_error_rate(ensemble, T, n, config.seed, options);
    errors << T << ',' << est.p_hat << ',' << est.ci_low << ',' << est.ci_high << ',' << est.n_trials << ','
           << est.n_errors << ',' << curve.upper[i] << ',' << curve.lower[i] << ','
           << (curve.lower_valid[i] ? 1 : 0) << ',';
    if (est.n_errors > 0) errors << std::log(est.p_hat) / T;
    errors << '\n';
    errors.flush();
    points.push_back({{"T", T}, {"n_trials", n}, {"stream_offset", options.stream_offset}});
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest = {
      {"manifest_version", 1},
      {"tool", "renewal-bounds"},
      {"version", kVersion},
      {"command", "experiment"},
      {"profile", config.profile},
      {"seed", config.seed},
      {"rng", "philox4x32-10, key = master seed, counter words 2-3 = stream index"},
      {"simulator", to_string(config.simulator)},
      {"grid", points},
      {"classes", json::array()},
      {"config", config.effective},
      {"wall_time_seconds", wall},
  };
  for (const auto& m : config.classes) manifest["classes"].push_back(class_json(m));
  const auto manifest_path = dir / "manifest.json";
  write_json(manifest_path, manifest);
  outcome.files.push_back(manifest_path);
  return outcome;
}

CommandOutcome cmd_validate(const ExperimentConfig& config) {
  CommandOutcome outcome;
  const auto dir = prepare_dir(config);
  const auto ensemble = config.ensemble();
  bool all_passed = true;

  json classes = json::array();
  std::vector<json> class_reports(ensemble.size());
  parallel_for(ensemble.size(), config.threads, [&](std::size_t k) {
    const auto& m = ensemble.model(k);
    json report = {{"class", k + 1}, {"model", m.describe()}};
    bool ok = true;

    const auto mass = integrate_semi_infinite([&](double x) { return m.pdf(x); }, affinity_quadrature());
    const bool norm_ok = mass.converged && std::abs(mass.value - 1.0) < 1e-8;
    report["normalization"] = {{"value", mass.value}, {"passed", norm_ok}};
    ok = ok && norm_ok;

    const auto survivor_mass =
        integrate_semi_infinite([&](double x) { return m.survivor(x); }, affinity_quadrature());
    const bool mean_ok = survivor_mass.converged && std::abs(survivor_mass.value - m.mean()) < 1e-8 * m.mean();
    report["survivor_integral_equals_mean"] = {{"value", survivor_mass.value}, {"mean", m.mean()}, {"passed", mean_ok}};
    ok = ok && mean_ok;

    double worst = 0.0;
    for (int i = 1; i <= 40; ++i) {
      const double x = m.mean() * 0.25 * i;
      const double expected = m.hazard(x) * std::exp(-m.integrated_hazard(x));
      worst = std::max(worst, std::abs(m.pdf(x) - expected) / std::max(m.pdf(x), 1e-300));
    }
    const bool hazard_ok = worst < 1e-9;
    report["hazard_relation_max_rel_error"] = {{"value", worst}, {"passed", hazard_ok}};
    ok = ok && hazard_ok;

    std::vector<double> inversion(kValidateSamples);
    const InversionSampler inv(m);
    for (std::size_t i = 0; i < kValidateSamples; ++i) {
      RandomStream rng({config.seed, i});
      inversion[i] = inv.draw(rng);
    }
    try {
      const ThinningSampler thin(m);
      std::vector<double> thinning(kValidateSamples);
      for (std::size_t i = 0; i < kValidateSamples; ++i) {
        RandomStream rng({config.seed, (std::uint64_t{1} << 40) + i});
        thinning[i] = thin.draw(rng);
      }
      const auto ks = ks_two_sample(thinning, inversion);
      const bool ks_ok = ks.p_value > kValidateKsLevel;
      report["thinning_vs_inversion"] = {
          {"statistic", ks.statistic}, {"p_value", ks.p_value}, {"samples", kValidateSamples}, {"passed", ks_ok}};
      ok = ok && ks_ok;
    } catch (const SimulationError& e) {
      report["thinning_vs_inversion"] = {{"skipped", e.what()}, {"passed", true}};
    }
    report["passed"] = ok;
    class_reports[k] = std::move(report);
  });
  for (auto& r : class_reports) {
    all_passed = all_passed && r.at("passed").get<bool>();
    classes.push_back(std::move(r));
  }

  const auto matrix = compute_constants_matrix(ensemble, config.threads, false);
  json pairs = json::array();
  for (std::size_t k = 0; k < matrix.size(); ++k)
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      if (k == j) continue;
      const auto& pc = matrix.at(k, j);
      json checks = json::array();
      for (const auto& c : pc.diagnostics.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
      const bool ok = pc.diagnostics.all_passed();
      all_passed = all_passed && ok;
      pairs.push_back({{"k", k + 1}, {"j", j + 1}, {"passed", ok}, {"checks", checks}});
    }

  json report = {{"passed", all_passed}, {"seed", config.seed}, {"classes", classes}, {"pairs", pairs}};
  try {
    const auto a = aggregate_asymptotics(config.priors, matrix);
    report["dominant_bhattacharyya_pairs"] = pairs_json(a.bhattacharyya_pairs);
    report["dominant_kl_pairs"] = pairs_json(a.kl_pairs);
  } catch (const NumericError& e) {
    report["aggregation_error"] = e.what();
    all_passed = false;
    report["passed"] = false;
  }
  const auto path = dir / "validation.json";
  write_json(path, report);
  outcome.files.push_back(path);
  if (!all_passed) {
    outcome.exit_code = 2;
    outcome.messages.push_back("validation failed; see validation.json");
  }
  return outcome;
}

}  // namespace renewal
