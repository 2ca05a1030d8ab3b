#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "renewal/bounds.hpp"
#include "renewal/classifier.hpp"
#include "renewal/renewal_sim.hpp"

namespace renewal {

/// Schema or semantic error in a config; `path` names the offending field,
/// e.g. "classes[2].rates[1]".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct TrialRule {
  enum class Kind { kFixed, kBudgetOverHR };
  Kind kind = Kind::kFixed;
  /// n for kFixed, the budget B for kBudgetOverHR.
  double value = 10000;

  /// Trials at a grid point: n, or ceil(B / H_R) with H_R the asymptotic
  /// Bhattacharyya entropy bound at that T.
  std::size_t trials(double entropy_bound) const;
};

/**
 * Config file schema (JSON):
 *
 *   classes     list of {"family": "exponential", "rate": r}
 *                       {"family": "gamma", "shape": a, "rate": b}
 *                       {"family": "erlang_mixture", "orders": [...], "rates": [...], "weights": [...]}
 *               weights may be numbers or "p/q" strings
 *   priors      optional list, equal priors when absent
 *   T_grid      list of T values, or {"min": a, "max": b, "count": n} (evenly spaced)
 *   trials      n, {"fixed": n} or {"budget_over_HR": B}
 *   seed        unsigned 64-bit master seed (default 1)
 *   simulator   "thinning" (default) or "inversion"
 *   threads     worker threads (default 1)
 *   output_dir  default "results"
 *   profiles    optional {"name": {...}}; a selected profile is merged over
 *               the top level as a JSON merge patch
 *
 * A run manifest is also accepted: its "config" member is used.
 */
struct ExperimentConfig {
  std::vector<IETModel> classes;
  std::vector<double> priors;
  std::vector<double> T_grid;
  TrialRule trial_rule;
  std::uint64_t seed = 1;
  SimulatorKind simulator = SimulatorKind::kThinning;
  unsigned threads = 1;
  std::string output_dir = "results";
  std::string profile;
  /// Effective config after the profile merge and command-line overrides.
  nlohmann::json effective;

  ClassEnsemble ensemble() const { return ClassEnsemble(classes, priors); }
};

ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& profile = {});
ExperimentConfig load_config(const std::filesystem::path& path, const std::string& profile = {});

/// Command-line overrides applied after parsing (and echoed in the manifest).
void override_seed(ExperimentConfig& config, std::uint64_t seed);
void override_threads(ExperimentConfig& config, unsigned threads);
void override_output_dir(ExperimentConfig& config, const std::string& dir);

/// Stream offset of grid point i, so grid points never share RNG streams.
std::uint64_t grid_stream_offset(std::size_t grid_index);

struct CommandOutcome {
  int exit_code = 0;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> messages;
};

/// constants.csv, aggregate.csv and assumptions.csv. Exit code 2 when any
/// pair fails a check; all rows are still written.
CommandOutcome cmd_constants(const ExperimentConfig& config);
/// bounds.csv and aggregate.csv.
CommandOutcome cmd_bounds(const ExperimentConfig& config);
/// Constants, bounds, errors.csv (one row flushed per grid point) and manifest.json.
CommandOutcome cmd_experiment(const ExperimentConfig& config);
/// validation.json: assumption checks per pair, normalization and hazard
/// relations per class, thinning vs inversion KS p-values per class.
CommandOutcome cmd_validate(const ExperimentConfig& config);

/// Writes the aggregate constants in both amplitude conventions.
void write_aggregate_csv(std::ostream& out, const AsymptoticConstants& a);

}  // namespace renewal
