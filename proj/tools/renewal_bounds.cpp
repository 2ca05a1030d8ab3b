// renewal-bounds: constants, bound curves and Monte Carlo error experiments
// for renewal-process classification ensembles.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "renewal/experiment.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string profile;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "JSON config file (or a run manifest)")->required();
  cmd->add_option("--out", opt.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", opt.seed, "master seed (overrides the config)");
  cmd->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--profile", opt.profile, "config profile")->check(CLI::IsMember({"ci", "paper"}));
}

int run(const std::string& name, const Options& opt, CLI::App& app) {
  using namespace renewal;
  ExperimentConfig config;
  try {
    config = load_config(opt.config, opt.profile);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
  if (app.get_subcommand(name)->count("--seed")) override_seed(config, opt.seed);
  if (opt.threads) override_threads(config, opt.threads);
  if (!opt.out.empty()) override_output_dir(config, opt.out);

  CommandOutcome outcome;
  try {
    if (name == "constants") outcome = cmd_constants(config);
    else if (name == "bounds") outcome = cmd_bounds(config);
    else if (name == "experiment") outcome = cmd_experiment(config);
    else outcome = cmd_validate(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
  for (const auto& m : outcome.messages) std::cerr << m << '\n';
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-rate bounds for renewal-process classification"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"constants", "bounds", "experiment", "validate"}) {
    const char* help = std::string(name) == "constants"    ? "pair constants and dominant-pair aggregates"
                       : std::string(name) == "bounds"     ? "asymptotic upper/lower bound curves over T"
                       : std::string(name) == "experiment" ? "Monte Carlo error rates with bounds and manifest"
                                                           : "assumption and simulator diagnostics";
    add_common(app.add_subcommand(name, help), opt);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return run(app.get_subcommands().front()->get_name(), opt, app);
}
