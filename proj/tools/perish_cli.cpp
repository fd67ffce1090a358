// Command-line runner for the experiments. Usage: perish <experiment> [options]
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perish/experiments.hpp"

namespace {

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using perish::ExperimentConfig;
  CLI::App app{"Posted pricing with perishable items: simulations, bounds and lower-bound constructions"};
  app.set_version_flag("--version", "perish 1.0");

  ExperimentConfig flags;
  std::string config_path;
  app.add_option("experiment", flags.experiment, "One of: " + join(perish::experiment_names()));
  app.add_option("--config", config_path, "JSON config; command-line flags override its values");

  struct Override {
    CLI::Option* opt;
    void (*copy)(ExperimentConfig&, const ExperimentConfig&);
  };
  std::vector<Override> overrides;
  auto bind = [&](CLI::Option* opt, void (*copy)(ExperimentConfig&, const ExperimentConfig&)) {
    overrides.push_back({opt, copy});
  };
  bind(app.add_option("--horizon", flags.horizon, "Horizon family or spec (geometric, deterministic, uniform, truncated-geometric, pmf:T@P,...)"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.horizon = f.horizon; });
  bind(app.add_option("--mean", flags.mean, "Horizon mean for bare family names"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.mean = f.mean; });
  bind(app.add_option("--cap", flags.cap, "Cap of a truncated geometric horizon (0: 4 x mean)"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.cap = f.cap; });
  bind(app.add_option("--m", flags.m, "Number of items (comma-separated list allowed)")->delimiter(','),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.m = f.m; });
  bind(app.add_option("--lambda", flags.lambda, "Per-step departure rate"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.lambda = f.lambda; });
  bind(app.add_option("--alpha", flags.alpha, "Pareto shape (list allowed)")->delimiter(','),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.alpha = f.alpha; });
  bind(app.add_option("--c", flags.c, "General-horizon construction parameter (list allowed)")->delimiter(','),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.c = f.c; });
  bind(app.add_option("--values", flags.values, "Value law: uniform-int:LO:HI, atoms:V@P,..., pareto:A[:CAP], point:V"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.values = f.values; });
  bind(app.add_option("--policy", flags.policy,
                      "single_fixed, multiple_mhr, balancing, blind, odd, even, single_item, fixed:P, accept:Q"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.policy = f.policy; });
  bind(app.add_option("--trials", flags.trials, "Monte Carlo trials")->check(CLI::PositiveNumber),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.trials = f.trials; });
  bind(app.add_option("--seed", flags.seed, "Master seed"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.seed = f.seed; });
  bind(app.add_option("--output,-o", flags.output, "Output file (default: $PERISH_OUTPUT_DIR/<experiment>.<format> or stdout)"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.output = f.output; });
  bind(app.add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"})),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.format = f.format; });
  bind(app.add_option("--rho", flags.rho, "Stage split ratio"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.rho = f.rho; });
  bind(app.add_flag("--verbose,-v", flags.verbose, "Diagnostics on stderr"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.verbose = f.verbose; });
  bind(app.add_option("--threads", flags.threads, "Worker threads (0: all available)"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.threads = f.threads; });
  bind(app.add_option("--j", flags.j, "Walk lengths for walk-table")->delimiter(','),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.j = f.j; });
  bind(app.add_option("--x", flags.x, "Grid points for walk-table")->delimiter(','),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.x = f.x; });
  bind(app.add_option("--instances", flags.instances, "Random instances for vpro-verify"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.instances = f.instances; });
  bind(app.add_option("--c-max", flags.c_max, "Largest c checked by sosd-check"),
       [](ExperimentConfig& c, const ExperimentConfig& f) { c.c_max = f.c_max; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = perish::load_config_file(config_path);
    if (!flags.experiment.empty()) cfg.experiment = flags.experiment;
    for (const auto& o : overrides)
      if (o.opt->count() > 0) o.copy(cfg, flags);
    if (cfg.experiment.empty()) {
      std::cerr << "error: no experiment given; choose one of " << join(perish::experiment_names()) << '\n';
      return 1;
    }
    return perish::run(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
