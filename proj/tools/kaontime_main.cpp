// Command-line front end: computes, compares, samples and statistically
// discriminates the decay-time distributions of single kaons and entangled
// kaon pairs under the four competing prescriptions.

#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kaontime/cli_commands.hpp"

namespace {

using kaontime::RunConfig;

// Registers one CLI flag per config key; values land in the override map.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  void add(const std::string& key, const std::string& desc) {
    auto holder = std::make_shared<std::string>();
    std::string names = "--" + key;
    std::string dashed = key;
    for (auto& c : dashed)
      if (c == '_') c = '-';
    if (dashed != key) names += ",--" + dashed;
    app_->add_option(names, *holder, desc);
    values_.emplace_back(key, holder);
  }

  RunConfig overrides() const {
    RunConfig cfg;
    for (const auto& [key, holder] : values_)
      if (app_->count("--" + key) > 0) cfg.set(key, *holder);
    return cfg;
  }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::shared_ptr<std::string>>> values_;
};

void add_param_flags(FlagSet& flags) {
  flags.add("unit", "tau_s_units (default) or si_seconds");
  flags.add("tau_s", "short lifetime in seconds (SI mode)");
  flags.add("tau_l", "long lifetime in seconds (SI mode)");
  flags.add("gamma_s", "short decay rate in 1/tau_s");
  flags.add("gamma_l", "long decay rate in 1/tau_s");
  flags.add("delta_m", "mass splitting m_L - m_S");
  flags.add("epsilon_abs", "|epsilon|");
  flags.add("epsilon_arg_deg", "arg(epsilon) in degrees");
  flags.add("gamma_cp1", "override CP=+1 sector rate (hybrid rule)");
  flags.add("gamma_cp2", "override CP=-1 sector rate (hybrid rule)");
}

void add_model_flags(FlagSet& flags) {
  flags.add("state", "alpha:<rad>, beta:<rad>, singlet or general:<8 reals>");
  flags.add("channel", "11, 12, 21, 22, a comma list, or all");
  flags.add("normalization", "global or per_channel");
  flags.add("grid", "<min>:<max>:<points per axis>");
  flags.add("grid_spacing", "uniform or log");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decay-time distributions of entangled kaon pairs"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "key = value config file");

  auto* constants =
      app.add_subcommand("constants", "print the physical constants in use");
  FlagSet constants_flags(constants);
  add_param_flags(constants_flags);

  auto* density =
      app.add_subcommand("density", "tabulate decay-time densities");
  FlagSet density_flags(density);
  add_param_flags(density_flags);
  add_model_flags(density_flags);
  density_flags.add("mode", "single or joint");
  density_flags.add("approach", "comma list of prescriptions or all");
  density_flags.add("output", "csv or json");
  density_flags.add("gamma1", "first rate (single mode)");
  density_flags.add("gamma2", "second rate (single mode)");
  density_flags.add("delta_e", "energy splitting (single mode)");
  density_flags.add("a1", "first amplitude re[,im] (single mode)");
  density_flags.add("a2", "second amplitude re[,im] (single mode)");

  auto* compare = app.add_subcommand(
      "compare", "proportionality verdicts between prescriptions");
  FlagSet compare_flags(compare);
  add_param_flags(compare_flags);
  add_model_flags(compare_flags);
  compare_flags.add("table", "true emits the per-point table");
  compare_flags.add("output", "csv or json");

  auto* sample =
      app.add_subcommand("sample", "draw decay events by rejection sampling");
  FlagSet sample_flags(sample);
  add_param_flags(sample_flags);
  add_model_flags(sample_flags);
  sample_flags.add("approach", "prescription to sample from");
  sample_flags.add("n", "number of events");
  sample_flags.add("seed", "RNG seed");
  std::string out_path = "events.csv";
  sample->add_option("--out", out_path, "event file path (sidecar: <out>.json)");

  auto* discriminate = app.add_subcommand(
      "discriminate", "KL divergence, sample-size estimate and chi-square");
  FlagSet discriminate_flags(discriminate);
  add_param_flags(discriminate_flags);
  add_model_flags(discriminate_flags);
  discriminate_flags.add("approach_p", "true-model prescription");
  discriminate_flags.add("approach_q", "alternative prescription");
  discriminate_flags.add("z", "significance in standard deviations");
  discriminate_flags.add("events", "event CSV to test against approach_q");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  using kaontime::cli::load_layered_config;
  using kaontime::cli::run_catching;

  return run_catching(
      [&] {
        if (constants->parsed()) {
          kaontime::cli::run_constants(
              load_layered_config(config_path, constants_flags.overrides()),
              std::cout);
        } else if (density->parsed()) {
          kaontime::cli::run_density(
              load_layered_config(config_path, density_flags.overrides()),
              std::cout);
        } else if (compare->parsed()) {
          kaontime::cli::run_compare(
              load_layered_config(config_path, compare_flags.overrides()),
              std::cout);
        } else if (sample->parsed()) {
          kaontime::cli::run_sample(
              load_layered_config(config_path, sample_flags.overrides()),
              out_path, std::cout);
        } else if (discriminate->parsed()) {
          kaontime::cli::run_discriminate(
              load_layered_config(config_path, discriminate_flags.overrides()),
              std::cout);
        }
      },
      std::cerr);
}
