#include "exsample/commands.hpp"
#include "exsample/config.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Adaptive chunk sampling for distinct-object search"};
  app.require_subcommand(1);

  exsample::CliOptions options;
  std::uint64_t seed_value = 0;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* config_opt =
        sub->add_option("--config", options.config_path, "Config file (INI)");
    if (needs_config) config_opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out_dir, "Output directory");
    sub->add_option("--threads", options.threads,
                    "Worker threads (0 = hardware)");
    sub->add_option("--seed", seed_value, "Override the configured base seed")
        ->each([&](const std::string&) { options.seed = seed_value; });
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run the simulation grid");
  add_common(simulate, true);

  CLI::App* validate = app.add_subcommand(
      "validate-estimator", "Monte Carlo validation of the rate estimator");
  add_common(validate, true);

  CLI::App* optimal = app.add_subcommand(
      "optimal", "Solve the fixed-allocation upper bound");
  add_common(optimal, true);

  CLI::App* report =
      app.add_subcommand("report", "Summarize a completed simulation run");
  report->add_option("run_dir", options.input_dir, "Simulation output directory")
      ->required();
  report->add_option("--out", options.out_dir,
                     "Report directory (default: <run_dir>/report)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return exsample::cmd_simulate(options);
    if (validate->parsed()) return exsample::cmd_validate_estimator(options);
    if (optimal->parsed()) return exsample::cmd_optimal(options);
    if (report->parsed()) return exsample::cmd_report(options);
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
