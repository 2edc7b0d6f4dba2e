#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "experiment.hpp"

int main(int argc, char** argv) {
  invex::cli::apply_thread_env();

  CLI::App app{"invexopt: first order experiments over invex problem kernels"};
  app.require_subcommand(1);

  std::string output_dir = "results";

  auto* run = app.add_subcommand("run", "run one experiment from a json config");
  std::string config_path;
  run->add_option("--config", config_path, "path to the experiment config")->required();
  run->add_option("--output", output_dir, "directory for trace.csv and report.json");

  auto* compare = app.add_subcommand("compare", "run two configs that differ only in algorithm");
  std::string config_a, config_b;
  compare->add_option("--config-a", config_a, "first config")->required();
  compare->add_option("--config-b", config_b, "second config")->required();
  compare->add_option("--output", output_dir, "directory for traces and comparison.json");

  auto* verify = app.add_subcommand("verify", "run the numerical checks for one problem");
  std::string problem;
  std::uint64_t seed = 0;
  verify->add_option("--problem", problem, "dag, fair_lasso, mlr, or custom_quadratic")
      ->required();
  verify->add_option("--seed", seed, "rng seed for the probes");
  verify->add_option("--output", output_dir, "directory for verify_report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return invex::cli::run_command(config_path, output_dir);
    if (compare->parsed()) return invex::cli::compare_command(config_a, config_b, output_dir);
    return invex::cli::verify_command(problem, seed, output_dir);
  } catch (const invex::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
