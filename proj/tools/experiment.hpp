#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "invex/optimizer.hpp"
#include "json.hpp"

namespace invex::cli {

/// Rejection of an invalid or inconsistent configuration; maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed experiment description. `params` holds the problem specific knobs
/// (generator settings and constants) with defaults already filled in.
struct ExperimentConfig {
  std::string problem;    // dag | fair_lasso | mlr | custom_quadratic
  std::string algorithm;  // igd | gd (unconstrained) | pigd | pgd (constrained)
  std::uint64_t seed = 0;
  std::optional<double> alpha;  // absent: derive from estimated smoothness
  int max_iter = 1000;
  double grad_tol = 1e-8;
  int n = 0;
  int d = 0;
  nlohmann::json params;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// The wired problem, the deterministic initial iterate, the optimum value
/// when known in closed form, and the step size used when the config leaves
/// alpha unset.
struct ExperimentSetup {
  ProblemSpec problem;
  VariablePoint x0;
  std::optional<double> f_star;
  double estimated_alpha = 0.0;
};
ExperimentSetup build_setup(const ExperimentConfig& config);

struct RunArtifacts {
  IterationTrace trace;
  double alpha_used = 0.0;
  bool alpha_from_config = false;
  std::string init_digest;
};
RunArtifacts execute(const ExperimentConfig& config, const ExperimentSetup& setup);

/// FNV-1a hash of the iterate's flattened bytes, as a 16 digit hex string.
std::string digest_point(const VariablePoint& p);

/// Subcommand drivers returning process exit codes: 0 run complete, 1 solver
/// failure, 2 configuration error. Nothing is written on configuration
/// errors.
int run_command(const std::string& config_path, const std::string& output_dir);
int compare_command(const std::string& path_a, const std::string& path_b,
                    const std::string& output_dir);
int verify_command(const std::string& problem, std::uint64_t seed, const std::string& output_dir);

/// Applies INVEXOPT_THREADS to Eigen and the BLAS backend; call before any
/// linear algebra.
void apply_thread_env();

}  // namespace invex::cli
