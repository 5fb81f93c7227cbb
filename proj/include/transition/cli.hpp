#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "transition/analysis.hpp"

namespace transition::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kOutputRootEnv = "TRANSITION_OUTPUT_ROOT";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

/// Everything needed to reproduce a run. Defaults give the six-panel
/// interference setup in natural units (hbar = m = sigma = 1).
struct ExperimentConfig {
  std::vector<double> epsilon = {1.0};
  double d_over_sigma = 3.0;
  double t_final_units = 20.0;
  double grid_extent_over_sigma = 80.0;
  long long grid_points = 4096;
  double dt_safety = 0.5;
  double amp_floor_rel = 1e-8;
  std::vector<double> snapshot_times = {};
  std::vector<double> times = {};  // analytic subcommand
  int levels = 3;                  // convergence subcommand
  unsigned threads = 0;            // 0: hardware concurrency
  std::string input;               // decompose subcommand
  double hbar = 1.0;
  double mass = 1.0;
  std::string output_dir = "transition_out";

  void validate() const;
  Experiment experiment(double eps) const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Loads the "config" object of a manifest written by any subcommand.
ExperimentConfig config_from_manifest(const std::filesystem::path& manifest);

int exit_code_for(const Error& e);

/// Each command writes into config.output_dir and returns its manifest.
nlohmann::json cmd_simulate(const ExperimentConfig& config);
nlohmann::json cmd_sweep(const ExperimentConfig& config);
nlohmann::json cmd_analytic(const ExperimentConfig& config);
nlohmann::json cmd_decompose(const ExperimentConfig& config);
nlohmann::json cmd_convergence(const ExperimentConfig& config);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace transition::cli
