// Orchestration of the full run: validation, area condition, solve, and
// certification, with the exit code contract
//
//   0  success
//   1  configuration error (parse failure, bad key, impossible geometry data)
//   2  hypothesis violation (m or f fails its structural checks)
//   3  area condition fails (including runtime geometry contradictions)
//   4  solver non-convergence (ascent or path deformation)
//   5  certification failure
//
// Exactly one code applies per run; later stages only execute when every
// earlier stage passed.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "kirchpass/config.hpp"

namespace kirchpass {

inline constexpr int exit_success = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_hypothesis_error = 2;
inline constexpr int exit_area_error = 3;
inline constexpr int exit_solver_error = 4;
inline constexpr int exit_certification_error = 5;

/// Command-line overrides.  Seed and trace become part of the effective
/// configuration (and its echo); output path overrides are operational only,
/// so reports stay byte-identical across output locations.
struct CliOverrides {
  std::optional<std::string> report_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  bool trace = false;
};

struct PipelineResult {
  int exit_code = 0;
  nlohmann::json report;
};

/// Runs `validate`, `check-area` or `solve` on an already loaded raw JSON
/// configuration.  Never throws on configuration or numerical failures;
/// those are encoded in the exit code and report.
PipelineResult run_command(const std::string& command,
                           const nlohmann::json& raw_config,
                           const CliOverrides& overrides = {});

/// Computes sine_bump heights for which each window's half bump integral
/// sits midway between alpha_k and the plateau bound, and returns the tuned
/// configuration together with the measured alphas.
PipelineResult run_tune(const nlohmann::json& raw_config,
                        const CliOverrides& overrides = {});

/// File-level wrapper used by the CLI: loads the config, runs the command,
/// prints the report to stdout and returns the exit code.
int execute_file(const std::string& command, const std::string& config_path,
                 const CliOverrides& overrides);

}  // namespace kirchpass
