// Command line driver.
//
//   kirchpass validate   --config cfg.json        structural hypothesis checks
//   kirchpass check-area --config cfg.json        alpha_k and the area condition
//   kirchpass solve      --config cfg.json        full pipeline with certificates
//   kirchpass tune       --config cfg.json        fit sine_bump heights to alpha
//
// Common flags: --report PATH, --seed N, --trace.  The environment variable
// KIRCHPASS_OUTPUT_DIR redirects every produced file into one directory
// without changing report contents.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kirchpass/pipeline.hpp"
#include "kirchpass/report.hpp"
#include "kirchpass/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string report_path;
  std::string tuned_out;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool trace = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_tuned_out = false) {
  cmd->add_option("--config", args.config_path, "Path to the run configuration")
      ->required();
  cmd->add_option("--report", args.report_path,
                  "Write the JSON report to this path");
  cmd->add_option("--seed", args.seed, "Override the run seed")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_flag("--trace", args.trace,
                "Record per-iteration telemetry CSVs next to the solutions");
  if (with_tuned_out) {
    cmd->add_option("--out", args.tuned_out,
                    "Write the tuned configuration to this path");
  }
}

kirchpass::CliOverrides to_overrides(const CommonArgs& args) {
  kirchpass::CliOverrides ov;
  if (!args.report_path.empty()) ov.report_path = args.report_path;
  if (args.seed_given) ov.seed = args.seed;
  ov.trace = args.trace;
  if (const char* dir = std::getenv("KIRCHPASS_OUTPUT_DIR")) {
    if (dir[0] != '\0') ov.output_dir = std::string(dir);
  }
  return ov;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mountain pass solver for degenerate Kirchhoff problems"};
  app.set_version_flag("--version", kirchpass::artifact_version);
  app.require_subcommand(1);

  CommonArgs validate_args, area_args, solve_args, tune_args;
  CLI::App* validate =
      app.add_subcommand("validate", "Check the structural hypotheses on m and f");
  add_common(validate, validate_args);
  CLI::App* area =
      app.add_subcommand("check-area", "Compute alpha_k and test the area condition");
  add_common(area, area_args);
  CLI::App* solve =
      app.add_subcommand("solve", "Run the full solve and certification pipeline");
  add_common(solve, solve_args);
  CLI::App* tune = app.add_subcommand(
      "tune", "Fit sine_bump heights so the area condition holds with margin");
  add_common(tune, tune_args, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kirchpass::exit_config_error;
  }

  try {
    if (validate->parsed()) {
      return kirchpass::execute_file("validate", validate_args.config_path,
                                     to_overrides(validate_args));
    }
    if (area->parsed()) {
      return kirchpass::execute_file("check-area", area_args.config_path,
                                     to_overrides(area_args));
    }
    if (solve->parsed()) {
      return kirchpass::execute_file("solve", solve_args.config_path,
                                     to_overrides(solve_args));
    }
    if (tune->parsed()) {
      // Tune prints its report; optionally also writes the tuned config.
      std::ifstream in(tune_args.config_path);
      if (!in) {
        std::cerr << "cannot open config file: " << tune_args.config_path
                  << "\n";
        return kirchpass::exit_config_error;
      }
      nlohmann::json raw;
      try {
        in >> raw;
      } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "config is not valid JSON: " << e.what() << "\n";
        return kirchpass::exit_config_error;
      }
      const kirchpass::PipelineResult result =
          kirchpass::run_tune(raw, to_overrides(tune_args));
      std::cout << kirchpass::report_to_string(result.report);
      if (result.exit_code == 0 && !tune_args.tuned_out.empty()) {
        std::ofstream out(tune_args.tuned_out);
        if (!out) {
          std::cerr << "cannot write tuned config: " << tune_args.tuned_out
                    << "\n";
          return kirchpass::exit_config_error;
        }
        out << result.report["tuned_config"].dump(2) << "\n";
      }
      return result.exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kirchpass::exit_solver_error;
  }
  return kirchpass::exit_config_error;
}
