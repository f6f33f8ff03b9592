#include "kirchpass/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "kirchpass/report.hpp"

namespace kirchpass {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - start)
      .count();
}

struct EffectiveOutput {
  std::string report_path;
  std::string csv_dir;
  bool trace = false;
};

EffectiveOutput effective_output(const RunConfig& cfg,
                                 const CliOverrides& ov) {
  EffectiveOutput eff;
  eff.report_path = ov.report_path.value_or(cfg.output.report_path);
  eff.csv_dir = cfg.output.csv_dir;
  eff.trace = cfg.output.trace;
  if (ov.output_dir.has_value()) {
    eff.csv_dir = *ov.output_dir;
    const std::string base =
        eff.report_path.empty()
            ? std::string("report.json")
            : fs::path(eff.report_path).filename().string();
    eff.report_path = (fs::path(*ov.output_dir) / base).string();
  }
  return eff;
}

void write_report_file(const std::string& path, const json& report) {
  if (path.empty()) return;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot open report file for writing: " + path);
  out << report_to_string(report);
}

const char* kind_name(SolveError::Kind kind) {
  switch (kind) {
    case SolveError::Kind::endpoint_not_found:
      return "endpoint_not_found";
    case SolveError::Kind::geometry_fails:
      return "geometry_fails";
    case SolveError::Kind::path_collapsed:
      return "path_collapsed";
    case SolveError::Kind::non_convergence:
      return "non_convergence";
    case SolveError::Kind::ordering_fails:
      return "ordering_fails";
  }
  return "unknown";
}

}  // namespace

PipelineResult run_command(const std::string& command, const json& raw_config,
                           const CliOverrides& overrides) {
  if (command != "validate" && command != "check-area" && command != "solve") {
    throw Error("unknown command: " + command);
  }

  json report;
  RunConfig cfg;
  try {
    cfg = parse_config(raw_config);
  } catch (const ConfigError& e) {
    report["error"] = {{"kind", "config"}, {"message", e.what()}};
    report["exit_code"] = exit_config_error;
    return {exit_config_error, report};
  }
  if (overrides.seed.has_value()) cfg.solver.seed = *overrides.seed;
  if (overrides.trace) cfg.output.trace = true;

  const EffectiveOutput eff = effective_output(cfg, overrides);
  report = report_skeleton(cfg);

  std::vector<MountainPassOutcome> outcomes;
  std::vector<SolutionCertificate> certificates;
  json timings;

  auto finish = [&](int code) -> PipelineResult {
    report["exit_code"] = code;
    if (cfg.output.include_timings) report["timings"] = timings;
    if (!eff.csv_dir.empty() && !certificates.empty()) {
      fs::create_directories(eff.csv_dir);
      for (const auto& cert : certificates) {
        const std::string name = "solution_k" + std::to_string(cert.k) + ".csv";
        write_solution_csv((fs::path(eff.csv_dir) / name).string(),
                           cert.clipped_solution);
      }
      if (eff.trace) {
        for (const auto& outcome : outcomes) {
          const std::string name =
              "trace_k" + std::to_string(outcome.k) + ".csv";
          write_trace_csv((fs::path(eff.csv_dir) / name).string(),
                          outcome.history);
        }
      }
    }
    write_report_file(eff.report_path, report);
    return {code, report};
  };

  try {
    // Stage: hypothesis validation.
    auto t0 = clock_type::now();
    std::shared_ptr<const ProblemSpec> problem;
    try {
      problem = build_problem(cfg);
    } catch (const ConfigError& e) {
      report["error"] = {{"kind", "config"}, {"message", e.what()}};
      return finish(exit_config_error);
    }
    const ValidationReport validation =
        validate_spec(problem->m, problem->f, cfg.solver.validation_samples);
    report["validation"] = to_report(validation);
    timings["validate_ms"] = ms_since(t0);
    if (command == "validate") {
      return finish(validation.pass ? exit_success : exit_hypothesis_error);
    }
    if (!validation.pass) return finish(exit_hypothesis_error);

    // Stage: area condition.
    t0 = clock_type::now();
    const auto mesh = build_mesh(cfg);
    const auto q = assemble_stiffness(mesh);
    const AscentOptions aopts = ascent_options(cfg);
    const std::vector<TruncatedEnergy> truncs = build_truncations(problem);

    std::vector<AlphaResult> alphas;
    json alpha_json = json::array();
    try {
      for (const TruncatedEnergy& trunc : truncs) {
        const AlphaResult* prev = alphas.empty() ? nullptr : &alphas.back();
        alphas.push_back(compute_alpha(trunc, *q, aopts, prev));
        alpha_json.push_back(to_report(alphas.back(), *q));
      }
    } catch (const AscentError& e) {
      report["alpha"] = alpha_json;
      report["error"] = {{"kind", "ascent_non_convergence"},
                         {"message", e.what()},
                         {"best_alpha", e.best_seen.alpha}};
      return finish(exit_solver_error);
    }
    report["alpha"] = alpha_json;

    const AreaVerdict verdict = check_area_condition(*problem, *mesh, alphas);
    report["area"] = to_report(verdict);
    timings["area_ms"] = ms_since(t0);
    if (command == "check-area") {
      return finish(verdict.overall ? exit_success : exit_area_error);
    }
    if (!verdict.overall) return finish(exit_area_error);

    // Stage: mountain pass solve.
    t0 = clock_type::now();
    const MountainPassConfig mp = mountain_pass_options(cfg);
    try {
      outcomes = solve_family(problem, *q, alphas, mp);
    } catch (const SolveError& e) {
      json solve_json = json::array();
      for (const auto& outcome : e.completed) {
        solve_json.push_back(to_report(outcome));
      }
      if (e.partial.has_value()) {
        json partial = to_report(*e.partial);
        partial["partial"] = true;
        solve_json.push_back(partial);
      }
      report["solve"] = solve_json;
      report["error"] = {{"kind", kind_name(e.kind)},
                         {"k", e.k},
                         {"message", e.what()}};
      return finish(e.kind == SolveError::Kind::geometry_fails
                        ? exit_area_error
                        : exit_solver_error);
    }
    json solve_json = json::array();
    for (const auto& outcome : outcomes) {
      solve_json.push_back(to_report(outcome));
    }
    report["solve"] = solve_json;
    timings["solve_ms"] = ms_since(t0);

    // Stage: certification.
    t0 = clock_type::now();
    const CertifyOptions copts = certify_options(cfg);
    json cert_json = json::array();
    for (const auto& outcome : outcomes) {
      certificates.push_back(certify_solution(*problem, *q, outcome.k,
                                              outcome.solution, outcome.delta,
                                              copts));
      cert_json.push_back(to_report(certificates.back()));
    }
    report["certificates"] = cert_json;
    const FamilyCertificate family = certify_family(*problem, certificates);
    report["family"] = to_report(family);
    timings["certify_ms"] = ms_since(t0);

    return finish(family.pass ? exit_success : exit_certification_error);
  } catch (const Error& e) {
    report["error"] = {{"kind", "internal"}, {"message", e.what()}};
    return finish(exit_solver_error);
  }
}

PipelineResult run_tune(const json& raw_config, const CliOverrides& overrides) {
  json report;
  RunConfig cfg;
  try {
    cfg = parse_config(raw_config);
    if (cfg.m.family != "sine_bump") {
      throw ConfigError("tune requires m.family == 'sine_bump'");
    }
  } catch (const ConfigError& e) {
    report["error"] = {{"kind", "config"}, {"message", e.what()}};
    report["exit_code"] = exit_config_error;
    return {exit_config_error, report};
  }
  if (overrides.seed.has_value()) cfg.solver.seed = *overrides.seed;

  try {
    const auto problem = build_problem(cfg);
    const auto mesh = build_mesh(cfg);
    const auto q = assemble_stiffness(mesh);
    const AscentOptions aopts = ascent_options(cfg);
    const std::vector<TruncatedEnergy> truncs = build_truncations(problem);

    const double upper = problem->f.plateau() * mesh->measure();
    std::vector<AlphaResult> alphas;
    json alpha_json = json::array();
    RunConfig tuned = cfg;
    double lo = 0.0;
    for (const TruncatedEnergy& trunc : truncs) {
      const AlphaResult* prev = alphas.empty() ? nullptr : &alphas.back();
      alphas.push_back(compute_alpha(trunc, *q, aopts, prev));
      alpha_json.push_back(to_report(alphas.back(), *q));
      // Height for which the half bump integral is the midpoint of
      // (alpha_k, plateau * measure).
      const double hi = trunc.upper();
      const double target = 0.5 * (alphas.back().alpha + upper);
      constexpr double pi = 3.14159265358979323846;
      tuned.m.heights[trunc.index() - 1] = pi * target / (hi - lo);
      lo = hi;
    }
    report["alpha"] = alpha_json;
    report["upper"] = upper;
    report["tuned_config"] = to_json(tuned);
    report["exit_code"] = exit_success;
    return {exit_success, report};
  } catch (const AscentError& e) {
    report["error"] = {{"kind", "ascent_non_convergence"},
                       {"message", e.what()}};
    report["exit_code"] = exit_solver_error;
    return {exit_solver_error, report};
  } catch (const Error& e) {
    report["error"] = {{"kind", "internal"}, {"message", e.what()}};
    report["exit_code"] = exit_solver_error;
    return {exit_solver_error, report};
  }
}

int execute_file(const std::string& command, const std::string& config_path,
                 const CliOverrides& overrides) {
  json raw;
  {
    std::ifstream in(config_path);
    if (!in) {
      json err = {{"error",
                   {{"kind", "config"},
                    {"message", "cannot open config file: " + config_path}}},
                  {"exit_code", exit_config_error}};
      std::cout << report_to_string(err);
      return exit_config_error;
    }
    try {
      in >> raw;
    } catch (const json::parse_error& e) {
      json err = {{"error",
                   {{"kind", "config"},
                    {"message", std::string("config is not valid JSON: ") +
                                    e.what()}}},
                  {"exit_code", exit_config_error}};
      std::cout << report_to_string(err);
      return exit_config_error;
    }
  }

  PipelineResult result = (command == "tune")
                              ? run_tune(raw, overrides)
                              : run_command(command, raw, overrides);
  std::cout << report_to_string(result.report);
  return result.exit_code;
}

}  // namespace kirchpass
