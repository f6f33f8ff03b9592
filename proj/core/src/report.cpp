#include "kirchpass/report.hpp"

#include <cstdio>
#include <fstream>

#include "kirchpass/version.hpp"

namespace kirchpass {

using nlohmann::json;

json to_report(const ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"check", v.check},
                          {"message", v.message},
                          {"location", v.location}});
  }
  return {{"pass", report.pass}, {"violations", violations}};
}

json to_report(const AlphaResult& alpha, const StiffnessForm& q) {
  return {{"k", alpha.k},
          {"alpha", alpha.alpha},
          {"maximizer_norm_sq", q.norm_sq(alpha.maximizer)},
          {"multistart_spread", alpha.multistart_spread},
          {"iterations", alpha.iterations}};
}

json to_report(const AreaVerdict& verdict) {
  json rows = json::array();
  for (const auto& r : verdict.rows) {
    rows.push_back({{"k", r.k},
                    {"alpha", r.alpha},
                    {"half_bump", r.half_bump},
                    {"upper", r.upper},
                    {"margin_lower", r.margin_lower},
                    {"margin_upper", r.margin_upper},
                    {"pass", r.pass}});
  }
  return {{"rows", rows}, {"pass", verdict.overall}};
}

json to_report(const MountainPassOutcome& outcome) {
  return {{"k", outcome.k},
          {"level", outcome.level},
          {"delta", outcome.delta},
          {"rho", outcome.rho},
          {"norm_sq", outcome.norm_sq},
          {"grad_dual_norm", outcome.grad_dual_norm},
          {"residual", outcome.residual},
          {"outer_iterations", outcome.outer_iterations}};
}

json to_report(const SolutionCertificate& cert) {
  return {{"k", cert.k},
          {"pass", cert.pass},
          {"norm_sq", cert.norm_sq},
          {"window", {cert.window_lower, cert.window_upper}},
          {"amplitude", {cert.amplitude_min, cert.amplitude_max}},
          {"clip_displacement", cert.clip_displacement},
          {"residual_truncated", cert.residual_truncated},
          {"residual_original", cert.residual_original},
          {"level", cert.level},
          {"level_bracket", {cert.bracket_lower, cert.bracket_upper}},
          {"interior_zero_nodes", cert.interior_zero_nodes},
          {"positive_fraction", cert.positive_fraction},
          {"failures", cert.failures}};
}

json to_report(const FamilyCertificate& family) {
  return {{"pass", family.pass},
          {"ordering", family.ordering},
          {"distinct", family.distinct},
          {"ordering_tolerance", family.ordering_tolerance}};
}

json report_skeleton(const RunConfig& cfg) {
  json report;
  report["artifact_version"] = artifact_version;
  report["schema_version"] = report_schema_version;
  report["seed"] = cfg.solver.seed;
  report["config"] = to_json(cfg);
  report["config_hash"] = config_hash(report["config"]);
  return report;
}

std::string report_to_string(const json& report) {
  return report.dump(2) + "\n";
}

void write_solution_csv(const std::string& path, const GridFunction& u) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (out == nullptr) throw Error("cannot open CSV for writing: " + path);
  const Mesh& mesh = *u.mesh;
  if (mesh.dimension() == 1) {
    std::fprintf(out, "x,u\n");
  } else {
    std::fprintf(out, "x,y,u\n");
  }
  for (int node = 0; node < mesh.node_count(); ++node) {
    const auto xy = mesh.node_coordinate(node);
    const int dof = mesh.dof_of_node(node);
    const double value = dof >= 0 ? u.values[dof] : 0.0;
    if (mesh.dimension() == 1) {
      std::fprintf(out, "%.17g,%.17g\n", xy[0], value);
    } else {
      std::fprintf(out, "%.17g,%.17g,%.17g\n", xy[0], xy[1], value);
    }
  }
  std::fclose(out);
}

void write_trace_csv(const std::string& path,
                     const std::vector<PathSample>& history) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (out == nullptr) throw Error("cannot open CSV for writing: " + path);
  std::fprintf(out, "iteration,level,grad_dual_norm\n");
  for (std::size_t i = 0; i < history.size(); ++i) {
    std::fprintf(out, "%zu,%.17g,%.17g\n", i, history[i].level,
                 history[i].grad_dual_norm);
  }
  std::fclose(out);
}

}  // namespace kirchpass
