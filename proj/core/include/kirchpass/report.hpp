// Report assembly and CSV emission.  Reports are deterministic: identical
// configurations and seeds serialize to identical bytes.  Wall-clock timings
// are therefore excluded unless the configuration opts in.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kirchpass/area.hpp"
#include "kirchpass/config.hpp"
#include "kirchpass/model.hpp"
#include "kirchpass/solver.hpp"
#include "kirchpass/verify.hpp"

namespace kirchpass {

nlohmann::json to_report(const ValidationReport& report);
nlohmann::json to_report(const AlphaResult& alpha, const StiffnessForm& q);
nlohmann::json to_report(const AreaVerdict& verdict);
nlohmann::json to_report(const MountainPassOutcome& outcome);
nlohmann::json to_report(const SolutionCertificate& cert);
nlohmann::json to_report(const FamilyCertificate& family);

/// Report skeleton shared by every subcommand: version, seed, echoed config
/// and its hash.
nlohmann::json report_skeleton(const RunConfig& cfg);

/// Serializes a report to its canonical byte representation.
std::string report_to_string(const nlohmann::json& report);

/// Writes nodal values as CSV with columns x[,y],u at 17 significant digits.
/// Boundary nodes are included with value zero.
void write_solution_csv(const std::string& path, const GridFunction& u);

/// Writes per-iteration telemetry as CSV: iteration, level, grad_dual_norm.
void write_trace_csv(const std::string& path,
                     const std::vector<PathSample>& history);

}  // namespace kirchpass
