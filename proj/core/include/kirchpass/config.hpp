// Run configuration: JSON schema, validation with key-precise diagnostics,
// canonical echo for reports, and factories that turn a configuration into
// mesh / problem / option objects.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchpass/area.hpp"
#include "kirchpass/mesh.hpp"
#include "kirchpass/model.hpp"
#include "kirchpass/solver.hpp"
#include "kirchpass/verify.hpp"

namespace kirchpass {

struct DomainConfig {
  int dimension = 1;
  std::vector<double> extents{1.0};
  std::vector<int> nodes_per_axis{65};
};

struct CoefficientConfig {
  std::string family = "sine_bump";  // or "tabulated"
  std::vector<double> heights;       // sine_bump: one per zero
  std::vector<std::array<double, 2>> points;  // tabulated samples
};

struct NonlinearityConfig {
  std::string family = "sine";  // or "tabulated"
  double amplitude = 1.0;
  std::vector<std::array<double, 2>> points;
};

struct SolverConfig {
  std::uint64_t seed = 1;
  int path_points = 33;
  double tol_grad = 1e-8;
  double tol_res = 1e-6;
  double tol_clip = 1e-9;
  int max_outer_iter = 20000;
  double descent_step_init = 1.0;
  double tau_max = 1e6;
  int multistarts = 8;
  double alpha_tol_grad = 1e-9;
  int alpha_max_iter = 5000;
  int validation_samples = 64;
};

struct OutputConfig {
  std::string report_path;  // empty: report only on stdout
  std::string csv_dir;      // empty: no CSV output
  bool trace = false;
  bool include_timings = false;
};

struct RunConfig {
  int schema_version = 1;
  std::string notes;
  DomainConfig domain;
  CoefficientConfig m;
  NonlinearityConfig f;
  std::vector<double> zeros;
  double s_star = 1.0;
  SolverConfig solver;
  OutputConfig output;
};

/// Parses and validates a configuration.  Throws ConfigError whose message
/// names the offending key.
RunConfig parse_config(const nlohmann::json& j);

/// Reads a configuration file; JSON syntax errors become ConfigError.
RunConfig load_config_file(const std::string& path);

/// Canonical echo with every default filled in; reports embed this.
nlohmann::json to_json(const RunConfig& cfg);

/// FNV-1a hash of the canonical serialization.
std::string config_hash(const nlohmann::json& echoed);

std::shared_ptr<const Mesh> build_mesh(const RunConfig& cfg);
std::shared_ptr<const ProblemSpec> build_problem(const RunConfig& cfg);
AscentOptions ascent_options(const RunConfig& cfg);
MountainPassConfig mountain_pass_options(const RunConfig& cfg);
CertifyOptions certify_options(const RunConfig& cfg);

}  // namespace kirchpass
