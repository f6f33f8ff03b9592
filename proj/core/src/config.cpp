#include "kirchpass/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace kirchpass {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& path, const std::string& why) {
  throw ConfigError("config key '" + path + "': " + why);
}

void reject_unknown(const json& j, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      bad_key(path.empty() ? item.key() : path + "." + item.key(),
              "unknown key");
    }
  }
}

const json* find(const json& j, const std::string& key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  double fallback, bool required = false) {
  const json* v = find(j, key);
  if (v == nullptr) {
    if (required) bad_key(path + key, "missing");
    return fallback;
  }
  if (!v->is_number()) bad_key(path + key, "expected a number");
  return v->get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key,
            int fallback, bool required = false) {
  const json* v = find(j, key);
  if (v == nullptr) {
    if (required) bad_key(path + key, "missing");
    return fallback;
  }
  if (!v->is_number_integer()) bad_key(path + key, "expected an integer");
  return v->get<int>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key,
              bool fallback) {
  const json* v = find(j, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) bad_key(path + key, "expected a boolean");
  return v->get<bool>();
}

std::string get_string(const json& j, const std::string& path,
                       const std::string& key, const std::string& fallback,
                       bool required = false) {
  const json* v = find(j, key);
  if (v == nullptr) {
    if (required) bad_key(path + key, "missing");
    return fallback;
  }
  if (!v->is_string()) bad_key(path + key, "expected a string");
  return v->get<std::string>();
}

std::vector<std::array<double, 2>> get_points(const json& j,
                                              const std::string& path,
                                              const std::string& key) {
  const json* v = find(j, key);
  if (v == nullptr) bad_key(path + key, "missing for the tabulated family");
  if (!v->is_array() || v->size() < 2) {
    bad_key(path + key, "expected an array of at least 2 [t, value] pairs");
  }
  std::vector<std::array<double, 2>> points;
  points.reserve(v->size());
  for (const auto& p : *v) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number()) {
      bad_key(path + key, "each entry must be a [t, value] pair of numbers");
    }
    points.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return points;
}

DomainConfig parse_domain(const json& j) {
  if (!j.is_object()) bad_key("domain", "expected an object");
  reject_unknown(j, "domain", {"dimension", "extents", "nodes_per_axis"});
  DomainConfig d;
  d.dimension = get_int(j, "domain.", "dimension", 1, true);
  if (d.dimension != 1 && d.dimension != 2) {
    bad_key("domain.dimension", "must be 1 or 2");
  }

  const json* ext = find(j, "extents");
  if (ext == nullptr) bad_key("domain.extents", "missing");
  if (!ext->is_array() ||
      static_cast<int>(ext->size()) != d.dimension) {
    bad_key("domain.extents", "expected an array matching the dimension");
  }
  d.extents.clear();
  for (const auto& e : *ext) {
    if (!e.is_number()) bad_key("domain.extents", "entries must be numbers");
    const double val = e.get<double>();
    if (!(val > 0.0)) {
      bad_key("domain.extents", "entries must be positive (zero-measure "
                                "domains are rejected)");
    }
    d.extents.push_back(val);
  }

  const json* nodes = find(j, "nodes_per_axis");
  if (nodes == nullptr) bad_key("domain.nodes_per_axis", "missing");
  if (!nodes->is_array() ||
      static_cast<int>(nodes->size()) != d.dimension) {
    bad_key("domain.nodes_per_axis",
            "expected an array matching the dimension");
  }
  d.nodes_per_axis.clear();
  for (const auto& n : *nodes) {
    if (!n.is_number_integer()) {
      bad_key("domain.nodes_per_axis", "entries must be integers");
    }
    const int val = n.get<int>();
    if (val < 3) bad_key("domain.nodes_per_axis", "entries must be >= 3");
    d.nodes_per_axis.push_back(val);
  }
  return d;
}

CoefficientConfig parse_m(const json& j, std::size_t zero_count) {
  if (!j.is_object()) bad_key("m", "expected an object");
  reject_unknown(j, "m", {"family", "heights", "points"});
  CoefficientConfig m;
  m.family = get_string(j, "m.", "family", "", true);
  if (m.family == "sine_bump") {
    const json* h = find(j, "heights");
    if (h == nullptr) bad_key("m.heights", "missing for the sine_bump family");
    if (!h->is_array() || h->size() != zero_count) {
      bad_key("m.heights", "expected one height per zero");
    }
    for (const auto& v : *h) {
      if (!v.is_number()) bad_key("m.heights", "entries must be numbers");
      m.heights.push_back(v.get<double>());
    }
  } else if (m.family == "tabulated") {
    m.points = get_points(j, "m.", "points");
  } else {
    bad_key("m.family", "must be 'sine_bump' or 'tabulated'");
  }
  return m;
}

NonlinearityConfig parse_f(const json& j) {
  if (!j.is_object()) bad_key("f", "expected an object");
  reject_unknown(j, "f", {"family", "amplitude", "points"});
  NonlinearityConfig f;
  f.family = get_string(j, "f.", "family", "", true);
  if (f.family == "sine") {
    f.amplitude = get_number(j, "f.", "amplitude", 1.0);
  } else if (f.family == "tabulated") {
    f.points = get_points(j, "f.", "points");
  } else {
    bad_key("f.family", "must be 'sine' or 'tabulated'");
  }
  return f;
}

SolverConfig parse_solver(const json& j) {
  if (!j.is_object()) bad_key("solver", "expected an object");
  reject_unknown(j, "solver",
                 {"seed", "path_points", "tol_grad", "tol_res", "tol_clip",
                  "max_outer_iter", "descent_step_init", "tau_max",
                  "multistarts", "alpha_tol_grad", "alpha_max_iter",
                  "validation_samples"});
  SolverConfig s;
  const json* seed = find(j, "seed");
  if (seed != nullptr) {
    const bool ok = seed->is_number_integer() &&
                    (seed->is_number_unsigned() || seed->get<long long>() >= 0);
    if (!ok) bad_key("solver.seed", "expected a nonnegative integer");
    s.seed = seed->get<std::uint64_t>();
  }
  s.path_points = get_int(j, "solver.", "path_points", s.path_points);
  if (s.path_points < 16) bad_key("solver.path_points", "must be >= 16");
  s.tol_grad = get_number(j, "solver.", "tol_grad", s.tol_grad);
  if (!(s.tol_grad > 0.0)) bad_key("solver.tol_grad", "must be positive");
  s.tol_res = get_number(j, "solver.", "tol_res", s.tol_res);
  if (!(s.tol_res > 0.0)) bad_key("solver.tol_res", "must be positive");
  s.tol_clip = get_number(j, "solver.", "tol_clip", s.tol_clip);
  if (!(s.tol_clip > 0.0)) bad_key("solver.tol_clip", "must be positive");
  s.max_outer_iter = get_int(j, "solver.", "max_outer_iter", s.max_outer_iter);
  if (s.max_outer_iter < 1) bad_key("solver.max_outer_iter", "must be >= 1");
  s.descent_step_init =
      get_number(j, "solver.", "descent_step_init", s.descent_step_init);
  if (!(s.descent_step_init > 0.0)) {
    bad_key("solver.descent_step_init", "must be positive");
  }
  s.tau_max = get_number(j, "solver.", "tau_max", s.tau_max);
  if (!(s.tau_max > 0.0)) bad_key("solver.tau_max", "must be positive");
  s.multistarts = get_int(j, "solver.", "multistarts", s.multistarts);
  if (s.multistarts < 3) bad_key("solver.multistarts", "must be >= 3");
  s.alpha_tol_grad =
      get_number(j, "solver.", "alpha_tol_grad", s.alpha_tol_grad);
  if (!(s.alpha_tol_grad > 0.0)) {
    bad_key("solver.alpha_tol_grad", "must be positive");
  }
  s.alpha_max_iter = get_int(j, "solver.", "alpha_max_iter", s.alpha_max_iter);
  if (s.alpha_max_iter < 1) bad_key("solver.alpha_max_iter", "must be >= 1");
  s.validation_samples =
      get_int(j, "solver.", "validation_samples", s.validation_samples);
  if (s.validation_samples < 10) {
    bad_key("solver.validation_samples", "must be >= 10");
  }
  return s;
}

OutputConfig parse_output(const json& j) {
  if (!j.is_object()) bad_key("output", "expected an object");
  reject_unknown(j, "output",
                 {"report_path", "csv_dir", "trace", "include_timings"});
  OutputConfig o;
  o.report_path = get_string(j, "output.", "report_path", "");
  o.csv_dir = get_string(j, "output.", "csv_dir", "");
  o.trace = get_bool(j, "output.", "trace", false);
  o.include_timings = get_bool(j, "output.", "include_timings", false);
  return o;
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown(j, "", {"schema_version", "notes", "domain", "m", "f",
                         "zeros", "s_star", "solver", "output"});

  RunConfig cfg;
  cfg.schema_version = get_int(j, "", "schema_version", 0, true);
  if (cfg.schema_version != 1) {
    bad_key("schema_version", "unsupported (this build accepts 1)");
  }
  cfg.notes = get_string(j, "", "notes", "");

  const json* domain = find(j, "domain");
  if (domain == nullptr) bad_key("domain", "missing");
  cfg.domain = parse_domain(*domain);

  const json* zeros = find(j, "zeros");
  if (zeros == nullptr) bad_key("zeros", "missing");
  if (!zeros->is_array() || zeros->empty()) {
    bad_key("zeros", "expected a nonempty array");
  }
  double prev = 0.0;
  for (const auto& z : *zeros) {
    if (!z.is_number()) bad_key("zeros", "entries must be numbers");
    const double t = z.get<double>();
    if (!(t > prev)) {
      bad_key("zeros", "must be strictly increasing and positive");
    }
    cfg.zeros.push_back(t);
    prev = t;
  }

  cfg.s_star = get_number(j, "", "s_star", 0.0, true);
  if (!(cfg.s_star > 0.0)) bad_key("s_star", "must be positive");

  const json* m = find(j, "m");
  if (m == nullptr) bad_key("m", "missing");
  cfg.m = parse_m(*m, cfg.zeros.size());

  const json* f = find(j, "f");
  if (f == nullptr) bad_key("f", "missing");
  cfg.f = parse_f(*f);

  const json* solver = find(j, "solver");
  cfg.solver = (solver != nullptr) ? parse_solver(*solver) : SolverConfig{};

  const json* output = find(j, "output");
  cfg.output = (output != nullptr) ? parse_output(*output) : OutputConfig{};

  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["notes"] = cfg.notes;
  j["domain"] = {{"dimension", cfg.domain.dimension},
                 {"extents", cfg.domain.extents},
                 {"nodes_per_axis", cfg.domain.nodes_per_axis}};
  json m;
  m["family"] = cfg.m.family;
  if (cfg.m.family == "sine_bump") {
    m["heights"] = cfg.m.heights;
  } else {
    json pts = json::array();
    for (const auto& p : cfg.m.points) pts.push_back({p[0], p[1]});
    m["points"] = pts;
  }
  j["m"] = m;
  json f;
  f["family"] = cfg.f.family;
  if (cfg.f.family == "sine") {
    f["amplitude"] = cfg.f.amplitude;
  } else {
    json pts = json::array();
    for (const auto& p : cfg.f.points) pts.push_back({p[0], p[1]});
    f["points"] = pts;
  }
  j["f"] = f;
  j["zeros"] = cfg.zeros;
  j["s_star"] = cfg.s_star;
  j["solver"] = {{"seed", cfg.solver.seed},
                 {"path_points", cfg.solver.path_points},
                 {"tol_grad", cfg.solver.tol_grad},
                 {"tol_res", cfg.solver.tol_res},
                 {"tol_clip", cfg.solver.tol_clip},
                 {"max_outer_iter", cfg.solver.max_outer_iter},
                 {"descent_step_init", cfg.solver.descent_step_init},
                 {"tau_max", cfg.solver.tau_max},
                 {"multistarts", cfg.solver.multistarts},
                 {"alpha_tol_grad", cfg.solver.alpha_tol_grad},
                 {"alpha_max_iter", cfg.solver.alpha_max_iter},
                 {"validation_samples", cfg.solver.validation_samples}};
  j["output"] = {{"report_path", cfg.output.report_path},
                 {"csv_dir", cfg.output.csv_dir},
                 {"trace", cfg.output.trace},
                 {"include_timings", cfg.output.include_timings}};
  return j;
}

std::string config_hash(const json& echoed) {
  const std::string bytes = echoed.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::shared_ptr<const Mesh> build_mesh(const RunConfig& cfg) {
  return Mesh::create(cfg.domain.dimension, cfg.domain.extents,
                      cfg.domain.nodes_per_axis);
}

std::shared_ptr<const ProblemSpec> build_problem(const RunConfig& cfg) {
  auto make_m = [&cfg]() {
    if (cfg.m.family == "sine_bump") {
      return Coefficient::sine_bumps(cfg.zeros, cfg.m.heights);
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : cfg.m.points) pts.emplace_back(p[0], p[1]);
    return Coefficient::tabulated(std::move(pts), cfg.zeros);
  };
  auto make_f = [&cfg]() {
    if (cfg.f.family == "sine") {
      return Nonlinearity::sine(cfg.s_star, cfg.f.amplitude);
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : cfg.f.points) pts.emplace_back(p[0], p[1]);
    return Nonlinearity::tabulated(std::move(pts), cfg.s_star);
  };
  return std::make_shared<const ProblemSpec>(ProblemSpec{make_m(), make_f()});
}

AscentOptions ascent_options(const RunConfig& cfg) {
  AscentOptions opts;
  opts.multistarts = cfg.solver.multistarts;
  opts.tol_grad = cfg.solver.alpha_tol_grad;
  opts.max_iter = cfg.solver.alpha_max_iter;
  opts.seed = cfg.solver.seed;
  return opts;
}

MountainPassConfig mountain_pass_options(const RunConfig& cfg) {
  MountainPassConfig mp;
  mp.path_points = cfg.solver.path_points;
  mp.tol_grad = cfg.solver.tol_grad;
  mp.tol_res = cfg.solver.tol_res;
  mp.max_outer_iter = cfg.solver.max_outer_iter;
  mp.descent_step_init = cfg.solver.descent_step_init;
  mp.tau_max = cfg.solver.tau_max;
  mp.seed = cfg.solver.seed;
  return mp;
}

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions opts;
  opts.tol_res = cfg.solver.tol_res;
  opts.tol_clip = cfg.solver.tol_clip;
  return opts;
}

}  // namespace kirchpass
