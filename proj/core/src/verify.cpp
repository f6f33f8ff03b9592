#include "kirchpass/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace kirchpass {

namespace {

std::string describe(const std::string& check, double got, double bound,
                     const char* relation) {
  std::ostringstream msg;
  msg << check << ": " << got << " " << relation << " " << bound;
  return msg.str();
}

}  // namespace

SolutionCertificate certify_solution(const ProblemSpec& spec,
                                     const StiffnessForm& q, int k,
                                     const GridFunction& u, double delta,
                                     const CertifyOptions& opts) {
  if (u.mesh.get() != &q.mesh()) {
    throw Error("certify: candidate mesh mismatch");
  }
  const auto spec_ptr = std::make_shared<const ProblemSpec>(spec);
  const TruncatedEnergy trunc(spec_ptr, k);

  SolutionCertificate cert;
  cert.k = k;
  cert.window_lower = trunc.lower();
  cert.window_upper = trunc.upper();
  cert.bracket_lower = delta;
  cert.bracket_upper = 0.5 * trunc.bump_integral();
  cert.amplitude_min = u.min_value();
  cert.amplitude_max = u.max_value();

  auto fail = [&cert](std::string name) {
    cert.failures.push_back(std::move(name));
  };

  // Nodal clipping to the physical range, then every check is recomputed at
  // the clipped candidate.
  const double s_star = spec.f.s_star();
  cert.clipped_solution = clipped(u, 0.0, s_star);
  cert.clip_displacement =
      (u.values - cert.clipped_solution.values).cwiseAbs().maxCoeff();
  if (cert.clip_displacement > opts.tol_clip) {
    fail(describe("clip_displacement", cert.clip_displacement, opts.tol_clip,
                  ">"));
  }

  const GridFunction& v = cert.clipped_solution;
  cert.norm_sq = q.norm_sq(v);

  if (!(cert.norm_sq > 0.0)) {
    fail("nontrivial: candidate is the zero function");
  }
  const double window_slack = opts.tol_window;
  if (!(cert.norm_sq > cert.window_lower + window_slack &&
        cert.norm_sq < cert.window_upper - window_slack)) {
    std::ostringstream msg;
    msg << "norm_window: |grad u|^2 = " << cert.norm_sq << " outside ("
        << cert.window_lower << ", " << cert.window_upper << ")";
    fail(msg.str());
  }

  int zero_nodes = 0;
  int positive_nodes = 0;
  for (int i = 0; i < v.values.size(); ++i) {
    if (v.values[i] == 0.0) ++zero_nodes;
    if (v.values[i] > 0.0) ++positive_nodes;
  }
  cert.interior_zero_nodes = zero_nodes;
  cert.positive_fraction =
      v.values.size() ? static_cast<double>(positive_nodes) / v.values.size()
                      : 0.0;

  const Nonlinearity& f = spec.f;
  auto f_trunc = [&f](double t) { return f.truncated(t); };
  auto f_raw = [&f](double t) { return f.value(t); };

  const double load_scale =
      1.0 + std::sqrt(q.dual_norm_sq(assemble_load(v, f_trunc)));

  // Residual of the truncated problem with the window coefficient.
  cert.residual_truncated =
      weak_residual(q, v, trunc.coefficient(cert.norm_sq), f_trunc);
  if (cert.residual_truncated > opts.tol_res * load_scale) {
    fail(describe("residual_truncated", cert.residual_truncated,
                  opts.tol_res * load_scale, ">"));
  }

  // Residual of the original problem: untruncated coefficient and f.  For a
  // certified candidate both coincide, which is exactly the claim that a
  // solution of the truncated problem solves the original one.
  cert.residual_original =
      weak_residual(q, v, spec.m.value(cert.norm_sq), f_raw);
  if (cert.residual_original > opts.tol_res * load_scale) {
    fail(describe("residual_original", cert.residual_original,
                  opts.tol_res * load_scale, ">"));
  }

  cert.level = evaluate_truncated_energy(trunc, q, v).value;
  if (!(cert.level >= cert.bracket_lower &&
        cert.level < cert.bracket_upper)) {
    std::ostringstream msg;
    msg << "level_bracket: I_k = " << cert.level << " outside ["
        << cert.bracket_lower << ", " << cert.bracket_upper << ")";
    fail(msg.str());
  }

  cert.pass = cert.failures.empty();
  return cert;
}

FamilyCertificate certify_family(
    const ProblemSpec& spec, const std::vector<SolutionCertificate>& certs) {
  FamilyCertificate family;
  const auto& zeros = spec.m.zeros();
  if (certs.size() != zeros.size()) {
    throw Error("certify family: need one certificate per window");
  }
  const double tol = 1e-10 * zeros.back();
  family.ordering_tolerance = tol;

  bool all = true;
  double lower = 0.0;
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const bool above = certs[i].norm_sq > lower + tol;
    const bool below = certs[i].norm_sq < zeros[i] - tol;
    family.ordering.push_back(above);
    family.ordering.push_back(below);
    all = all && above && below;
    lower = zeros[i];
  }
  for (std::size_t i = 1; i < certs.size(); ++i) {
    const bool separated =
        certs[i].norm_sq - certs[i - 1].norm_sq > tol;
    family.distinct.push_back(separated);
    all = all && separated;
  }
  for (const auto& cert : certs) all = all && cert.pass;
  family.pass = all;
  return family;
}

}  // namespace kirchpass
