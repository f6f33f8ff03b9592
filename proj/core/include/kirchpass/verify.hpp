// Independent certification of candidate solutions.  Everything here is
// recomputed from the problem data, the mesh, the quadratic form and the
// nodal values alone; no solver telemetry enters.  Certificates carry
// pass/fail verdicts as data instead of throwing, so a failed certificate is
// an ordinary reportable outcome.
#pragma once

#include <string>
#include <vector>

#include "kirchpass/area.hpp"
#include "kirchpass/energy.hpp"
#include "kirchpass/mesh.hpp"
#include "kirchpass/model.hpp"

namespace kirchpass {

struct CertifyOptions {
  double tol_res = 1e-6;    // dual-norm residual bound, scaled by load size
  double tol_clip = 1e-9;   // allowed nodal clipping displacement
  // Required interior margin of |grad u|^2 from both window edges; 0 means
  // the bare strict inequalities.
  double tol_window = 0.0;
};

struct SolutionCertificate {
  int k = 0;
  double norm_sq = 0.0;          // of the clipped candidate
  double window_lower = 0.0;     // t_{k-1}
  double window_upper = 0.0;     // t_k
  double amplitude_min = 0.0;    // nodal range before clipping
  double amplitude_max = 0.0;
  double clip_displacement = 0.0;  // max nodal change under clipping
  double residual_truncated = 0.0;
  double residual_original = 0.0;
  double level = 0.0;            // I_k at the clipped candidate
  double bracket_lower = 0.0;    // delta_k
  double bracket_upper = 0.0;    // half bump integral
  int interior_zero_nodes = 0;   // nodes at exactly zero after clipping
  double positive_fraction = 0.0;
  std::vector<std::string> failures;  // empty iff pass
  bool pass = false;
  GridFunction clipped_solution;
};

/// Certifies one candidate u for window k.  `delta` is the level lower bound
/// half_bump - alpha_k from the area module.  Checks performed:
///  * norm window:      t_{k-1} < |grad u|^2 < t_k
///  * amplitude:        nodal values in [0, s_star] after clipping by tol_clip
///  * truncated residual and original residual, both in the dual norm
///  * level bracket:    delta <= I_k(u) < half bump integral
///  * nontriviality:    u is not the zero function
SolutionCertificate certify_solution(const ProblemSpec& spec,
                                     const StiffnessForm& q, int k,
                                     const GridFunction& u, double delta,
                                     const CertifyOptions& opts = {});

struct FamilyCertificate {
  // Chain 0 < |u_1|^2 < t_1 < |u_2|^2 < t_2 < ... < t_K, one flag per
  // comparison in order.
  std::vector<bool> ordering;
  std::vector<bool> distinct;  // consecutive solutions separated in norm
  double ordering_tolerance = 0.0;
  bool pass = false;
};

/// Checks the interleaved ordering of a family of certificates.  The
/// comparison tolerance is 1e-10 * t_K.
FamilyCertificate certify_family(const ProblemSpec& spec,
                                 const std::vector<SolutionCertificate>& certs);

}  // namespace kirchpass
