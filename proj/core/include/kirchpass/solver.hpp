// Mountain pass search on the truncated energies.
//
// The search deforms a discrete path from 0 to a fixed endpoint e with
// negative truncated energy.  Each iteration locates the maximum of I_k along
// the polyline (refining between nodes, since the node maximum only
// approximates the path maximum), takes one Armijo-controlled steepest
// descent step there, splices the descended point into the path, and locally
// re-equalizes neighboring nodes by arclength.  The iteration stops when the
// dual norm of the gradient at the path maximum is below tolerance; that
// point is the approximate critical point u_k at level c_k.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kirchpass/area.hpp"
#include "kirchpass/energy.hpp"
#include "kirchpass/mesh.hpp"
#include "kirchpass/model.hpp"

namespace kirchpass {

struct MountainPassConfig {
  int path_points = 33;          // >= 16
  double tol_grad = 1e-8;        // scaled by (1 + |c|)
  double tol_res = 1e-6;         // weak residual bound, scaled by load size
  int max_outer_iter = 20000;
  double descent_step_init = 1.0;
  double tau_max = 1e6;          // endpoint search: largest ray parameter
  std::uint64_t seed = 0;
  bool record_history = true;
};

/// One entry of the deformation telemetry.
struct PathSample {
  double level = 0.0;            // current estimate of c_k
  double argmax_position = 0.0;  // fractional position of the maximum in [0,1]
  double grad_dual_norm = 0.0;
};

struct MountainPassOutcome {
  int k = 0;
  GridFunction solution;
  double level = 0.0;            // c_k
  double delta = 0.0;            // sphere lower bound used for the bracket
  double rho = 0.0;              // sphere radius sqrt(t_k)
  double norm_sq = 0.0;
  double grad_dual_norm = 0.0;
  double residual = 0.0;         // weak residual of the truncated problem
  int outer_iterations = 0;
  std::vector<PathSample> history;
};

/// Raised on solver failures; carries whatever partial data exists.
class SolveError : public Error {
 public:
  enum class Kind {
    endpoint_not_found,   // no ray point with negative energy up to tau_max
    geometry_fails,       // delta <= 0 or a sphere sample below delta
    path_collapsed,       // the path maximum fell below zero
    non_convergence,      // max_outer_iter exhausted
    ordering_fails,       // family norms not strictly increasing
  };

  SolveError(Kind kind, int k, const std::string& what)
      : Error(what), kind(kind), k(k) {}

  Kind kind;
  int k = 0;
  std::optional<MountainPassOutcome> partial;
  std::vector<MountainPassOutcome> completed;  // earlier windows, if any
};

/// Finds e = tau * unit with I_k(e) < 0 for every window k, doubling tau from
/// sqrt(t_K) up to tau_max.  The direction is the normalized ground mode.
GridFunction construct_endpoint(const std::vector<TruncatedEnergy>& truncs,
                                const StiffnessForm& q,
                                const MountainPassConfig& cfg);

struct Geometry {
  double rho = 0.0;    // sqrt(t_k)
  double delta = 0.0;  // half bump integral minus alpha_k
};

/// Computes the sphere radius and level lower bound for window k and spot
/// checks I_k >= delta at random points of the sphere.
Geometry verify_geometry(const TruncatedEnergy& trunc, const StiffnessForm& q,
                         const AlphaResult& alpha,
                         const MountainPassConfig& cfg, int spot_checks = 8);

/// Runs the path deformation for one window.
MountainPassOutcome mountain_pass_solve(const TruncatedEnergy& trunc,
                                        const StiffnessForm& q,
                                        const GridFunction& endpoint,
                                        double delta,
                                        const MountainPassConfig& cfg);

/// Solves every window in order and checks that the squared norms increase
/// strictly.  Throws SolveError with the completed prefix on failure.
std::vector<MountainPassOutcome> solve_family(
    const std::shared_ptr<const ProblemSpec>& spec, const StiffnessForm& q,
    const std::vector<AlphaResult>& alphas, const MountainPassConfig& cfg);

}  // namespace kirchpass
