// The area condition.  For each window k the quantity alpha_k is the maximum
// of J(u) = integral of the truncated potential of u over the ball
// |grad u|^2 <= t_k.  The window admits a mountain pass geometry when
//
//     alpha_k  <  (1/2) integral of m over the window  <  F(s_star) |Omega|.
//
// alpha_k is computed by projected gradient ascent with deterministic
// multistarts; the ascent is monotone, so the result is always a certified
// lower bound for the true discrete maximum.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kirchpass/energy.hpp"
#include "kirchpass/mesh.hpp"
#include "kirchpass/model.hpp"

namespace kirchpass {

struct AscentOptions {
  int multistarts = 8;       // >= 3
  double tol_grad = 1e-9;    // projected gradient dual norm, absolute
  int max_iter = 5000;       // per start
  std::uint64_t seed = 0;
};

struct AlphaResult {
  int k = 0;
  double alpha = 0.0;
  GridFunction maximizer;
  double multistart_spread = 0.0;  // max - min over start outcomes
  int iterations = 0;              // total over all starts
};

/// Raised when no ascent start reaches the stationarity tolerance; carries
/// the best value seen so that callers can report it.
class AscentError : public Error {
 public:
  AscentError(const std::string& what, AlphaResult best)
      : Error(what), best_seen(std::move(best)) {}
  AlphaResult best_seen;
};

/// Exact radial projection onto the ball |grad u|^2 <= radius_sq.
GridFunction project_to_ball(const StiffnessForm& q, const GridFunction& u,
                             double radius_sq);

/// Maximizes J over the ball of squared radius t_k.  When `previous` is the
/// result for window k-1, its maximizer is rescaled onto the larger ball and
/// used as an extra start; this makes alpha_k >= alpha_{k-1} structural.
AlphaResult compute_alpha(const TruncatedEnergy& trunc, const StiffnessForm& q,
                          const AscentOptions& opts,
                          const AlphaResult* previous = nullptr);

struct AreaVerdict {
  struct Row {
    int k = 0;
    double alpha = 0.0;
    double half_bump = 0.0;      // (1/2) integral of m over the window
    double upper = 0.0;          // F(s_star) |Omega|
    double margin_lower = 0.0;   // half_bump - alpha
    double margin_upper = 0.0;   // upper - half_bump
    bool pass = false;
  };
  std::vector<Row> rows;
  bool overall = false;
};

/// Evaluates both inequalities of the area condition for every window.
AreaVerdict check_area_condition(const ProblemSpec& spec, const Mesh& mesh,
                                 const std::vector<AlphaResult>& alphas);

}  // namespace kirchpass
