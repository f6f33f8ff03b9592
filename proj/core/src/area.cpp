#include "kirchpass/area.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kirchpass/rng.hpp"

namespace kirchpass {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr std::uint64_t kAscentStreamTag = 0xA5;

/// J(u) = integral of the truncated potential of u; the quantity maximized
/// over the ball.
double objective(const TruncatedEnergy& trunc, const GridFunction& u) {
  const Nonlinearity& f = trunc.nonlinearity();
  return integrate_composed(
      u, [&f](double t) { return f.truncated_potential(t); });
}

Eigen::VectorXd objective_gradient(const TruncatedEnergy& trunc,
                                   const GridFunction& u) {
  const Nonlinearity& f = trunc.nonlinearity();
  return assemble_load(u, [&f](double t) { return f.truncated(t); });
}

struct StartOutcome {
  double value = 0.0;
  GridFunction point;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient ascent from one start.  Monotone by construction:
/// every accepted step does not decrease J.
StartOutcome ascend(const TruncatedEnergy& trunc, const StiffnessForm& q,
                    GridFunction u, double radius_sq, double tol_grad,
                    int max_iter) {
  StartOutcome out;
  u = project_to_ball(q, u, radius_sq);
  double value = objective(trunc, u);
  double step = -1.0;  // set from the first gradient

  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd b = objective_gradient(trunc, u);
    const Eigen::VectorXd d = q.solve(b);  // Riesz representative
    const double dual_sq = b.dot(d);
    const double nsq = q.norm_sq(u);

    // Projected stationarity: remove the outward radial component when the
    // iterate sits on the sphere and the gradient points outward.  The
    // residual is formed as a vector, not as dual_sq - radial^2/nsq: that
    // difference cancels catastrophically near stationarity and floors the
    // measurable norm around 1e-9, at the tolerance itself.
    double pg_sq = dual_sq;
    const bool on_boundary = nsq >= radius_sq * (1.0 - 1e-12);
    if (on_boundary && nsq > 0.0) {
      const double radial = b.dot(u.values);  // = (Qu)^T Q^{-1} b
      if (radial > 0.0) {
        const double lambda = radial / nsq;
        const Eigen::VectorXd r = d - lambda * u.values;
        pg_sq = std::max(0.0, r.dot(b - lambda * q.apply(u.values)));
      }
    }
    if (std::sqrt(std::max(0.0, pg_sq)) <= tol_grad) {
      out.converged = true;
      break;
    }

    if (step <= 0.0) step = 1.0 / std::max(1e-30, std::sqrt(dual_sq));

    // Armijo backtracking on the projected trial point.
    bool accepted = false;
    double trial_step = 2.0 * step;
    for (int back = 0; back < 60; ++back) {
      GridFunction v = u;
      v.values += trial_step * d;
      v = project_to_ball(q, v, radius_sq);
      const double trial_value = objective(trunc, v);
      const double predicted = b.dot(v.values - u.values);
      if (trial_value >= value + 1e-4 * predicted && trial_value >= value) {
        u = std::move(v);
        value = trial_value;
        step = trial_step;
        accepted = true;
        break;
      }
      trial_step *= 0.5;
    }
    ++out.iterations;
    if (!accepted) break;  // no ascent direction left at this scale
  }
  out.value = value;
  out.point = std::move(u);
  return out;
}

/// Smooth nonnegative random field: the Riesz lift of a positive random
/// load.  Positivity follows from the M-matrix property of Q.
GridFunction random_smooth_field(const StiffnessForm& q, Rng& rng) {
  const Mesh& mesh = q.mesh();
  Eigen::VectorXd load(mesh.interior_dof_count());
  for (int i = 0; i < load.size(); ++i) {
    load[i] = mesh.lumped_weights()[i] * (0.05 + 0.95 * rng.next_unit());
  }
  return GridFunction(q.mesh_ptr(), q.solve(load));
}

GridFunction scaled_to_norm_sq(const StiffnessForm& q, const GridFunction& u,
                               double target_sq) {
  const double nsq = q.norm_sq(u);
  if (nsq <= 0.0) throw Error("ascent: cannot scale the zero field");
  GridFunction out = u;
  out.values *= std::sqrt(target_sq / nsq);
  return out;
}

}  // namespace

GridFunction project_to_ball(const StiffnessForm& q, const GridFunction& u,
                             double radius_sq) {
  if (!(radius_sq > 0.0)) throw Error("projection: radius must be positive");
  const double nsq = q.norm_sq(u);
  if (nsq <= radius_sq) return u;
  GridFunction out = u;
  out.values *= std::sqrt(radius_sq / nsq);
  return out;
}

AlphaResult compute_alpha(const TruncatedEnergy& trunc, const StiffnessForm& q,
                          const AscentOptions& opts,
                          const AlphaResult* previous) {
  if (opts.multistarts < 3) {
    throw Error("ascent: need at least 3 starts");
  }
  const double radius_sq = trunc.upper();
  const Mesh& mesh = q.mesh();

  std::vector<GridFunction> starts;
  starts.reserve(opts.multistarts);

  if (previous != nullptr && previous->maximizer.values.size() > 0) {
    // Rescale the previous window's maximizer onto the larger sphere; values
    // only grow and the truncated potential is nondecreasing, so this start
    // already achieves at least alpha_{k-1}.
    starts.push_back(scaled_to_norm_sq(q, previous->maximizer, radius_sq));
  }

  // Ground mode interpolant, scaled just inside the sphere.
  {
    const auto& ext = mesh.extents();
    GridFunction mode =
        (mesh.dimension() == 1)
            ? nodal_interpolant(q.mesh_ptr(),
                                [&ext](double x, double) {
                                  return std::sin(pi * x / ext[0]);
                                })
            : nodal_interpolant(q.mesh_ptr(), [&ext](double x, double y) {
                return std::sin(pi * x / ext[0]) * std::sin(pi * y / ext[1]);
              });
    starts.push_back(scaled_to_norm_sq(q, mode, 0.99 * radius_sq));
  }

  int idx = 0;
  while (static_cast<int>(starts.size()) < opts.multistarts) {
    Rng rng = Rng::substream(opts.seed, kAscentStreamTag,
                             static_cast<std::uint64_t>(trunc.index()),
                             static_cast<std::uint64_t>(idx++));
    GridFunction field = random_smooth_field(q, rng);
    starts.push_back(scaled_to_norm_sq(q, field, 0.99 * radius_sq));
  }

  AlphaResult result;
  result.k = trunc.index();
  double best = -std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  bool any_converged = false;

  for (const GridFunction& start : starts) {
    StartOutcome outcome = ascend(trunc, q, start, radius_sq, opts.tol_grad,
                                  opts.max_iter);
    result.iterations += outcome.iterations;
    any_converged = any_converged || outcome.converged;
    worst = std::min(worst, outcome.value);
    if (outcome.value > best) {
      best = outcome.value;
      result.maximizer = std::move(outcome.point);
    }
  }
  result.alpha = best;
  result.multistart_spread = best - worst;

  if (!any_converged) {
    std::ostringstream msg;
    msg << "ascent for window " << trunc.index()
        << " reached no stationary point within " << opts.max_iter
        << " iterations per start";
    throw AscentError(msg.str(), result);
  }
  if (!(result.alpha > 0.0)) {
    throw AscentError("ascent produced a nonpositive maximum", result);
  }
  const double cap =
      trunc.nonlinearity().plateau() * mesh.measure();
  if (!(result.alpha < cap)) {
    throw AscentError("ascent exceeded the plateau bound", result);
  }
  const double ball_excess = q.norm_sq(result.maximizer) - radius_sq;
  if (ball_excess > 1e-12 * radius_sq) {
    throw AscentError("ascent left the constraint ball", result);
  }
  return result;
}

AreaVerdict check_area_condition(const ProblemSpec& spec, const Mesh& mesh,
                                 const std::vector<AlphaResult>& alphas) {
  if (static_cast<int>(alphas.size()) != spec.m.bump_count()) {
    throw Error("area check: need one alpha per window");
  }
  AreaVerdict verdict;
  const double upper = spec.f.plateau() * mesh.measure();
  double lo = 0.0;
  verdict.overall = true;
  for (int k = 1; k <= spec.m.bump_count(); ++k) {
    const double hi = spec.m.zeros()[k - 1];
    AreaVerdict::Row row;
    row.k = k;
    row.alpha = alphas[k - 1].alpha;
    row.half_bump = 0.5 * (spec.m.integral(hi) - spec.m.integral(lo));
    row.upper = upper;
    row.margin_lower = row.half_bump - row.alpha;
    row.margin_upper = upper - row.half_bump;
    row.pass = row.margin_lower > 0.0 && row.margin_upper > 0.0;
    verdict.overall = verdict.overall && row.pass;
    verdict.rows.push_back(row);
    lo = hi;
  }
  return verdict;
}

}  // namespace kirchpass
