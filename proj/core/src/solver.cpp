#include "kirchpass/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kirchpass/rng.hpp"

namespace kirchpass {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr std::uint64_t kSphereStreamTag = 0xE0;

/// Flat evaluation helpers for one truncated energy on raw coefficient
/// vectors; keeps the inner loop free of GridFunction churn.
class TruncEval {
 public:
  TruncEval(const TruncatedEnergy& trunc, const StiffnessForm& q)
      : trunc_(trunc), q_(q), weights_(q.mesh().lumped_weights()) {}

  double potential_sum(const Eigen::VectorXd& u) const {
    const Nonlinearity& f = trunc_.nonlinearity();
    double acc = 0.0;
    for (int i = 0; i < u.size(); ++i) {
      acc += weights_[i] * f.truncated_potential(u[i]);
    }
    return acc;  // boundary nodes contribute zero potential
  }

  double value(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd qu = q_.apply(u);
    const double nsq = u.dot(qu);
    return 0.5 * trunc_.coefficient_integral(nsq) - potential_sum(u);
  }

  /// Gradient in the nodal dual basis; also reports |grad u|^2.
  Eigen::VectorXd gradient(const Eigen::VectorXd& u, double* norm_sq) const {
    const Eigen::VectorXd qu = q_.apply(u);
    const double nsq = u.dot(qu);
    if (norm_sq != nullptr) *norm_sq = nsq;
    const Nonlinearity& f = trunc_.nonlinearity();
    Eigen::VectorXd g = trunc_.coefficient(nsq) * qu;
    for (int i = 0; i < u.size(); ++i) {
      g[i] -= weights_[i] * f.truncated(u[i]);
    }
    return g;
  }

  double segment_length(const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b) const {
    const Eigen::VectorXd d = a - b;
    return std::sqrt(std::max(0.0, d.dot(q_.apply(d))));
  }

  const StiffnessForm& form() const { return q_; }

 private:
  const TruncatedEnergy& trunc_;
  const StiffnessForm& q_;
  const Eigen::VectorXd& weights_;
};

struct Peak {
  double tau = 0.0;  // position in [0, 2] across the two segments
  Eigen::VectorXd point;
  double value = 0.0;
};

/// Maximum of I_k along the two path segments adjacent to the argmax node.
/// The node maximum only approximates the path maximum; the refined peak has
/// no derivative component along the path, which is what lets the gradient
/// tolerance be reached at all.
Peak refine_peak(const TruncEval& eval,
                 const std::vector<Eigen::VectorXd>& nodes, int imax) {
  const Eigen::VectorXd& a = nodes[imax - 1];
  const Eigen::VectorXd& b = nodes[imax];
  const Eigen::VectorXd& c = nodes[imax + 1];
  auto arc = [&](double t) -> Eigen::VectorXd {
    if (t <= 1.0) return a + t * (b - a);
    return b + (t - 1.0) * (c - b);
  };

  // Coarse scan, then golden section around the best sample.
  const int scan = 16;
  double best_t = 1.0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= scan; ++j) {
    const double t = 2.0 * j / scan;
    const double v = eval.value(arc(t));
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }

  double lo = std::max(0.0, best_t - 2.0 / scan);
  double hi = std::min(2.0, best_t + 2.0 / scan);
  const double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = eval.value(arc(x1));
  double f2 = eval.value(arc(x2));
  for (int it = 0; it < 48 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = eval.value(arc(x2));
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = eval.value(arc(x1));
    }
  }

  Peak peak;
  peak.tau = 0.5 * (lo + hi);
  peak.point = arc(peak.tau);
  peak.value = eval.value(peak.point);
  if (best_v > peak.value) {
    peak.tau = best_t;
    peak.point = arc(best_t);
    peak.value = best_v;
  }
  return peak;
}

/// Redistributes the interior nodes of a window to equal arclength along the
/// current polyline.  Applied only when the local spacing degenerates, so
/// adaptive clustering near the peak survives.
void re_equalize(const TruncEval& eval, std::vector<Eigen::VectorXd>& nodes,
                 int first, int last) {
  const int count = last - first;  // segments in the window
  if (count < 2) return;
  std::vector<double> cum(count + 1, 0.0);
  for (int j = 0; j < count; ++j) {
    cum[j + 1] = cum[j] + eval.segment_length(nodes[first + j],
                                              nodes[first + j + 1]);
  }
  const double total = cum[count];
  if (total <= 0.0) return;
  double longest = 0.0;
  double shortest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < count; ++j) {
    const double len = cum[j + 1] - cum[j];
    longest = std::max(longest, len);
    shortest = std::min(shortest, len);
  }
  if (longest <= 4.0 * std::max(shortest, 1e-300 * total)) return;

  std::vector<Eigen::VectorXd> fresh;
  fresh.reserve(count - 1);
  for (int j = 1; j < count; ++j) {
    const double target = total * j / count;
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    int seg = static_cast<int>(it - cum.begin()) - 1;
    seg = std::min(seg, count - 1);
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    fresh.push_back(nodes[first + seg] +
                    t * (nodes[first + seg + 1] - nodes[first + seg]));
  }
  for (int j = 1; j < count; ++j) nodes[first + j] = std::move(fresh[j - 1]);
}

GridFunction as_grid_function(const StiffnessForm& q,
                              const Eigen::VectorXd& u) {
  return GridFunction(q.mesh_ptr(), u);
}

}  // namespace

GridFunction construct_endpoint(const std::vector<TruncatedEnergy>& truncs,
                                const StiffnessForm& q,
                                const MountainPassConfig& cfg) {
  if (truncs.empty()) throw Error("endpoint: no truncations given");
  const Mesh& mesh = q.mesh();
  const auto& ext = mesh.extents();
  GridFunction direction =
      (mesh.dimension() == 1)
          ? nodal_interpolant(q.mesh_ptr(),
                              [&ext](double x, double) {
                                return std::sin(pi * x / ext[0]);
                              })
          : nodal_interpolant(q.mesh_ptr(), [&ext](double x, double y) {
              return std::sin(pi * x / ext[0]) * std::sin(pi * y / ext[1]);
            });
  const double dir_norm = std::sqrt(q.norm_sq(direction));
  direction.values /= dir_norm;

  const double t_last = truncs.back().upper();
  double tau = std::sqrt(t_last);
  while (tau <= cfg.tau_max) {
    GridFunction candidate = direction;
    candidate.values *= tau;
    bool all_negative = true;
    for (const TruncatedEnergy& trunc : truncs) {
      const double margin = 1e-10 * (1.0 + 0.5 * trunc.bump_integral());
      const double value =
          evaluate_truncated_energy(trunc, q, candidate).value;
      if (!(value < -margin)) {
        all_negative = false;
        break;
      }
    }
    if (all_negative && tau * tau > t_last) return candidate;
    tau *= 2.0;
  }
  throw SolveError(SolveError::Kind::endpoint_not_found, 0,
                   "no ray point with negative energy for every window was "
                   "found below tau_max; the upper area inequality is likely "
                   "violated or marginal");
}

Geometry verify_geometry(const TruncatedEnergy& trunc, const StiffnessForm& q,
                         const AlphaResult& alpha,
                         const MountainPassConfig& cfg, int spot_checks) {
  Geometry geo;
  geo.rho = std::sqrt(trunc.upper());
  geo.delta = 0.5 * trunc.bump_integral() - alpha.alpha;
  if (!(geo.delta > 0.0)) {
    std::ostringstream msg;
    msg << "window " << trunc.index()
        << ": lower area inequality fails (half bump "
        << 0.5 * trunc.bump_integral() << " <= alpha " << alpha.alpha << ")";
    throw SolveError(SolveError::Kind::geometry_fails, trunc.index(),
                     msg.str());
  }

  const double slack = 1e-9 * (1.0 + trunc.bump_integral());
  for (int s = 0; s < spot_checks; ++s) {
    Rng rng = Rng::substream(cfg.seed, kSphereStreamTag,
                             static_cast<std::uint64_t>(trunc.index()),
                             static_cast<std::uint64_t>(s));
    Eigen::VectorXd v(q.mesh().interior_dof_count());
    for (int i = 0; i < v.size(); ++i) v[i] = rng.next_symmetric();
    GridFunction probe(q.mesh_ptr(), std::move(v));
    const double nsq = q.norm_sq(probe);
    if (nsq <= 0.0) continue;
    probe.values *= geo.rho / std::sqrt(nsq);
    const double value = evaluate_truncated_energy(trunc, q, probe).value;
    if (value < geo.delta - slack) {
      std::ostringstream msg;
      msg << "window " << trunc.index() << ": sphere sample has energy "
          << value << " below delta " << geo.delta
          << "; alpha is untrustworthy";
      throw SolveError(SolveError::Kind::geometry_fails, trunc.index(),
                       msg.str());
    }
  }
  return geo;
}

MountainPassOutcome mountain_pass_solve(const TruncatedEnergy& trunc,
                                        const StiffnessForm& q,
                                        const GridFunction& endpoint,
                                        double delta,
                                        const MountainPassConfig& cfg) {
  if (cfg.path_points < 16) throw Error("solver: path_points must be >= 16");
  if (!(cfg.tol_grad > 0.0) || !(cfg.tol_res > 0.0)) {
    throw Error("solver: tolerances must be positive");
  }
  if (endpoint.mesh.get() != &q.mesh()) {
    throw Error("solver: endpoint mesh mismatch");
  }

  const TruncEval eval(trunc, q);
  const int P = cfg.path_points;
  const int k = trunc.index();
  const double bump = trunc.bump_integral();
  const double eps_deg = 1e-8 * trunc.upper();

  std::vector<Eigen::VectorXd> nodes(P);
  for (int j = 0; j < P; ++j) {
    nodes[j] = (static_cast<double>(j) / (P - 1)) * endpoint.values;
  }

  MountainPassOutcome out;
  out.k = k;
  out.delta = delta;
  out.rho = std::sqrt(trunc.upper());

  double warm_step = -1.0;
  int stalls = 0;

  auto fail = [&](SolveError::Kind kind, const std::string& what) {
    SolveError err(kind, k, what);
    err.partial = out;
    return err;
  };

  for (int iter = 0; iter < cfg.max_outer_iter; ++iter) {
    // Argmax over interior nodes; ties resolved toward the lower index.
    int imax = -1;
    double vmax = -std::numeric_limits<double>::infinity();
    for (int j = 1; j + 1 < P; ++j) {
      const double v = eval.value(nodes[j]);
      if (v > vmax) {
        vmax = v;
        imax = j;
      }
    }
    if (imax < 0 || !std::isfinite(vmax)) {
      throw fail(SolveError::Kind::non_convergence,
                 "path energies are not finite");
    }

    Peak peak = refine_peak(eval, nodes, imax);
    double nsq = 0.0;
    const Eigen::VectorXd grad = eval.gradient(peak.point, &nsq);
    const Eigen::VectorXd riesz = q.solve(grad);
    const double gdn = std::sqrt(std::max(0.0, grad.dot(riesz)));

    out.level = peak.value;
    out.norm_sq = nsq;
    out.grad_dual_norm = gdn;
    out.outer_iterations = iter + 1;
    if (cfg.record_history) {
      out.history.push_back(
          {peak.value, (imax - 1 + peak.tau) / (P - 1), gdn});
    }

    if (peak.value < -1e-9 * (1.0 + bump)) {
      throw fail(SolveError::Kind::path_collapsed,
                 "path maximum dropped below zero; no positive level between "
                 "the endpoints survives");
    }

    if (gdn < cfg.tol_grad * (1.0 + std::abs(peak.value))) {
      out.solution = as_grid_function(q, peak.point);

      const double bracket_slack = 1e-6 * (1.0 + std::abs(delta));
      if (!(out.level >= delta - bracket_slack &&
            out.level < 0.5 * bump)) {
        std::ostringstream msg;
        msg << "window " << k << ": level " << out.level
            << " escaped the bracket [" << delta << ", " << 0.5 * bump << ")";
        throw fail(SolveError::Kind::non_convergence, msg.str());
      }

      const Nonlinearity& f = trunc.nonlinearity();
      auto fstar = [&f](double t) { return f.truncated(t); };
      out.residual =
          weak_residual(q, out.solution, trunc.coefficient(nsq), fstar);
      const double load_scale =
          1.0 + std::sqrt(q.dual_norm_sq(assemble_load(out.solution, fstar)));
      if (out.residual > cfg.tol_res * load_scale) {
        std::ostringstream msg;
        msg << "window " << k << ": weak residual " << out.residual
            << " exceeds tolerance at the converged point";
        throw fail(SolveError::Kind::non_convergence, msg.str());
      }
      return out;
    }

    // One Armijo-controlled steepest descent step at the peak, restricted to
    // the component tangential to the norm shell.  The radial direction is
    // the unstable one at the saddle and is resolved by the maximum over the
    // path; descending along it would push nodes through the ridge only for
    // the arclength redistribution to refill it.
    const double radial_coeff = nsq > 0.0 ? grad.dot(peak.point) / nsq : 0.0;
    const Eigen::VectorXd direction = riesz - radial_coeff * peak.point;
    const double slope = grad.dot(direction);  // tangential dual norm squared

    double step = (warm_step > 0.0) ? 2.0 * warm_step
                                    : cfg.descent_step_init / (1.0 + gdn);
    // Keep single moves below a quarter of the sphere radius.
    if (gdn > 0.0) step = std::min(step, 0.25 * out.rho / gdn);
    // Damp when the squared norm sits next to a coefficient zero, where the
    // quadratic term switches branch.
    if (std::min(std::abs(nsq - trunc.lower()), std::abs(nsq - trunc.upper())) <
        eps_deg) {
      step *= 0.1;
    }

    bool accepted = false;
    if (slope > 0.0) {
      for (int back = 0; back < 60; ++back) {
        const Eigen::VectorXd candidate = peak.point - step * direction;
        const double cand_value = eval.value(candidate);
        if (cand_value <= peak.value - 1e-4 * step * slope) {
          nodes[imax] = candidate;
          warm_step = step;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
    }

    if (!accepted) {
      ++stalls;
      warm_step = -1.0;
      if (stalls >= 8) {
        throw fail(SolveError::Kind::non_convergence,
                   "descent stalled at the path maximum before reaching the "
                   "gradient tolerance");
      }
      continue;
    }
    stalls = 0;

    re_equalize(eval, nodes, std::max(1, imax - 2), std::min(P - 2, imax + 2));
  }

  throw fail(SolveError::Kind::non_convergence,
             "max_outer_iter reached before the gradient tolerance");
}

std::vector<MountainPassOutcome> solve_family(
    const std::shared_ptr<const ProblemSpec>& spec, const StiffnessForm& q,
    const std::vector<AlphaResult>& alphas, const MountainPassConfig& cfg) {
  const std::vector<TruncatedEnergy> truncs = build_truncations(spec);
  if (alphas.size() != truncs.size()) {
    throw Error("solve family: need one alpha per window");
  }

  std::vector<MountainPassOutcome> completed;
  GridFunction endpoint;
  try {
    endpoint = construct_endpoint(truncs, q, cfg);
  } catch (SolveError& err) {
    throw;
  }

  for (std::size_t i = 0; i < truncs.size(); ++i) {
    try {
      const Geometry geo =
          verify_geometry(truncs[i], q, alphas[i], cfg);
      completed.push_back(
          mountain_pass_solve(truncs[i], q, endpoint, geo.delta, cfg));
    } catch (SolveError& err) {
      err.completed = std::move(completed);
      throw;
    }
  }

  for (std::size_t i = 1; i < completed.size(); ++i) {
    if (!(completed[i].norm_sq > completed[i - 1].norm_sq)) {
      SolveError err(SolveError::Kind::ordering_fails,
                     completed[i].k,
                     "squared norms of the family are not strictly increasing");
      err.completed = std::move(completed);
      throw err;
    }
  }
  return completed;
}

}  // namespace kirchpass
