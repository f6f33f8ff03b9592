#include "kirchpass/energy.hpp"

#include <cmath>

namespace kirchpass {

EnergyEvaluation evaluate_energy(const ProblemSpec& spec,
                                 const StiffnessForm& q,
                                 const GridFunction& u) {
  EnergyEvaluation out;
  const Eigen::VectorXd qu = q.apply(u.values);
  out.norm_sq = u.values.dot(qu);
  const double potential_part =
      integrate_composed(u, [&spec](double t) { return spec.f.potential(t); });
  out.value = 0.5 * spec.m.integral(out.norm_sq) - potential_part;
  out.gradient =
      spec.m.value(out.norm_sq) * qu -
      assemble_load(u, [&spec](double t) { return spec.f.value(t); });
  return out;
}

EnergyEvaluation evaluate_truncated_energy(const TruncatedEnergy& trunc,
                                           const StiffnessForm& q,
                                           const GridFunction& u) {
  EnergyEvaluation out;
  const Eigen::VectorXd qu = q.apply(u.values);
  out.norm_sq = u.values.dot(qu);
  const Nonlinearity& f = trunc.nonlinearity();
  const double potential_part = integrate_composed(
      u, [&f](double t) { return f.truncated_potential(t); });
  out.value = 0.5 * trunc.coefficient_integral(out.norm_sq) - potential_part;
  out.gradient = trunc.coefficient(out.norm_sq) * qu -
                 assemble_load(u, [&f](double t) { return f.truncated(t); });
  return out;
}

double dual_norm(const StiffnessForm& q, const Eigen::VectorXd& gradient) {
  return std::sqrt(q.dual_norm_sq(gradient));
}

}  // namespace kirchpass
