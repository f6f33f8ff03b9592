// Discrete energy functionals and their exact gradients.
//
// The full energy is I(u) = M(|grad u|^2)/2 - integral of F(u); the k-th
// truncated energy replaces M by the integral of the window-restricted
// coefficient and F by the truncated potential.  Nonlinear terms use the
// nodal quadrature from the mesh module, so the assembled gradient is the
// exact derivative of the discrete value, not a discretization of a
// continuous gradient.
#pragma once

#include <Eigen/Dense>

#include "kirchpass/mesh.hpp"
#include "kirchpass/model.hpp"

namespace kirchpass {

struct EnergyEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;  // nodal dual basis coefficients
  double norm_sq = 0.0;      // |grad u|^2, reused by callers
};

/// Full energy I and its gradient m(|grad u|^2) Q u - load(f(u)).
EnergyEvaluation evaluate_energy(const ProblemSpec& spec,
                                 const StiffnessForm& q,
                                 const GridFunction& u);

/// Truncated energy I_k and its gradient with the restricted coefficient and
/// truncated nonlinearity.
EnergyEvaluation evaluate_truncated_energy(const TruncatedEnergy& trunc,
                                           const StiffnessForm& q,
                                           const GridFunction& u);

/// Dual norm sqrt(g^T Q^{-1} g) of a gradient vector.
double dual_norm(const StiffnessForm& q, const Eigen::VectorXd& gradient);

}  // namespace kirchpass
