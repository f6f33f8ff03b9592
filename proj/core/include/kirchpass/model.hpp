// Problem data: the degenerate coefficient m with its zeros 0 < t_1 < ... <
// t_K, the nonlinearity f with its first positive zero s_star, and the
// per-window truncations used by the energy and solver modules.
//
// Built-in families carry closed-form antiderivatives.  Custom callables fall
// back to adaptive Gauss-Kronrod quadrature that is always split at the
// breakpoints {0, t_1, ..., t_K, s_star}, so kinks never sit inside a panel.
#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "kirchpass/errors.hpp"

namespace kirchpass {

/// One failed hypothesis check: which check, a message, and the sample
/// location at which the violation was observed.
struct HypothesisViolation {
  std::string check;
  std::string message;
  double location = 0.0;
};

struct ValidationReport {
  bool pass = false;
  std::vector<HypothesisViolation> violations;
};

/// The coefficient m >= 0 with prescribed interior zeros.
class Coefficient {
 public:
  /// m restricted to [t_{k-1}, t_k] is a positive sine arch of the given
  /// height; m vanishes beyond the last zero.  heights.size() must equal
  /// zeros.size().
  static Coefficient sine_bumps(std::vector<double> zeros,
                                std::vector<double> heights);

  /// Piecewise linear interpolation of (t, m(t)) samples, extended by its
  /// boundary values outside the table.  Integrals are exact.
  static Coefficient tabulated(std::vector<std::pair<double, double>> points,
                               std::vector<double> zeros);

  /// Arbitrary continuous coefficient; integrals use adaptive quadrature.
  static Coefficient from_callable(std::function<double(double)> m,
                                   std::vector<double> zeros);

  double value(double t) const { return value_(t); }

  /// Integral of m from 0 to t (t >= 0).
  double integral(double t) const;

  const std::vector<double>& zeros() const { return zeros_; }
  int bump_count() const { return static_cast<int>(zeros_.size()); }

  /// Tolerance used when checking that m vanishes at its declared zeros:
  /// tight for analytic families, looser for tabulated data.
  double zero_tolerance() const { return tol_zero_; }

 private:
  Coefficient() = default;
  static void check_zeros(const std::vector<double>& zeros);
  void finalize_breakpoint_cache();

  std::function<double(double)> value_;
  // Closed-form integral if the family provides one; empty otherwise.
  std::function<double(double)> closed_integral_;
  std::vector<double> zeros_;
  std::vector<double> prefix_;  // integral up to each zero, for the fallback
  double tol_zero_ = 1e-10;
};

/// The nonlinearity f > 0 on (0, s_star) with f(s_star) = 0.
class Nonlinearity {
 public:
  /// f(t) = amplitude * sin(pi t / s_star).
  static Nonlinearity sine(double s_star, double amplitude);

  /// Piecewise linear interpolation, extended by boundary values.
  static Nonlinearity tabulated(std::vector<std::pair<double, double>> points,
                                double s_star);

  /// Arbitrary continuous nonlinearity; integrals use adaptive quadrature.
  static Nonlinearity from_callable(std::function<double(double)> f,
                                    double s_star);

  double value(double t) const { return value_(t); }

  /// F(t) = integral of f from 0 to t.
  double potential(double t) const;

  /// Truncation: f(0) for t < 0, f(t) on [0, s_star), 0 beyond.
  double truncated(double t) const;

  /// Integral of the truncation from 0 to t; constant F(s_star) beyond
  /// s_star and linear with slope f(0) for t < 0.
  double truncated_potential(double t) const;

  double s_star() const { return s_star_; }

  /// F(s_star), the plateau value of the truncated potential.
  double plateau() const { return plateau_; }

  double zero_tolerance() const { return tol_zero_; }

 private:
  Nonlinearity() = default;

  std::function<double(double)> value_;
  std::function<double(double)> closed_potential_;
  double s_star_ = 0.0;
  double plateau_ = 0.0;
  double tol_zero_ = 1e-10;
};

struct ProblemSpec {
  Coefficient m;
  Nonlinearity f;
};

/// The data of one truncated problem: the coefficient restricted to the k-th
/// window [t_{k-1}, t_k] (zero elsewhere), its integral, and the truncated
/// nonlinearity.
class TruncatedEnergy {
 public:
  TruncatedEnergy(std::shared_ptr<const ProblemSpec> spec, int k);

  int index() const { return k_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }

  /// The restricted coefficient: m(t) on [t_{k-1}, t_k), zero elsewhere.
  double coefficient(double t) const;

  /// Integral of the restricted coefficient from 0 to t.  Vanishes below the
  /// window and saturates at bump_integral() above it.
  double coefficient_integral(double t) const;

  /// Integral of m over the whole window.
  double bump_integral() const { return bump_; }

  const Nonlinearity& nonlinearity() const { return spec_->f; }
  const ProblemSpec& problem() const { return *spec_; }

 private:
  std::shared_ptr<const ProblemSpec> spec_;
  int k_ = 0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double bump_ = 0.0;
};

/// Builds the truncations for every window k = 1..K.
std::vector<TruncatedEnergy> build_truncations(
    std::shared_ptr<const ProblemSpec> spec);

/// Checks the structural hypotheses on (m, f) by sampling: m vanishes at its
/// declared zeros, m > 0 strictly inside each window, f > 0 on (0, s_star),
/// and f(s_star) = 0.  `samples` interior sample points per interval
/// (minimum 10).
ValidationReport validate_spec(const Coefficient& m, const Nonlinearity& f,
                               int samples = 64);

}  // namespace kirchpass
