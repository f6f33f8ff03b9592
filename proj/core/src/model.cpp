#include "kirchpass/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace kirchpass {

namespace {

constexpr double pi = 3.14159265358979323846;

double adaptive_integral(const std::function<double(double)>& g, double a,
                         double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      g, a, b, 10, 1e-13);
}

struct Table {
  std::vector<double> t;
  std::vector<double> v;
  std::vector<double> prefix;  // exact integral from t[0] to t[i]

  explicit Table(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) {
      throw ConfigError("tabulated function: need at least 2 points");
    }
    t.reserve(points.size());
    v.reserve(points.size());
    for (const auto& p : points) {
      if (!t.empty() && !(p.first > t.back())) {
        throw ConfigError("tabulated function: abscissae must be increasing");
      }
      t.push_back(p.first);
      v.push_back(p.second);
    }
    prefix.assign(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i) {
      prefix[i] = prefix[i - 1] +
                  0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
    }
  }

  double value(double x) const {
    if (x <= t.front()) return v.front();
    if (x >= t.back()) return v.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double s = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return v[i - 1] + s * (v[i] - v[i - 1]);
  }

  /// Exact integral of the interpolant from t[0] to x (constant extension
  /// outside the table).
  double integral_from_front(double x) const {
    if (x <= t.front()) return v.front() * (x - t.front());
    if (x >= t.back()) return prefix.back() + v.back() * (x - t.back());
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double mid = value(x);
    return prefix[i - 1] + 0.5 * (mid + v[i - 1]) * (x - t[i - 1]);
  }

  /// Integral from 0 to x.
  double integral(double x) const {
    return integral_from_front(x) - integral_from_front(0.0);
  }
};

}  // namespace

void Coefficient::check_zeros(const std::vector<double>& zeros) {
  if (zeros.empty()) throw ConfigError("coefficient: zeros list is empty");
  double prev = 0.0;
  for (double z : zeros) {
    if (!(z > prev)) {
      throw ConfigError(
          "coefficient: zeros must be strictly increasing and positive");
    }
    prev = z;
  }
}

Coefficient Coefficient::sine_bumps(std::vector<double> zeros,
                                    std::vector<double> heights) {
  check_zeros(zeros);
  if (heights.size() != zeros.size()) {
    throw ConfigError("coefficient: need one height per zero");
  }
  Coefficient m;
  m.zeros_ = zeros;
  m.tol_zero_ = 1e-10;

  auto window_of = [zeros](double t) -> int {
    // Index k (1-based) with t in [t_{k-1}, t_k), or 0 if beyond the last zero.
    double lo = 0.0;
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      if (t >= lo && t < zeros[k]) return static_cast<int>(k) + 1;
      lo = zeros[k];
    }
    return 0;
  };

  m.value_ = [zeros, heights, window_of](double t) -> double {
    if (t < 0.0) return 0.0;
    const int k = window_of(t);
    if (k == 0) return 0.0;
    const double lo = (k == 1) ? 0.0 : zeros[k - 2];
    const double hi = zeros[k - 1];
    return heights[k - 1] * std::sin(pi * (t - lo) / (hi - lo));
  };

  m.closed_integral_ = [zeros, heights](double t) -> double {
    if (t <= 0.0) return 0.0;
    double acc = 0.0;
    double lo = 0.0;
    for (std::size_t k = 0; k < zeros.size(); ++k) {
      const double hi = zeros[k];
      const double width = hi - lo;
      if (t >= hi) {
        acc += heights[k] * width * 2.0 / pi;
      } else {
        acc += heights[k] * width / pi *
               (1.0 - std::cos(pi * (t - lo) / width));
        return acc;
      }
      lo = hi;
    }
    return acc;  // beyond the last zero m vanishes
  };
  return m;
}

Coefficient Coefficient::tabulated(std::vector<std::pair<double, double>> points,
                                   std::vector<double> zeros) {
  check_zeros(zeros);
  Coefficient m;
  m.zeros_ = std::move(zeros);
  m.tol_zero_ = 1e-6;
  auto table = std::make_shared<Table>(points);
  m.value_ = [table](double t) { return table->value(t); };
  m.closed_integral_ = [table](double t) { return table->integral(t); };
  return m;
}

Coefficient Coefficient::from_callable(std::function<double(double)> f,
                                       std::vector<double> zeros) {
  check_zeros(zeros);
  Coefficient m;
  m.zeros_ = std::move(zeros);
  m.tol_zero_ = 1e-10;
  m.value_ = std::move(f);
  m.finalize_breakpoint_cache();
  return m;
}

void Coefficient::finalize_breakpoint_cache() {
  prefix_.assign(zeros_.size() + 1, 0.0);
  double lo = 0.0;
  for (std::size_t k = 0; k < zeros_.size(); ++k) {
    prefix_[k + 1] = prefix_[k] + adaptive_integral(value_, lo, zeros_[k]);
    lo = zeros_[k];
  }
}

double Coefficient::integral(double t) const {
  if (closed_integral_) return closed_integral_(t);
  if (t <= 0.0) return -adaptive_integral(value_, t, 0.0);
  // Quadrature fallback: start from the cached prefix at the last zero
  // below t so every panel is breakpoint-free.
  std::size_t k = 0;
  double lo = 0.0;
  while (k < zeros_.size() && zeros_[k] <= t) {
    lo = zeros_[k];
    ++k;
  }
  return prefix_[k] + adaptive_integral(value_, lo, t);
}

Nonlinearity Nonlinearity::sine(double s_star, double amplitude) {
  if (!(s_star > 0.0)) throw ConfigError("nonlinearity: s_star must be positive");
  Nonlinearity f;
  f.s_star_ = s_star;
  f.tol_zero_ = 1e-10;
  f.value_ = [s_star, amplitude](double t) {
    return amplitude * std::sin(pi * t / s_star);
  };
  f.closed_potential_ = [s_star, amplitude](double t) {
    return amplitude * s_star / pi * (1.0 - std::cos(pi * t / s_star));
  };
  f.plateau_ = f.closed_potential_(s_star);
  return f;
}

Nonlinearity Nonlinearity::tabulated(std::vector<std::pair<double, double>> points,
                                     double s_star) {
  if (!(s_star > 0.0)) throw ConfigError("nonlinearity: s_star must be positive");
  Nonlinearity f;
  f.s_star_ = s_star;
  f.tol_zero_ = 1e-6;
  auto table = std::make_shared<Table>(points);
  f.value_ = [table](double t) { return table->value(t); };
  f.closed_potential_ = [table](double t) { return table->integral(t); };
  f.plateau_ = f.closed_potential_(s_star);
  return f;
}

Nonlinearity Nonlinearity::from_callable(std::function<double(double)> fn,
                                         double s_star) {
  if (!(s_star > 0.0)) throw ConfigError("nonlinearity: s_star must be positive");
  Nonlinearity f;
  f.s_star_ = s_star;
  f.tol_zero_ = 1e-10;
  f.value_ = std::move(fn);
  f.plateau_ = adaptive_integral(f.value_, 0.0, s_star);
  return f;
}

double Nonlinearity::potential(double t) const {
  if (closed_potential_) return closed_potential_(t);
  if (t == 0.0) return 0.0;
  if (t > 0.0) {
    if (t <= s_star_) return adaptive_integral(value_, 0.0, t);
    return plateau_ + adaptive_integral(value_, s_star_, t);
  }
  return -adaptive_integral(value_, t, 0.0);
}

double Nonlinearity::truncated(double t) const {
  if (t < 0.0) return value_(0.0);
  if (t < s_star_) return value_(t);
  return 0.0;
}

double Nonlinearity::truncated_potential(double t) const {
  if (t <= 0.0) return value_(0.0) * t;
  if (t < s_star_) return potential(t);
  return plateau_;
}

TruncatedEnergy::TruncatedEnergy(std::shared_ptr<const ProblemSpec> spec, int k)
    : spec_(std::move(spec)), k_(k) {
  if (!spec_) throw Error("truncation: spec is null");
  const auto& zeros = spec_->m.zeros();
  if (k < 1 || k > static_cast<int>(zeros.size())) {
    throw Error("truncation: window index out of range");
  }
  lo_ = (k == 1) ? 0.0 : zeros[k - 2];
  hi_ = zeros[k - 1];
  bump_ = spec_->m.integral(hi_) - spec_->m.integral(lo_);
}

double TruncatedEnergy::coefficient(double t) const {
  if (t < lo_ || t >= hi_) return 0.0;
  return spec_->m.value(t);
}

double TruncatedEnergy::coefficient_integral(double t) const {
  if (t <= lo_) return 0.0;
  if (t >= hi_) return bump_;
  return spec_->m.integral(t) - spec_->m.integral(lo_);
}

std::vector<TruncatedEnergy> build_truncations(
    std::shared_ptr<const ProblemSpec> spec) {
  std::vector<TruncatedEnergy> out;
  const int count = spec->m.bump_count();
  out.reserve(count);
  for (int k = 1; k <= count; ++k) out.emplace_back(spec, k);
  return out;
}

ValidationReport validate_spec(const Coefficient& m, const Nonlinearity& f,
                               int samples) {
  if (samples < 10) {
    throw Error("validate: need at least 10 samples per interval");
  }
  ValidationReport report;
  auto fail = [&report](const std::string& check, const std::string& message,
                        double location) {
    report.violations.push_back({check, message, location});
  };

  for (std::size_t k = 0; k < m.zeros().size(); ++k) {
    const double tk = m.zeros()[k];
    const double mk = m.value(tk);
    if (std::abs(mk) > m.zero_tolerance()) {
      std::ostringstream msg;
      msg << "m(" << tk << ") = " << mk << " is not zero within "
          << m.zero_tolerance();
      fail("m_vanishes_at_zeros", msg.str(), tk);
    }
  }

  double lo = 0.0;
  for (std::size_t k = 0; k < m.zeros().size(); ++k) {
    const double hi = m.zeros()[k];
    for (int j = 1; j <= samples; ++j) {
      const double t = lo + (hi - lo) * j / (samples + 1);
      const double v = m.value(t);
      if (!(v > 0.0)) {
        std::ostringstream msg;
        msg << "m(" << t << ") = " << v << " is not positive inside window "
            << (k + 1);
        fail("m_positive_inside_windows", msg.str(), t);
        break;
      }
    }
    lo = hi;
  }

  const double fs = f.value(f.s_star());
  if (std::abs(fs) > f.zero_tolerance()) {
    std::ostringstream msg;
    msg << "f(s_star) = " << fs << " is not zero within " << f.zero_tolerance();
    fail("f_vanishes_at_s_star", msg.str(), f.s_star());
  }

  for (int j = 1; j <= samples; ++j) {
    const double t = f.s_star() * j / (samples + 1);
    const double v = f.value(t);
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "f(" << t << ") = " << v << " is not positive on (0, s_star)";
      fail("f_positive_below_s_star", msg.str(), t);
      break;
    }
  }

  report.pass = report.violations.empty();
  return report;
}

}  // namespace kirchpass
