// Test-side oracles.  Every expected value used by the test suite is either
// a closed-form constant or the output of one of these routines, which are
// written independently of the library internals: quadrature is adaptive
// Simpson instead of Gauss-Kronrod, gradients are central finite differences,
// and the small-mesh ball maximum is a certified branch-and-bound search.
#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature.

namespace detail {

inline double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double simpson_rec(const std::function<double(double)>& g, double a,
                          double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = g(lm);
  const double frm = g(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
    return left + right + err / 15.0;
  }
  return simpson_rec(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Integral of g over [a, b] to absolute tolerance tol.
inline double integrate(const std::function<double(double)>& g, double a,
                        double b, double tol = 1e-12) {
  if (a == b) return 0.0;
  const double fa = g(a);
  const double fb = g(b);
  const double fm = g(0.5 * (a + b));
  const double whole = detail::simpson(a, b, fa, fm, fb);
  return detail::simpson_rec(g, a, b, fa, fm, fb, whole, tol, 48);
}

/// Integral split at interior breakpoints, for integrands with kinks.
inline double integrate_split(const std::function<double(double)>& g, double a,
                              double b, std::vector<double> breaks,
                              double tol = 1e-12) {
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double lo = std::max(a, breaks[i]);
    const double hi = std::min(b, breaks[i + 1]);
    if (hi > lo) acc += integrate(g, lo, hi, tol);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Central finite-difference gradient check.

/// Relative error, in the Euclidean norm, between the analytic gradient and a
/// central finite difference of `value` at x.  Step per coordinate is
/// step_scale * (1 + |x_i|).
inline double gradient_error(
    const std::function<double(const Eigen::VectorXd&)>& value,
    const Eigen::VectorXd& x, const Eigen::VectorXd& analytic,
    double step_scale = 1e-6) {
  Eigen::VectorXd fd(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double h = step_scale * (1.0 + std::abs(x[i]));
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += h;
    xm[i] -= h;
    fd[i] = (value(xp) - value(xm)) / (2.0 * h);
  }
  return (fd - analytic).norm() / std::max(1.0, analytic.norm());
}

// ---------------------------------------------------------------------------
// Certified ball maximum by branch and bound (small meshes only).
//
// Maximizes J(u) = sum_i w_i * G(u_i) over the ellipsoidal ball
// u^T Q u <= radius_sq, assuming w >= 0 and G nondecreasing with G(t) = 0
// for t <= 0.  Under these assumptions replacing u by its positive part
// never decreases J and never increases the norm when Q is an M-matrix, so
// the maximum is attained in the nonnegative orthant; the search covers the
// box [0, b_i] with b_i = sqrt(radius_sq * (Q^{-1})_ii), which contains the
// orthant section of the ball.
//
// Each box gets the monotone upper bound U = sum_i w_i * G(c_i + h_i) (valid
// on the whole box) and a feasible lower bound from the radially projected
// center.  Boxes whose U cannot beat the best lower bound, and boxes proven
// disjoint from the ball, are pruned; the rest are bisected until the
// certified gap max U - best is at most tol.

struct BallMaxResult {
  double lower = 0.0;  // value at the best feasible point found
  double upper = 0.0;  // certified bound on the true maximum
  Eigen::VectorXd argmax;
};

inline BallMaxResult ball_max(const Eigen::MatrixXd& Q,
                              const Eigen::VectorXd& w,
                              const std::function<double(double)>& G,
                              double radius_sq, double tol) {
  const int n = static_cast<int>(Q.rows());
  const Eigen::MatrixXd Qinv = Q.inverse();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  const double lmax = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::runtime_error("ball_max: Q not positive definite");
  }
  const double radius = std::sqrt(radius_sq);

  Eigen::VectorXd half(n);  // initial half-widths of the orthant box
  for (int i = 0; i < n; ++i) half[i] = 0.5 * std::sqrt(radius_sq * Qinv(i, i));

  const auto feasible_value = [&](Eigen::VectorXd u, Eigen::VectorXd* out) {
    const double nsq = u.dot(Q * u);
    if (nsq > radius_sq && nsq > 0.0) u *= radius / std::sqrt(nsq);
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += w[i] * G(u[i]);
    if (out) *out = u;
    return v;
  };

  std::vector<Eigen::VectorXd> centers;
  {
    std::vector<int> idx(n, 0);
    const int grid = 8;
    for (;;) {
      Eigen::VectorXd c(n);
      for (int i = 0; i < n; ++i) c[i] = (2.0 * idx[i] + 1.0) * half[i] / grid;
      centers.push_back(c);
      int d = 0;
      while (d < n && ++idx[d] == grid) idx[d++] = 0;
      if (d == n) break;
    }
    half /= grid;
  }

  BallMaxResult best;
  best.lower = -1.0;
  for (int level = 0; level < 64; ++level) {
    double max_upper = -1.0;
    std::vector<double> uppers(centers.size());
    for (std::size_t b = 0; b < centers.size(); ++b) {
      const Eigen::VectorXd& c = centers[b];
      // Disjoint from the ball when even the nearest point of the box (in
      // the Q norm, bounded through the Euclidean half-diagonal) lies
      // outside.
      const double center_norm = std::sqrt(c.dot(Q * c));
      if (center_norm - std::sqrt(lmax) * half.norm() > radius) {
        uppers[b] = -1.0;
        continue;
      }
      double u_val = 0.0;
      for (int i = 0; i < n; ++i) u_val += w[i] * G(c[i] + half[i]);
      uppers[b] = u_val;
      max_upper = std::max(max_upper, u_val);
      Eigen::VectorXd point;
      const double v = feasible_value(c, &point);
      if (v > best.lower) {
        best.lower = v;
        best.argmax = point;
      }
    }
    if (max_upper - best.lower <= tol) {
      best.upper = std::max(max_upper, best.lower);
      return best;
    }
    std::vector<Eigen::VectorXd> next;
    for (std::size_t b = 0; b < centers.size(); ++b) {
      if (uppers[b] < best.lower) continue;  // cannot contain the maximum
      for (int corner = 0; corner < (1 << n); ++corner) {
        Eigen::VectorXd c = centers[b];
        for (int i = 0; i < n; ++i)
          c[i] += ((corner >> i) & 1 ? 0.5 : -0.5) * half[i];
        next.push_back(c);
      }
    }
    half *= 0.5;
    centers.swap(next);
    if (centers.size() > 4000000) {
      throw std::runtime_error("ball_max: branch and bound exploded");
    }
  }
  throw std::runtime_error("ball_max: refinement limit reached");
}

// ---------------------------------------------------------------------------
// Deterministic pseudo-random numbers for test fields (independent of the
// library's generator).

class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {
    next();
    next();
  }
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2.0 * unit() - 1.0; }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Subprocess and filesystem helpers for CLI-level tests.

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(KIRCHPASS_FIXTURE_DIR) / name;
}

inline std::string cli_path() { return KIRCHPASS_CLI_PATH; }

struct CliResult {
  int exit_code = -1;
  std::string stdout_text;
};

/// Runs the CLI binary with the given argument string; stdout is captured to
/// a file and returned.  `env_prefix` may hold VAR=value assignments.
inline CliResult run_cli(const std::string& args,
                         const std::string& env_prefix = "") {
  static int counter = 0;
  const auto out = std::filesystem::temp_directory_path() /
                   ("kirchpass_cli_out_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++) + ".txt");
  std::string cmd = env_prefix;
  if (!cmd.empty()) cmd += " ";
  cmd += cli_path() + " " + args + " > " + out.string() + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  result.stdout_text = ss.str();
  std::filesystem::remove(out);
  return result;
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    dir_ = std::filesystem::temp_directory_path() /
           ("kirchpass_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
  const std::filesystem::path& path() const { return dir_; }
  std::filesystem::path file(const std::string& name) const {
    return dir_ / name;
  }

 private:
  std::filesystem::path dir_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

}  // namespace oracle
