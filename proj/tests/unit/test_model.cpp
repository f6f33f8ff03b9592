#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "kirchpass/model.hpp"
#include "oracles.hpp"

using namespace kirchpass;
constexpr double kPi = std::numbers::pi;

TEST_CASE("sine bump coefficient vanishes at its zeros and peaks between") {
  const auto m = Coefficient::sine_bumps({1.0, 4.0}, {2.0, 0.5});
  CHECK(std::abs(m.value(0.0)) < 1e-15);
  CHECK(std::abs(m.value(1.0)) < 1e-15);
  CHECK(std::abs(m.value(4.0)) < 1e-15);
  CHECK(m.value(0.5) == doctest::Approx(2.0).epsilon(1e-14));  // window center
  CHECK(m.value(2.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.value(0.25) > 0.0);
  CHECK(m.value(3.9) > 0.0);
  CHECK(m.value(5.0) == 0.0);  // beyond the last zero
  CHECK(m.bump_count() == 2);
}

TEST_CASE("sine bump integral matches quadrature and the closed form") {
  const auto m = Coefficient::sine_bumps({1.0, 4.0}, {2.0, 0.5});
  // Full arch over (0,1): height * width * 2/pi.
  CHECK(m.integral(1.0) ==
        doctest::Approx(2.0 * 1.0 * 2.0 / kPi).epsilon(1e-14));
  CHECK(m.integral(4.0) - m.integral(1.0) ==
        doctest::Approx(0.5 * 3.0 * 2.0 / kPi).epsilon(1e-13));
  for (double t : {0.3, 0.99, 1.7, 3.2, 4.5}) {
    const double direct = oracle::integrate_split(
        [&](double s) { return m.value(s); }, 0.0, t, {1.0, 4.0});
    CHECK(m.integral(t) == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("coefficient zeros must be positive and strictly increasing") {
  CHECK_THROWS_AS(Coefficient::sine_bumps({-1.0, 2.0}, {1.0, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(Coefficient::sine_bumps({2.0, 1.0}, {1.0, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(Coefficient::sine_bumps({1.0, 1.0}, {1.0, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(Coefficient::sine_bumps({1.0}, {1.0, 2.0}), ConfigError);
}

TEST_CASE("tabulated coefficient interpolates and integrates exactly") {
  // Triangle profile peaking at t = 1 with zeros at 0 and 2.
  const auto m = Coefficient::tabulated(
      {{0.0, 0.0}, {1.0, 3.0}, {2.0, 0.0}}, {2.0});
  CHECK(m.value(0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(m.value(1.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(m.value(3.0) == doctest::Approx(0.0));  // constant extension
  CHECK(m.integral(2.0) == doctest::Approx(3.0).epsilon(1e-14));
  for (double t : {0.4, 1.3, 2.7}) {
    const double direct = oracle::integrate_split(
        [&](double s) { return m.value(s); }, 0.0, t, {1.0, 2.0});
    CHECK(m.integral(t) == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("callable coefficient falls back to adaptive quadrature") {
  const auto m = Coefficient::from_callable(
      [](double t) { return t * std::max(0.0, 1.0 - t) * 4.0; }, {1.0});
  for (double t : {0.5, 1.0, 1.8}) {
    const double direct = oracle::integrate_split(
        [&](double s) { return m.value(s); }, 0.0, t, {1.0});
    CHECK(m.integral(t) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("sine nonlinearity and its potential") {
  const auto f = Nonlinearity::sine(2.0, 3.0);  // f(t) = 3 sin(pi t / 2)
  CHECK(f.s_star() == 2.0);
  CHECK(std::abs(f.value(2.0)) < 1e-14);
  CHECK(f.value(1.0) == doctest::Approx(3.0).epsilon(1e-14));
  // F(s_star) = 2 * amplitude * s_star / pi.
  CHECK(f.plateau() == doctest::Approx(2.0 * 3.0 * 2.0 / kPi).epsilon(1e-14));
  for (double t : {0.3, 1.2, 2.0}) {
    const double direct =
        oracle::integrate([&](double s) { return f.value(s); }, 0.0, t);
    CHECK(f.potential(t) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("truncation replaces f outside [0, s_star)") {
  const auto f = Nonlinearity::sine(1.0, 1.0);
  CHECK(f.truncated(-0.5) == doctest::Approx(f.value(0.0)));
  CHECK(f.truncated(0.5) == doctest::Approx(f.value(0.5)));
  CHECK(f.truncated(1.0) == 0.0);
  CHECK(f.truncated(7.0) == 0.0);
  // The truncated potential is linear below zero, follows F on [0, s_star)
  // and is constant F(s_star) beyond.
  CHECK(f.truncated_potential(-2.0) ==
        doctest::Approx(-2.0 * f.value(0.0)).epsilon(1e-14));
  CHECK(f.truncated_potential(0.7) == doctest::Approx(f.potential(0.7)));
  CHECK(f.truncated_potential(1.0) == doctest::Approx(f.plateau()));
  CHECK(f.truncated_potential(5.0) == doctest::Approx(f.plateau()));
  CHECK(f.truncated_potential(50.0) == doctest::Approx(f.plateau()));
  // Continuity across s_star.
  CHECK(f.truncated_potential(1.0 - 1e-9) ==
        doctest::Approx(f.plateau()).epsilon(1e-8));
}

TEST_CASE("validation passes on a conforming pair") {
  const auto m = Coefficient::sine_bumps({1.0, 4.0}, {1.0, 1.0});
  const auto f = Nonlinearity::sine(1.0, 1.0);
  const auto report = validate_spec(m, f, 64);
  CHECK(report.pass);
  CHECK(report.violations.empty());
}

TEST_CASE("validation flags a coefficient that dips negative") {
  const auto m = Coefficient::sine_bumps({1.0}, {-0.5});
  const auto f = Nonlinearity::sine(1.0, 1.0);
  const auto report = validate_spec(m, f, 64);
  CHECK_FALSE(report.pass);
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.check == "m_positive_inside_windows") found = true;
  }
  CHECK(found);
}

TEST_CASE("validation flags f(s_star) != 0") {
  const auto m = Coefficient::sine_bumps({1.0}, {1.0});
  const auto f = Nonlinearity::tabulated({{0.0, 0.0}, {1.0, 0.5}}, 1.0);
  const auto report = validate_spec(m, f, 64);
  CHECK_FALSE(report.pass);
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.check == "f_vanishes_at_s_star") found = true;
  }
  CHECK(found);
}

TEST_CASE("validation flags a nonlinearity that is not positive") {
  const auto m = Coefficient::sine_bumps({1.0}, {1.0});
  const auto f = Nonlinearity::tabulated(
      {{0.0, 0.0}, {0.5, -1.0}, {1.0, 0.0}}, 1.0);
  const auto report = validate_spec(m, f, 64);
  CHECK_FALSE(report.pass);
  bool found = false;
  for (const auto& v : report.violations) {
    if (v.check == "f_positive_below_s_star") found = true;
  }
  CHECK(found);
}

TEST_CASE("validation requires a minimum sample count") {
  const auto m = Coefficient::sine_bumps({1.0}, {1.0});
  const auto f = Nonlinearity::sine(1.0, 1.0);
  CHECK_THROWS_AS(validate_spec(m, f, 5), Error);
}

TEST_CASE("truncated energy data per window") {
  const auto spec = std::make_shared<const ProblemSpec>(ProblemSpec{
      Coefficient::sine_bumps({1.0, 4.0}, {2.0, 0.5}),
      Nonlinearity::sine(1.0, 1.0)});
  const auto truncs = build_truncations(spec);
  REQUIRE(truncs.size() == 2);

  const auto& t1 = truncs[0];
  CHECK(t1.index() == 1);
  CHECK(t1.lower() == 0.0);
  CHECK(t1.upper() == 1.0);
  CHECK(t1.bump_integral() ==
        doctest::Approx(2.0 * 2.0 / kPi).epsilon(1e-13));
  // The restricted coefficient vanishes outside its window.
  CHECK(t1.coefficient(2.5) == 0.0);
  CHECK(t1.coefficient(0.5) == doctest::Approx(2.0).epsilon(1e-14));
  // Its integral clamps at the bump integral.
  CHECK(t1.coefficient_integral(0.0) == 0.0);
  CHECK(t1.coefficient_integral(9.0) ==
        doctest::Approx(t1.bump_integral()).epsilon(1e-13));

  const auto& t2 = truncs[1];
  CHECK(t2.lower() == 1.0);
  CHECK(t2.upper() == 4.0);
  CHECK(t2.coefficient(0.5) == 0.0);
  CHECK(t2.coefficient_integral(1.0) == 0.0);
  const double direct = oracle::integrate(
      [&](double s) { return t2.coefficient(s); }, 1.0, 2.2);
  CHECK(t2.coefficient_integral(2.2) == doctest::Approx(direct).epsilon(1e-11));
}
