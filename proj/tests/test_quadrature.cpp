#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rfmle/quadrature.hpp"

using namespace rfmle;
constexpr double kPi = std::numbers::pi;

TEST_CASE("polynomials up to cubic are exact") {
  CHECK(integrate_1d([](double x) { return x * x; }, 0.0, 1.0).value == 1.0 / 3.0);
  const auto r = integrate_1d([](double x) { return 4 * x * x * x - x + 2; }, -1.0, 2.0);
  CHECK(r.value == doctest::Approx(15.0 - 1.5 + 6.0).epsilon(1e-15));
  CHECK_FALSE(r.diagnostics.max_depth_exceeded);
}

TEST_CASE("area under the lower-left circle arc") {
  const DomainSpec c = circle_domain(6, 6, 2);
  const auto r = integrate_1d([&](double s) { return c.gamma12(s); }, 4.0, 6.0);
  CHECK(r.value == doctest::Approx(12.0 - kPi).epsilon(1e-9));
}

TEST_CASE("evaluation budget bounds the work on a noisy integrand") {
  // A deterministic pseudo-noise that never meets the tolerance.
  const auto noisy = [](double x) { return std::sin(1e7 * x * x); };
  QuadConfig cfg;
  cfg.max_evaluations = 5000;
  const auto r = integrate_1d(noisy, 0.0, 1.0, cfg);
  CHECK(r.diagnostics.max_depth_exceeded);
  CHECK(r.diagnostics.evaluations < 2 * cfg.max_evaluations);
}

TEST_CASE("empty interval") {
  CHECK(integrate_1d([](double x) { return std::exp(x); }, 2.0, 2.0).value == 0.0);
}

TEST_CASE("smooth and oscillatory integrands") {
  CHECK(integrate_1d([](double x) { return std::exp(x); }, 0.0, 1.0).value ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-9));
  // 40 half waves: the initial panels keep the first estimate from aliasing to 0.
  const auto r = integrate_1d([](double x) { return std::sin(40.5 * x) * std::sin(40.5 * x); },
                              0.0, kPi);
  CHECK(r.value == doctest::Approx(kPi / 2 - std::sin(81 * kPi) / 162).epsilon(1e-7));
}

TEST_CASE("vector valued integrand") {
  const auto r = integrate_1d([](double x) { return Eigen::Vector2d(1.0, x); }, 0.0, 2.0);
  CHECK(r.value[0] == doctest::Approx(2.0));
  CHECK(r.value[1] == doctest::Approx(2.0));
}

TEST_CASE("depth limit is reported") {
  QuadConfig cfg;
  cfg.max_depth = 2;
  cfg.abs_tol = 1e-14;
  cfg.rel_tol = 1e-14;
  const auto r = integrate_1d([](double x) { return std::sqrt(x); }, 0.0, 1.0, cfg);
  CHECK(r.diagnostics.max_depth_exceeded);
}

TEST_CASE("area of the disc") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const auto r = integrate_over_G([](double, double) { return 1.0; }, d);
  CHECK(std::abs(r.value - 4 * kPi) <= 1e-7 * 4 * kPi);
  CHECK_FALSE(r.diagnostics.max_depth_exceeded);
}

TEST_CASE("first moments of the disc") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  // int s dA = cx * area, int s t dA = cx cy area.
  const auto r = integrate_over_G([](double s, double t) { return Eigen::Vector2d(s, s * t); }, d);
  CHECK(r.value[0] == doctest::Approx(6 * 4 * kPi).epsilon(1e-7));
  CHECK(r.value[1] == doctest::Approx(36 * 4 * kPi).epsilon(1e-7));
}

TEST_CASE("polygon with three strips") {
  using Dir = Curve::Direction;
  DomainSpec d;
  d.a = 1.0;
  d.b1 = 2.0;
  d.b2 = 3.0;
  d.c = 4.0;
  // Quadrilateral with vertices (1,2), (2,1), (4,3), (3,4).
  d.gamma12 = polynomial_curve({{1.0, 2.0, {3.0, -1.0}}}, Dir::decreasing);
  d.gamma1 = polynomial_curve({{2.0, 4.0, {-1.0, 1.0}}}, Dir::increasing);
  d.gamma2 = polynomial_curve({{1.0, 3.0, {1.0, 1.0}}}, Dir::increasing);
  d.gamma0 = polynomial_curve({{3.0, 4.0, {7.0, -1.0}}}, Dir::decreasing);
  const ValidatedDomain v = validate(d);
  REQUIRE(v.strips().size() == 3);
  // A rectangle of sides sqrt(2) and 2 sqrt(2).
  CHECK(integrate_over_G([](double, double) { return 1.0; }, v).value == doctest::Approx(4.0));
  // Centroid (2.5, 2.5).
  CHECK(integrate_over_G([](double s, double) { return s; }, v).value == doctest::Approx(10.0));
}

TEST_CASE("Riemann integral of s t over the disc against polar coordinates") {
  const ValidatedDomain d = validate(circle_domain(2, 2, 1));
  // (2 + r cos)(2 + r sin) r, integrated: 4 pi.
  const auto r = integrate_over_G([](double s, double t) { return s * t; }, d);
  CHECK(r.value == doctest::Approx(4 * kPi).epsilon(1e-8));
}
