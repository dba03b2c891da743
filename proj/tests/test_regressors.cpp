#include <doctest.h>

#include <cmath>

#include "rfmle/error.hpp"
#include "rfmle/expression.hpp"
#include "rfmle/regressors.hpp"

using namespace rfmle;

TEST_CASE("example basis values and partials") {
  const RegressorSet g = polynomial_example_basis();
  REQUIRE(g.size() == 3);
  const RegressorJets j = g.jets(2.0, 3.0);
  CHECK(j.value == Eigen::Vector3d(13, 5, 6));
  CHECK(j.d1 == Eigen::Vector3d(4, 1, 3));
  CHECK(j.d2 == Eigen::Vector3d(6, 1, 2));
  CHECK(j.d12 == Eigen::Vector3d(0, 0, 1));
  const Jet c = g.combine(Eigen::Vector3d(5, 8, 3), 2.0, 3.0);
  CHECK(c.value == 5 * 13 + 8 * 5 + 3 * 6);
  CHECK(c.d12 == 3.0);
}

TEST_CASE("expressions reproduce the closed-form basis") {
  const RegressorSet a = polynomial_example_basis();
  const RegressorSet b = regressors_from_expressions({"s^2+t^2", "s+t", "s*t"});
  for (double s : {0.5, 4.0})
    for (double t : {1.5, 7.0}) {
      const RegressorJets x = a.jets(s, t), y = b.jets(s, t);
      CHECK((x.value - y.value).norm() == 0.0);
      CHECK((x.d1 - y.d1).norm() == 0.0);
      CHECK((x.d2 - y.d2).norm() == 0.0);
      CHECK((x.d12 - y.d12).norm() == 0.0);
    }
}

TEST_CASE("expression grammar") {
  CHECK(expr::parse("2^3^2")(0, 0) == 512.0);
  CHECK(expr::parse("-s^2")(3, 0) == -9.0);
  CHECK(expr::parse("exp(log(s))*sqrt(t)/2")(3, 4) == doctest::Approx(3.0));
  CHECK(expr::parse("sin(s)^2 + cos(s)^2")(0.7, 0) == doctest::Approx(1.0));
  CHECK(expr::parse("1.5e1 - (s - t)")(1, 2) == 16.0);
  for (const char* bad : {"s +", "foo(s)", "(s", "s t", "", "x"}) {
    CAPTURE(bad);
    try {
      expr::parse(bad);
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::parse_error);
    }
  }
}

TEST_CASE("symbolic partials against central differences") {
  const Regressor r = expression_regressor("exp(s/3)*sin(t) + s^3*t^2 + log(s*t)");
  const auto f = [&](double s, double t) { return r(s, t); };
  const double s = 1.3, t = 0.8, h = 1e-5;
  const Jet j = r.jet(s, t);
  CHECK(j.d1 == doctest::Approx((f(s + h, t) - f(s - h, t)) / (2 * h)).epsilon(1e-8));
  CHECK(j.d2 == doctest::Approx((f(s, t + h) - f(s, t - h)) / (2 * h)).epsilon(1e-8));
  CHECK(j.d12 == doctest::Approx((f(s + h, t + h) - f(s + h, t - h) - f(s - h, t + h) +
                                  f(s - h, t - h)) / (4 * h * h)).epsilon(1e-5));
}

TEST_CASE("finite-difference regressor") {
  const Regressor r = finite_difference_regressor([](double s, double t) { return s * s * t; });
  const Jet j = r.jet(2.0, 3.0);
  CHECK(j.value == 12.0);
  CHECK(j.d1 == doctest::Approx(12.0).epsilon(1e-8));
  CHECK(j.d2 == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(j.d12 == doctest::Approx(4.0).epsilon(1e-5));
}

TEST_CASE("transformed regressors") {
  const RegressorSet h = polynomial_example_basis();
  const double alpha = 0.5, beta = 2.0, sigma = 1.5;
  for (TransformMode mode : {TransformMode::stationary, TransformMode::zero_start}) {
    const double shift = mode == TransformMode::zero_start ? 1.0 : 0.0;
    const RegressorSet g = transform_regressors(h, alpha, beta, sigma, mode);
    const double u = 4.0, v = 9.0;
    const double s = std::log(u + shift) / (2 * alpha), t = std::log(v + shift) / (2 * beta);
    const double scale = 2 * std::sqrt(alpha * beta * (u + shift) * (v + shift)) / sigma;
    const RegressorJets gj = g.jets(u, v), hj = h.jets(s, t);
    CHECK(gj.value[2] == doctest::Approx(scale * hj.value[2]));

    const auto f = [&](double x, double y) { return g[0](x, y); };
    const double e = 1e-5;
    CHECK(gj.d1[0] == doctest::Approx((f(u + e, v) - f(u - e, v)) / (2 * e)).epsilon(1e-7));
    CHECK(gj.d2[0] == doctest::Approx((f(u, v + e) - f(u, v - e)) / (2 * e)).epsilon(1e-7));
    CHECK(gj.d12[0] == doctest::Approx((f(u + e, v + e) - f(u + e, v - e) - f(u - e, v + e) +
                                        f(u - e, v - e)) / (4 * e * e)).epsilon(1e-4));
  }
  const RegressorSet g = transform_regressors(h, 1, 1, 1, TransformMode::zero_start);
  try {
    g.jets(-1.0, 2.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::non_positive_coordinate);
  }
}
