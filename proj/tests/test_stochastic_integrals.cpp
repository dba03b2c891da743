#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "rfmle/error.hpp"
#include "rfmle/stochastic_integrals.hpp"

using namespace rfmle;
constexpr double kPi = std::numbers::pi;

namespace {

const LineWeight kOne = [](double, double) { return 1.0; };

StochIntConfig fd(double h) {
  StochIntConfig cfg;
  cfg.method = StochIntConfig::Method::finite_difference;
  cfg.fd_step = h;
  return cfg;
}

std::shared_ptr<const KLSheet> wiener_sheet(std::uint64_t seed, int n = 25) {
  return std::make_shared<const KLSheet>(FieldModel::wiener(),
                                         std::make_shared<const KLSample>(draw_kl(n, 8, 8, seed)));
}

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

}  // namespace

TEST_CASE("trivial line integrals") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const FunctionField zs([](double s, double) { return Jet{s, 1, 0, 0}; });
  const FunctionField zt([](double, double t) { return Jet{t, 0, 1, 0}; });
  const FunctionField zc([](double, double) { return Jet{7, 0, 0, 0}; });
  for (const StochIntConfig& cfg : {StochIntConfig{}, fd(1e-5)}) {
    CHECK(line_ds(zs, kOne, d.gamma12(), 4.0, 6.0, cfg) == doctest::Approx(2.0));
    CHECK(line_ds(zc, kOne, d.gamma1(), 6.0, 8.0, cfg) == doctest::Approx(0.0));
    CHECK(line_dt(zt, kOne, d.gamma2(), 6.5, 7.5, cfg) == doctest::Approx(1.0));
    CHECK(line_dt(zs, kOne, d.gamma2(), 6.5, 7.5, cfg) == doctest::Approx(0.0));
  }
}

TEST_CASE("trivial area integrals") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const FunctionField zst([](double s, double t) { return Jet{s * t, t, s, 1}; });
  const FunctionField zc([](double, double) { return Jet{3, 0, 0, 0}; });
  const AreaWeight one = [](double, double) { return 1.0; };
  CHECK(area_d1d2(zst, one, d, {}) == doctest::Approx(4 * kPi).epsilon(1e-9));
  CHECK(area_d1d2(zst, one, d, fd(1e-4)) == doctest::Approx(4 * kPi).epsilon(1e-6));
  CHECK(area_d1d2(zst, one, d, fd(1e-5)) == doctest::Approx(4 * kPi).epsilon(1e-4));
  CHECK(area_d1(zc, one, d, {}) == 0.0);
  CHECK(area_d2(zc, one, d, {}) == 0.0);
  CHECK(area_d1d2(zc, one, d, {}) == 0.0);
  CHECK(area_plain(zc, one, d, {}) == doctest::Approx(12 * kPi).epsilon(1e-9));

  // Z = s^2 + t^2 has no mixed partial.
  const RegressorSet g = polynomial_example_basis();
  const FunctionField z1([&](double s, double t) { return g[0].jet(s, t); });
  const AreaWeight w = [&](double s, double t) { return g[2].jet(s, t).d12; };
  CHECK(area_d1d2(z1, w, d, {}) == 0.0);
}

TEST_CASE("deterministic fields reduce to Riemann integrals") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const FunctionField z([](double s, double t) {
    return Jet{std::sin(s) * t * t, std::cos(s) * t * t, 2 * std::sin(s) * t, 2 * std::cos(s) * t};
  });
  const AreaWeight y = [](double s, double t) { return s + t; };
  const auto classical = [&](auto part) {
    return integrate_over_G([&](double s, double t) { return y(s, t) * part(z.jet(s, t)); }, d).value;
  };
  CHECK(area_d1(z, y, d, {}) == doctest::Approx(classical([](Jet j) { return j.d1; })).epsilon(1e-8));
  CHECK(area_d2(z, y, d, {}) == doctest::Approx(classical([](Jet j) { return j.d2; })).epsilon(1e-8));
  CHECK(area_d1d2(z, y, d, {}) == doctest::Approx(classical([](Jet j) { return j.d12; })).epsilon(1e-8));
  CHECK(area_plain(z, y, d, {}) == doctest::Approx(classical([](Jet j) { return j.value; })).epsilon(1e-8));

  const Curve& g = d.gamma1();
  const double line = integrate_1d([&](double s) { return s * z.jet(s, g(s)).d1; }, 6.0, 8.0).value;
  CHECK(line_ds(z, [](double s, double) { return s; }, g, 6.0, 8.0, {}) ==
        doctest::Approx(line).epsilon(1e-8));
}

TEST_CASE("finite-difference tolerance is raised to the rounding floor") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const FunctionField zst([](double s, double t) { return Jet{s * t, t, s, 1}; });
  const AreaWeight one = [](double, double) { return 1.0; };
  // Tolerances far below the quotient noise would otherwise never be met.
  StochIntConfig cfg = fd(1e-5);
  cfg.quad.abs_tol = 1e-14;
  cfg.quad.rel_tol = 1e-14;
  CHECK(area_d1d2(zst, one, d, cfg) == doctest::Approx(4 * kPi).epsilon(1e-4));
}

TEST_CASE("integrals are linear in the field") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  auto z1 = wiener_sheet(1, 10), z2 = wiener_sheet(2, 10);
  const double c1 = 1.7, c2 = -0.4;
  const FunctionField mix([&](double s, double t) { return c1 * z1->jet(s, t) + c2 * z2->jet(s, t); });
  const AreaWeight y = [](double s, double t) { return s * t; };
  const StochIntConfig cfg;
  const Probe p1(*z1, cfg), p2(*z2, cfg), pm(mix, cfg);

  // On fixed nodes: one vector integral carries Z1, Z2 and the mixture, so
  // every component sees the same quadrature points.
  const auto on_nodes = [&](auto pick) {
    return [&, pick](double s, double t, const Jet& j) {
      return Eigen::Vector3d(y(s, t) * pick(j), y(s, t) * pick(p2.at(s, t)), y(s, t) * pick(pm.at(s, t)));
    };
  };
  const auto linear = [&](const Eigen::Vector3d& v) {
    CHECK(std::abs(v[2] - (c1 * v[0] + c2 * v[1])) <= 1e-10 * std::max(1.0, std::abs(v[2])));
  };
  linear(line_s(p1, on_nodes([](const Jet& j) { return j.d1; }), d.gamma12(), 4.0, 6.0, cfg.quad).value);
  linear(line_t(p1, on_nodes([](const Jet& j) { return j.d2; }), d.gamma0(), 6.0, 8.0, cfg.quad).value);
  linear(area(p1, on_nodes([](const Jet& j) { return j.d12; }), d, cfg.quad).value);
  linear(area(p1, on_nodes([](const Jet& j) { return j.d1; }), d, cfg.quad).value);

  // Adaptive nodes depend on the integrand, so the scalar operators agree to
  // the quadrature tolerance.
  const auto check = [&](auto op) {
    const double lhs = op(mix);
    const double rhs = c1 * op(*z1) + c2 * op(*z2);
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1.0, std::abs(rhs)));
  };
  check([&](const Field& z) { return line_ds(z, y, d.gamma12(), 4.0, 6.0, cfg); });
  check([&](const Field& z) { return line_dt(z, y, d.gamma0(), 6.0, 8.0, cfg); });
  check([&](const Field& z) { return area_d1d2(z, y, d, cfg); });
  check([&](const Field& z) { return area_d1(z, y, d, cfg); });
}

TEST_CASE("finite differences converge to the analytic integrals") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const LineWeight y = [](double s, double t) { return s + 0.5 * t; };
  for (std::uint64_t seed : {11u, 12u}) {
    auto z = wiener_sheet(seed);
    const double ref_s = line_ds(*z, y, d.gamma12(), 4.0, 6.0, {});
    const double ref_t = line_dt(*z, y, d.gamma2(), 6.0, 8.0, {});
    const double ref_a = area_d1d2(*z, y, d, {});
    // Forward differences are first order: each decade of h gains one of
    // accuracy on the line integrals.
    const double s3 = rel(line_ds(*z, y, d.gamma12(), 4.0, 6.0, fd(1e-3)), ref_s);
    const double s4 = rel(line_ds(*z, y, d.gamma12(), 4.0, 6.0, fd(1e-4)), ref_s);
    const double t3 = rel(line_dt(*z, y, d.gamma2(), 6.0, 8.0, fd(1e-3)), ref_t);
    const double t4 = rel(line_dt(*z, y, d.gamma2(), 6.0, 8.0, fd(1e-4)), ref_t);
    CHECK(s3 / s4 == doctest::Approx(10.0).epsilon(0.1));
    CHECK(t3 / t4 == doctest::Approx(10.0).epsilon(0.1));
    CHECK(s4 <= 1e-3);
    CHECK(t4 <= 1e-3);
    // The mixed quotient converges down to h = 1e-4; at 1e-5 its rounding
    // noise eps |Z| / h^2 is as large as the truncation error.
    const double e3 = rel(area_d1d2(*z, y, d, fd(1e-3)), ref_a);
    const double e4 = rel(area_d1d2(*z, y, d, fd(1e-4)), ref_a);
    const double e5 = rel(area_d1d2(*z, y, d, fd(1e-5)), ref_a);
    CHECK(e4 < e3);
    CHECK(e4 <= 1e-3);
    CHECK(e5 <= 1e-4);
  }
}

TEST_CASE("forward steps turn back at the rectangle edge") {
  auto z = wiener_sheet(3, 8);
  const Probe probe(*z, fd(1e-4));
  CHECK_NOTHROW(probe.at(8.0, 8.0));
  CHECK(std::abs(probe.at(8.0, 4.0).d1 - z->jet(8.0, 4.0).d1) < 1e-2);
}

TEST_CASE("configuration checks") {
  StochIntConfig cfg = fd(0.0);
  CHECK_THROWS_AS(cfg.check(), Error);
}
