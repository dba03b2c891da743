#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "rfmle/error.hpp"
#include "rfmle/estimation.hpp"

using namespace rfmle;
constexpr double kPi = std::numbers::pi;

namespace {

void check_symmetric_entries(const Matrix& A, const double (&upper)[6], double tol) {
  const int idx[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  for (int e = 0; e < 6; ++e) {
    const int i = idx[e][0], j = idx[e][1];
    CAPTURE(i);
    CAPTURE(j);
    CHECK(std::abs(A(i, j) - upper[e]) <= tol);
    CHECK(A(i, j) == A(j, i));
  }
}

double rel_norm(const Vector& x, const Vector& ref) { return (x - ref).norm() / ref.norm(); }

const RegressorSet kBasis = polynomial_example_basis();

}  // namespace

TEST_CASE("Wiener Fisher matrix on circle(6,6,2)") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const auto A = fisher_wiener(d, kBasis);
  CHECK_FALSE(A.diagnostics.max_depth_exceeded);
  // A33 = 60 + pi, of which 4 pi is the area term of d1 d2 (s t) = 1.
  const double expected[6] = {339.0895, 38.6688, 128.0, 5.9115, 16.0, 60.0 + kPi};
  check_symmetric_entries(A.value, expected, 5e-4);
}

TEST_CASE("stationary OU Fisher matrix on circle(2,2,1)") {
  const ValidatedDomain d = validate(circle_domain(2, 2, 1));
  const auto A = fisher_stationary_ou(d, kBasis, 1.0, 1.0);
  const double expected[6] = {1797.8554, 682.2301, 809.6460, 274.1195, 305.9734, 382.9247};
  check_symmetric_entries(A.value, expected, 5e-3);
}

TEST_CASE("zero-start OU Fisher matrix on circle(2,2,1)") {
  const ValidatedDomain d = validate(circle_domain(2, 2, 1));
  const auto A = fisher_zero_start_ou(d, kBasis, 1.0, 1.0);
  const double expected[6] = {1892.7035, 725.4822, 843.2301, 295.8952, 321.8680, 395.0477};
  check_symmetric_entries(A.value, expected, 5e-3);
}

TEST_CASE("p = 1 constant regressor, Wiener") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const RegressorSet one({expression_regressor("1")});
  const auto A = fisher_wiener(d, one);
  REQUIRE(A.value.rows() == 1);
  // Corner term plus the lower-left arc term (g - s d1 g)^2 / (s^2 gamma12).
  const Curve& g12 = d.gamma12();
  const double arc = integrate_1d([&](double s) { return 1.0 / (s * s * g12(s)); }, d.a(), d.b1(),
                                  QuadConfig{1e-12, 1e-11, 40, 8}).value;
  CHECK(A.value(0, 0) == doctest::Approx(1.0 / (d.b1() * g12(d.b1())) + arc).epsilon(1e-8));
}

TEST_CASE("transform route reproduces the OU Fisher matrices") {
  const ValidatedDomain d = validate(circle_domain(2, 2, 1));
  for (const FieldModel& m :
       {FieldModel::stationary_ou(0.8, 1.2, 1.5), FieldModel::zero_start_ou(0.8, 1.2, 1.5)}) {
    CAPTURE(to_string(m.kind));
    const Matrix direct = fisher(m, d, kBasis).value;
    const Matrix via = fisher_via_transform(m, d, kBasis).value;
    CHECK((direct - via).norm() <= 1e-6 * direct.norm());
  }
}

TEST_CASE("zero-start approaches stationary for fast decay") {
  const ValidatedDomain d = validate(circle_domain(2, 2, 1));
  const Matrix stat = fisher_stationary_ou(d, kBasis, 6.0, 6.0).value;
  const Matrix zero = fisher_zero_start_ou(d, kBasis, 6.0, 6.0).value;
  CHECK((stat - zero).norm() <= 1e-4 * stat.norm());
}

TEST_CASE("score of the drift equals A m") {
  const Vector m = Eigen::Vector3d(5, 8, 3);
  auto g = std::make_shared<const RegressorSet>(kBasis);
  const FieldSample drift(g, m, nullptr);
  struct Case {
    FieldModel model;
    DomainSpec domain;
  };
  for (const Case& c : {Case{FieldModel::wiener(), circle_domain(6, 6, 2)},
                        Case{FieldModel::stationary_ou(1, 1, 1), circle_domain(2, 2, 1)},
                        Case{FieldModel::zero_start_ou(1, 1, 1), circle_domain(2, 2, 1)}}) {
    CAPTURE(to_string(c.model.kind));
    const ValidatedDomain d = validate(c.domain);
    const EstimationResult r = estimate(c.model, drift, d, kBasis);
    CHECK(rel_norm(r.zeta, r.A * m) <= 1e-8);
    CHECK(rel_norm(r.m_hat, m) <= 1e-8);
  }
}

TEST_CASE("mle algebra") {
  Matrix A(2, 2);
  A << 4, 1, 1, 3;
  const Vector m = Eigen::Vector2d(0.5, -2.0);
  const EstimationResult w = mle(A, A * m, FieldModel::wiener());
  CHECK(rel_norm(w.m_hat, m) <= 1e-14);
  CHECK((w.covariance - A.inverse()).norm() <= 1e-14);

  const EstimationResult o = mle(A, A * m, FieldModel::stationary_ou(2.0, 0.5, 3.0));
  CHECK((o.covariance - 9.0 * A.inverse()).norm() <= 1e-13);
  CHECK((o.a_inverse - A.inverse()).norm() <= 1e-14);

  // The exponent is maximal at m_hat.
  for (const Vector& step : {Vector(Eigen::Vector2d(1e-3, 0)), Vector(Eigen::Vector2d(-2e-3, 5e-4))})
    CHECK(w.log_rn(w.m_hat + step) < w.log_rn(w.m_hat));
}

TEST_CASE("singular Fisher matrices are rejected") {
  Matrix A(2, 2);
  A << 1, 1, 1, 1;
  try {
    mle(A, Eigen::Vector2d(1, 1), FieldModel::wiener());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::singular_matrix);
  }
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  const RegressorSet dup = regressors_from_expressions({"s*t", "s*t"});
  const Matrix F = fisher_wiener(d, dup).value;
  CHECK(condition_number(F) > 1e10);
  CHECK_THROWS_AS(mle(F, Eigen::Vector2d(1, 1), FieldModel::wiener()), Error);
}

TEST_CASE("noisy estimate is consistent with its covariance") {
  const ValidatedDomain d = validate(circle_domain(6, 6, 2));
  auto g = std::make_shared<const RegressorSet>(kBasis);
  const Vector m = Eigen::Vector3d(5, 8, 3);
  auto kl = std::make_shared<const KLSample>(draw_kl(25, 8, 8, 2024));
  const FieldSample z(g, m, std::make_shared<const KLSheet>(FieldModel::wiener(), kl));
  StochIntConfig cfg;
  cfg.quad.rel_tol = 1e-5;
  cfg.quad.abs_tol = 1e-6;
  const EstimationResult r = estimate(FieldModel::wiener(), z, d, kBasis, cfg);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(r.m_hat[k] - m[k]) <= 5 * std::sqrt(r.covariance(k, k)));
}

TEST_CASE("model checks") {
  const ValidatedDomain d = validate(circle_domain(2, 2, 1));
  CHECK_THROWS_AS(fisher_stationary_ou(d, kBasis, -1.0, 1.0), Error);
  CHECK_THROWS_AS(fisher_via_transform(FieldModel::wiener(), d, kBasis), Error);
}
