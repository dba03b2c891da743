#include "rfmle/estimation.hpp"

#include <cmath>
#include <limits>

#include "rfmle/error.hpp"

namespace rfmle {

namespace {

double coth(double x) { return 1.0 / std::tanh(x); }

// Running sum of quadrature results.
template <class T>
struct Sum {
  T value;
  QuadDiagnostics diagnostics;

  void operator+=(const QuadResult<T>& r) {
    value += r.value;
    diagnostics += r.diagnostics;
  }
  void operator+=(const T& v) { value += v; }
  QuadResult<T> result() && { return {std::move(value), diagnostics}; }
};

Matrix outer(const Vector& x) { return x * x.transpose(); }

// int_lo^hi term(s, gamma(s), jets) ds
template <class Term>
QuadResult<Matrix> fisher_s_line(const RegressorSet& h, const Curve& gamma, double lo, double hi,
                                 const Term& term, const QuadConfig& quad) {
  return integrate_1d(
      [&](double s) -> Matrix {
        const double t = gamma(s);
        return term(s, t, h.jets(s, t));
      },
      lo, hi, quad);
}

// int_lo^hi term(gamma^-1(t), t, jets) dt
template <class Term>
QuadResult<Matrix> fisher_t_line(const RegressorSet& h, const Curve& gamma, double lo, double hi,
                                 const Term& term, const QuadConfig& quad) {
  return integrate_1d(
      [&](double t) -> Matrix {
        const double s = gamma.inverse(t);
        return term(s, t, h.jets(s, t));
      },
      lo, hi, quad);
}

// The area term shared by both OU models.
QuadResult<Matrix> ou_area(const ValidatedDomain& d, const RegressorSet& h, double al, double be,
                           const QuadConfig& quad) {
  return integrate_over_G(
      [&](double s, double t) -> Matrix {
        const RegressorJets j = h.jets(s, t);
        return al * be * outer(j.value) + be / al * outer(j.d1) + al / be * outer(j.d2) +
               outer(j.d12) / (al * be);
      },
      d, quad);
}

void require_positive_rates(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw Error(Errc::invalid_argument, "Ornstein-Uhlenbeck formulas require alpha > 0 and beta > 0");
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

QuadResult<Matrix> fisher_wiener(const ValidatedDomain& d, const RegressorSet& g,
                                 const QuadConfig& quad) {
  const int p = g.size();
  Sum<Matrix> A{Matrix::Zero(p, p), {}};

  const double t_b1 = d.gamma12()(d.b1());
  A += Matrix(outer(g.jets(d.b1(), t_b1).value) / (d.b1() * t_b1));

  A += fisher_s_line(
      g, d.gamma12(), d.a(), d.b1(),
      [](double s, double t, const RegressorJets& j) {
        return Matrix(outer(j.value - s * j.d1) / (s * s * t));
      },
      quad);
  A += fisher_s_line(
      g, d.gamma1(), d.b1(), d.c(),
      [](double, double t, const RegressorJets& j) { return Matrix(outer(j.d1) / t); }, quad);

  auto t_term = [](double s, double, const RegressorJets& j) { return Matrix(outer(j.d2) / s); };
  A += fisher_t_line(g, d.gamma2(), d.gamma2()(d.a()), d.gamma2()(d.b2()), t_term, quad);
  A += fisher_t_line(g, d.gamma12(), t_b1, d.gamma12()(d.a()), t_term, quad);

  A += integrate_over_G([&](double s, double t) -> Matrix { return outer(g.jets(s, t).d12); }, d,
                        quad);
  A.value = symmetrized(A.value);
  return std::move(A).result();
}

QuadResult<Matrix> fisher_stationary_ou(const ValidatedDomain& d, const RegressorSet& h,
                                        double al, double be, const QuadConfig& quad) {
  require_positive_rates(al, be);
  const int p = h.size();
  Sum<Matrix> A{Matrix::Zero(p, p), {}};

  A += Matrix(outer(h.jets(d.a(), d.gamma2()(d.a())).value));
  A += Matrix(outer(h.jets(d.c(), d.gamma1()(d.c())).value));
  A += Matrix(outer(h.jets(d.b1(), d.gamma12()(d.b1())).value));
  A += Matrix(outer(h.jets(d.b2(), d.gamma2()(d.b2())).value));

  auto s_even = [al](double, double, const RegressorJets& j) {
    return Matrix(al * outer(j.value) + outer(j.d1) / al);
  };
  A += fisher_s_line(h, d.gamma12(), d.a(), d.b1(), s_even, quad);
  A += fisher_s_line(
      h, d.gamma1(), d.b1(), d.c(),
      [al](double, double, const RegressorJets& j) {
        return Matrix(outer(al * j.value + j.d1) / al);
      },
      quad);
  A += fisher_s_line(
      h, d.gamma2(), d.a(), d.b2(),
      [al](double, double, const RegressorJets& j) {
        return Matrix(outer(al * j.value - j.d1) / al);
      },
      quad);
  A += fisher_s_line(h, d.gamma0(), d.b2(), d.c(), s_even, quad);

  auto t_even = [be](double, double, const RegressorJets& j) {
    return Matrix(be * outer(j.value) + outer(j.d2) / be);
  };
  A += fisher_t_line(
      h, d.gamma12(), d.gamma12()(d.b1()), d.gamma12()(d.a()),
      [be](double, double, const RegressorJets& j) {
        return Matrix(outer(be * j.value - j.d2) / be);
      },
      quad);
  A += fisher_t_line(h, d.gamma1(), d.gamma12()(d.b1()), d.gamma1()(d.c()), t_even, quad);
  A += fisher_t_line(h, d.gamma2(), d.gamma2()(d.a()), d.gamma2()(d.b2()), t_even, quad);
  A += fisher_t_line(
      h, d.gamma0(), d.gamma0()(d.c()), d.gamma2()(d.b2()),
      [be](double, double, const RegressorJets& j) {
        return Matrix(outer(be * j.value + j.d2) / be);
      },
      quad);

  A += ou_area(d, h, al, be, quad);
  A.value = symmetrized(A.value);
  return std::move(A).result();
}

QuadResult<Matrix> fisher_zero_start_ou(const ValidatedDomain& d, const RegressorSet& h,
                                        double al, double be, const QuadConfig& quad) {
  require_positive_rates(al, be);
  const int p = h.size();
  Sum<Matrix> A{Matrix::Zero(p, p), {}};

  const double t_a = d.gamma2()(d.a());
  const double t_b1 = d.gamma12()(d.b1());
  const double t_b2 = d.gamma2()(d.b2());
  A += Matrix(coth(al * d.a()) * coth(be * t_a) * outer(h.jets(d.a(), t_a).value));
  A += Matrix(outer(h.jets(d.c(), d.gamma1()(d.c())).value));
  A += Matrix(coth(be * t_b1) * outer(h.jets(d.b1(), t_b1).value));
  A += Matrix(coth(al * d.b2()) * outer(h.jets(d.b2(), t_b2).value));

  A += fisher_s_line(
      h, d.gamma12(), d.a(), d.b1(),
      [al, be](double, double t, const RegressorJets& j) {
        return Matrix(coth(be * t) * (al * outer(j.value) + outer(j.d1) / al));
      },
      quad);
  A += fisher_s_line(
      h, d.gamma1(), d.b1(), d.c(),
      [al, be](double, double t, const RegressorJets& j) {
        return Matrix(coth(be * t) * outer(al * j.value + j.d1) / al);
      },
      quad);
  A += fisher_s_line(
      h, d.gamma2(), d.a(), d.b2(),
      [al](double s, double, const RegressorJets& j) {
        return Matrix(outer(al * coth(al * s) * j.value - j.d1) / al);
      },
      quad);
  A += fisher_s_line(
      h, d.gamma0(), d.b2(), d.c(),
      [al](double, double, const RegressorJets& j) {
        return Matrix(al * outer(j.value) + outer(j.d1) / al);
      },
      quad);

  A += fisher_t_line(
      h, d.gamma12(), t_b1, d.gamma12()(d.a()),
      [al, be](double s, double t, const RegressorJets& j) {
        return Matrix(coth(al * s) * outer(be * coth(be * t) * j.value - j.d2) / be);
      },
      quad);
  A += fisher_t_line(
      h, d.gamma1(), t_b1, d.gamma1()(d.c()),
      [be](double, double, const RegressorJets& j) {
        return Matrix(be * outer(j.value) + outer(j.d2) / be);
      },
      quad);
  A += fisher_t_line(
      h, d.gamma2(), t_a, t_b2,
      [al, be](double s, double, const RegressorJets& j) {
        return Matrix(coth(al * s) * (be * outer(j.value) + outer(j.d2) / be));
      },
      quad);
  A += fisher_t_line(
      h, d.gamma0(), d.gamma0()(d.c()), t_b2,
      [be](double, double, const RegressorJets& j) {
        return Matrix(outer(be * j.value + j.d2) / be);
      },
      quad);

  A += ou_area(d, h, al, be, quad);
  A.value = symmetrized(A.value);
  return std::move(A).result();
}

// ---------------------------------------------------------------------------
// Scores

QuadResult<Vector> score_wiener(const Field& z, const ValidatedDomain& d, const RegressorSet& g,
                                const StochIntConfig& cfg) {
  const Probe probe(z, cfg);
  const QuadConfig& quad = cfg.quad;
  Sum<Vector> zeta{Vector::Zero(g.size()), {}};

  const double t_b1 = d.gamma12()(d.b1());
  zeta += Vector(g.jets(d.b1(), t_b1).value * (probe.at(d.b1(), t_b1).value / (d.b1() * t_b1)));

  zeta += line_s(
      probe,
      [&](double s, double t, const Jet& zj) -> Vector { return g.jets(s, t).d1 * (zj.d1 / t); },
      d.gamma1(), d.b1(), d.c(), quad);
  zeta += line_s(
      probe,
      [&](double s, double t, const Jet& zj) -> Vector {
        const RegressorJets j = g.jets(s, t);
        return (j.value - s * j.d1) * ((zj.value - s * zj.d1) / (s * s * t));
      },
      d.gamma12(), d.a(), d.b1(), quad);

  auto t_term = [&](double s, double t, const Jet& zj) -> Vector {
    return g.jets(s, t).d2 * (zj.d2 / s);
  };
  zeta += line_t(probe, t_term, d.gamma2(), d.gamma2()(d.a()), d.gamma2()(d.b2()), quad);
  zeta += line_t(probe, t_term, d.gamma12(), t_b1, d.gamma12()(d.a()), quad);

  zeta += area(
      probe, [&](double s, double t, const Jet& zj) -> Vector { return g.jets(s, t).d12 * zj.d12; },
      d, quad);
  return std::move(zeta).result();
}

namespace {

// The area term of both OU scores.
QuadResult<Vector> ou_score_area(const Probe& probe, const ValidatedDomain& d,
                                 const RegressorSet& h, double al, double be,
                                 const QuadConfig& quad) {
  return area(
      probe,
      [&](double s, double t, const Jet& zj) -> Vector {
        const RegressorJets j = h.jets(s, t);
        const double w = zj.value + zj.d1 / al + zj.d2 / be + zj.d12 / (al * be);
        return (al * be * j.value + be * j.d1 + al * j.d2 + j.d12) * w;
      },
      d, quad);
}

}  // namespace

QuadResult<Vector> score_stationary_ou(const Field& z, const ValidatedDomain& d,
                                       const RegressorSet& h, double al, double be,
                                       const StochIntConfig& cfg) {
  require_positive_rates(al, be);
  const Probe probe(z, cfg);
  const QuadConfig& quad = cfg.quad;
  Sum<Vector> zeta{Vector::Zero(h.size()), {}};

  const double t_b1 = d.gamma12()(d.b1());
  zeta += Vector(4.0 * h.jets(d.b1(), t_b1).value * probe.at(d.b1(), t_b1).value);

  zeta += line_s(
      probe,
      [&](double s, double t, const Jet& zj) -> Vector {
        const RegressorJets j = h.jets(s, t);
        return 2.0 * (al * j.value + j.d1) * (zj.value + zj.d1 / al);
      },
      d.gamma1(), d.b1(), d.c(), quad);
  zeta += line_s(
      probe,
      [&](double s, double t, const Jet& zj) -> Vector {
        const RegressorJets j = h.jets(s, t);
        return 2.0 * (al * j.value - j.d1) * (zj.value - zj.d1 / al);
      },
      d.gamma12(), d.a(), d.b1(), quad);

  auto t_term = [&](double s, double t, const Jet& zj) -> Vector {
    const RegressorJets j = h.jets(s, t);
    return 2.0 * (be * j.value + j.d2) * (zj.value + zj.d2 / be);
  };
  zeta += line_t(probe, t_term, d.gamma2(), d.gamma2()(d.a()), d.gamma2()(d.b2()), quad);
  zeta += line_t(probe, t_term, d.gamma12(), t_b1, d.gamma12()(d.a()), quad);

  zeta += ou_score_area(probe, d, h, al, be, quad);
  return std::move(zeta).result();
}

QuadResult<Vector> score_zero_start_ou(const Field& z, const ValidatedDomain& d,
                                       const RegressorSet& h, double al, double be,
                                       const StochIntConfig& cfg) {
  require_positive_rates(al, be);
  const Probe probe(z, cfg);
  const QuadConfig& quad = cfg.quad;
  Sum<Vector> zeta{Vector::Zero(h.size()), {}};

  const double t_b1 = d.gamma12()(d.b1());
  zeta += Vector((1.0 + coth(al * d.b1())) * (1.0 + coth(be * t_b1)) *
                 h.jets(d.b1(), t_b1).value * probe.at(d.b1(), t_b1).value);

  zeta += line_s(
      probe,
      [&](double s, double t, const Jet& zj) -> Vector {
        const RegressorJets j = h.jets(s, t);
        return (1.0 + coth(be * t)) * (al * j.value + j.d1) * (zj.value + zj.d1 / al);
      },
      d.gamma1(), d.b1(), d.c(), quad);
  zeta += line_s(
      probe,
      [&](double s, double t, const Jet& zj) -> Vector {
        const RegressorJets j = h.jets(s, t);
        const double ca = coth(al * s);
        return (1.0 + coth(be * t)) * (al * ca * j.value - j.d1) * (ca * zj.value - zj.d1 / al);
      },
      d.gamma12(), d.a(), d.b1(), quad);

  auto t_term = [&](double s, double t, const Jet& zj) -> Vector {
    const RegressorJets j = h.jets(s, t);
    return (1.0 + coth(al * s)) * (be * j.value + j.d2) * (zj.value + zj.d2 / be);
  };
  zeta += line_t(probe, t_term, d.gamma2(), d.gamma2()(d.a()), d.gamma2()(d.b2()), quad);
  zeta += line_t(probe, t_term, d.gamma12(), t_b1, d.gamma12()(d.a()), quad);

  zeta += ou_score_area(probe, d, h, al, be, quad);
  return std::move(zeta).result();
}

// ---------------------------------------------------------------------------

QuadResult<Matrix> fisher(const FieldModel& model, const ValidatedDomain& domain,
                          const RegressorSet& regressors, const QuadConfig& quad) {
  model.check();
  switch (model.kind) {
    case FieldModel::Kind::wiener: return fisher_wiener(domain, regressors, quad);
    case FieldModel::Kind::stationary_ou:
      return fisher_stationary_ou(domain, regressors, model.alpha, model.beta, quad);
    case FieldModel::Kind::zero_start_ou:
      return fisher_zero_start_ou(domain, regressors, model.alpha, model.beta, quad);
  }
  throw Error(Errc::wrong_model_variant, "unknown model");
}

QuadResult<Vector> score(const FieldModel& model, const Field& z, const ValidatedDomain& domain,
                         const RegressorSet& regressors, const StochIntConfig& cfg) {
  model.check();
  switch (model.kind) {
    case FieldModel::Kind::wiener: return score_wiener(z, domain, regressors, cfg);
    case FieldModel::Kind::stationary_ou:
      return score_stationary_ou(z, domain, regressors, model.alpha, model.beta, cfg);
    case FieldModel::Kind::zero_start_ou:
      return score_zero_start_ou(z, domain, regressors, model.alpha, model.beta, cfg);
  }
  throw Error(Errc::wrong_model_variant, "unknown model");
}

namespace {

TransformMode transform_mode(const FieldModel& model) {
  if (!model.is_ou())
    throw Error(Errc::wrong_model_variant, "the transform route applies to the OU models only");
  model.check();
  return model.kind == FieldModel::Kind::zero_start_ou ? TransformMode::zero_start
                                                       : TransformMode::stationary;
}

}  // namespace

QuadResult<Matrix> fisher_via_transform(const FieldModel& model, const ValidatedDomain& domain,
                                        const RegressorSet& h, const QuadConfig& quad) {
  const TransformMode mode = transform_mode(model);
  const ValidatedDomain image =
      validate(transform_domain(domain, model.alpha, model.beta, mode));
  const RegressorSet g = transform_regressors(h, model.alpha, model.beta, model.sigma, mode);
  auto r = fisher_wiener(image, g, quad);
  r.value *= model.sigma * model.sigma / (model.alpha * model.beta);
  return r;
}

QuadResult<Vector> score_via_transform(const FieldModel& model, const Field& z,
                                       const ValidatedDomain& domain, const RegressorSet& h,
                                       const StochIntConfig& cfg) {
  const TransformMode mode = transform_mode(model);
  const ValidatedDomain image =
      validate(transform_domain(domain, model.alpha, model.beta, mode));
  const RegressorSet g = transform_regressors(h, model.alpha, model.beta, model.sigma, mode);
  const TransformedField y(z, model.alpha, model.beta, model.sigma, mode);
  auto r = score_wiener(y, image, g, cfg);
  r.value *= model.sigma * model.sigma / (model.alpha * model.beta);
  return r;
}

// ---------------------------------------------------------------------------

double EstimationResult::log_rn(const Vector& m) const {
  const double quadratic = m.dot(A * m) - 2.0 * zeta.dot(m);
  if (!model.is_ou()) return -0.5 * quadratic;
  return -model.alpha * model.beta / (2.0 * model.sigma * model.sigma) * quadratic;
}

EstimationResult mle(const Matrix& A, const Vector& zeta, const FieldModel& model) {
  if (A.rows() != A.cols() || A.rows() != zeta.size() || A.rows() == 0)
    throw Error(Errc::invalid_argument, "A must be square and match zeta");
  model.check();
  const Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12))
    throw Error(Errc::singular_matrix,
                "Fisher matrix is not positive definite; the regressors are linearly dependent on G");
  EstimationResult r;
  r.A = A;
  r.zeta = zeta;
  r.m_hat = llt.solve(zeta);
  r.a_inverse = llt.solve(Matrix::Identity(A.rows(), A.cols()));
  r.covariance = r.a_inverse;
  if (model.is_ou()) r.covariance *= model.sigma * model.sigma / (model.alpha * model.beta);
  r.model = model;
  return r;
}

EstimationResult estimate(const FieldModel& model, const Field& z, const ValidatedDomain& domain,
                          const RegressorSet& regressors, const StochIntConfig& cfg) {
  const auto A = fisher(model, domain, regressors, cfg.quad);
  const auto zeta = score(model, z, domain, regressors, cfg);
  EstimationResult r = mle(A.value, zeta.value, model);
  r.diagnostics = A.diagnostics;
  r.diagnostics += zeta.diagnostics;
  return r;
}

double condition_number(const Matrix& A) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().cwiseAbs().minCoeff();
  const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace rfmle
