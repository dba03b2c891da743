#pragma once

#include <Eigen/Dense>

#include "rfmle/geometry.hpp"
#include "rfmle/quadrature.hpp"
#include "rfmle/random_fields.hpp"
#include "rfmle/regressors.hpp"
#include "rfmle/stochastic_integrals.hpp"

namespace rfmle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Fisher matrices. Diagnostics carry the quadrature flags of every term.
QuadResult<Matrix> fisher_wiener(const ValidatedDomain& domain, const RegressorSet& g,
                                 const QuadConfig& quad = {});
QuadResult<Matrix> fisher_stationary_ou(const ValidatedDomain& domain, const RegressorSet& h,
                                        double alpha, double beta, const QuadConfig& quad = {});
QuadResult<Matrix> fisher_zero_start_ou(const ValidatedDomain& domain, const RegressorSet& h,
                                        double alpha, double beta, const QuadConfig& quad = {});

// Score vectors of an observed field.
QuadResult<Vector> score_wiener(const Field& z, const ValidatedDomain& domain, const RegressorSet& g,
                                const StochIntConfig& cfg = {});
QuadResult<Vector> score_stationary_ou(const Field& z, const ValidatedDomain& domain,
                                       const RegressorSet& h, double alpha, double beta,
                                       const StochIntConfig& cfg = {});
QuadResult<Vector> score_zero_start_ou(const Field& z, const ValidatedDomain& domain,
                                       const RegressorSet& h, double alpha, double beta,
                                       const StochIntConfig& cfg = {});

// Dispatch on the model kind.
QuadResult<Matrix> fisher(const FieldModel& model, const ValidatedDomain& domain,
                          const RegressorSet& regressors, const QuadConfig& quad = {});
QuadResult<Vector> score(const FieldModel& model, const Field& z, const ValidatedDomain& domain,
                         const RegressorSet& regressors, const StochIntConfig& cfg = {});

// The OU quantities computed instead through the Wiener formulas on the
// transformed domain, regressors and field, scaled back by sigma^2 / (alpha beta).
QuadResult<Matrix> fisher_via_transform(const FieldModel& model, const ValidatedDomain& domain,
                                        const RegressorSet& h, const QuadConfig& quad = {});
QuadResult<Vector> score_via_transform(const FieldModel& model, const Field& z,
                                       const ValidatedDomain& domain, const RegressorSet& h,
                                       const StochIntConfig& cfg = {});

struct EstimationResult {
  Matrix A;
  Vector zeta;
  Vector m_hat;
  // sigma^2 / (alpha beta) A^-1 for the OU models, A^-1 for Wiener.
  Matrix covariance;
  Matrix a_inverse;
  FieldModel model;
  QuadDiagnostics diagnostics;

  /// Log Radon-Nikodym exponent at m.
  double log_rn(const Vector& m) const;
};

/// m_hat = A^-1 zeta by Cholesky. Throws SingularMatrix when A is not
/// numerically positive definite.
EstimationResult mle(const Matrix& A, const Vector& zeta, const FieldModel& model);

/// fisher + score + mle.
EstimationResult estimate(const FieldModel& model, const Field& z, const ValidatedDomain& domain,
                          const RegressorSet& regressors, const StochIntConfig& cfg = {});

/// Ratio of extreme eigenvalues of a symmetric matrix (infinity if singular).
double condition_number(const Matrix& A);

}  // namespace rfmle
