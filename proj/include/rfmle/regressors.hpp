#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "rfmle/geometry.hpp"
#include "rfmle/jet.hpp"

namespace rfmle {

/// A known regression function with its partials d/ds, d/dt, d2/dsdt.
struct Regressor {
  std::function<Jet(double s, double t)> jet;
  // Source expression, when the regressor was parsed from one.
  std::string expression;

  double operator()(double s, double t) const { return jet(s, t).value; }
};

/// Values and partials of all p regressors at one point.
struct RegressorJets {
  Eigen::VectorXd value;
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;
  Eigen::VectorXd d12;
};

class RegressorSet {
 public:
  RegressorSet() = default;
  explicit RegressorSet(std::vector<Regressor> regressors) : regressors_(std::move(regressors)) {}

  int size() const { return static_cast<int>(regressors_.size()); }
  const Regressor& operator[](int k) const { return regressors_[static_cast<std::size_t>(k)]; }
  const std::vector<Regressor>& regressors() const { return regressors_; }

  RegressorJets jets(double s, double t) const;

  /// sum_k m_k g_k and its partials.
  Jet combine(const Eigen::VectorXd& m, double s, double t) const;

 private:
  std::vector<Regressor> regressors_;
};

/// {s^2 + t^2, s + t, s t} with closed-form partials.
RegressorSet polynomial_example_basis();

/// Parses expressions over s and t; partials are derived symbolically.
Regressor expression_regressor(const std::string& text);
RegressorSet regressors_from_expressions(const std::vector<std::string>& texts);

/// Wraps a value-only function; partials by central differences of step h.
Regressor finite_difference_regressor(std::function<double(double, double)> value, double h = 1e-5);

/// g_k(u, v) = 2 sqrt(alpha beta u' v') / sigma * h_k(log u' / 2 alpha, log v' / 2 beta)
/// with u' = u + shift, v' = v + shift (shift 0 stationary, 1 zero-start).
/// Evaluating at u' <= 0 or v' <= 0 throws NonPositiveCoordinate.
RegressorSet transform_regressors(const RegressorSet& h, double alpha, double beta, double sigma,
                                  TransformMode mode);

}  // namespace rfmle
