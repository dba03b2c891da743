#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>

#include "rfmle/geometry.hpp"
#include "rfmle/jet.hpp"
#include "rfmle/regressors.hpp"

namespace rfmle {

/// Driving noise of the observed sheet.
struct FieldModel {
  enum class Kind { wiener, stationary_ou, zero_start_ou };

  Kind kind = Kind::wiener;
  double alpha = 1.0;
  double beta = 1.0;
  double sigma = 1.0;

  static FieldModel wiener() { return {}; }
  static FieldModel stationary_ou(double alpha, double beta, double sigma);
  static FieldModel zero_start_ou(double alpha, double beta, double sigma);

  bool is_ou() const { return kind != Kind::wiener; }
  /// Throws InvalidArgument unless alpha, beta, sigma > 0 for the OU kinds.
  void check() const;
};

/// "wiener" | "ou-stat" | "ou-zero"
std::string_view to_string(FieldModel::Kind kind);
FieldModel::Kind parse_model_kind(std::string_view name);

/// Standard normal keyed by (seed, j, k): counter-based, so any entry can be
/// drawn independently of iteration order.
double counter_normal(std::uint64_t seed, std::uint64_t j, std::uint64_t k);

/// Coefficients omega(j-1, k-1) of a truncated Karhunen-Loeve expansion on
/// the rectangle [0, S] x [0, T]; j indexes the t factor, k the s factor.
struct KLSample {
  int n = 0;
  double S = 0.0;
  double T = 0.0;
  Eigen::MatrixXd omega;
  std::uint64_t seed = 0;
};

KLSample draw_kl(int n, double S, double T, std::uint64_t seed);

// Direct evaluation of the truncated series (O(n^2) per point).
double eval_wiener(const KLSample& kl, double s, double t);
double eval_stationary_ou(const KLSample& kl, const FieldModel& model, double s, double t);
double eval_zero_start_ou(const KLSample& kl, const FieldModel& model, double s, double t);

/// A sheet that can be evaluated with its partials at any point.
class Field {
 public:
  using Column = std::function<Jet(double t)>;

  virtual ~Field() = default;
  virtual Jet jet(double s, double t) const = 0;
  double operator()(double s, double t) const { return jet(s, t).value; }

  /// Evaluator along the vertical line at abscissa s. Implementations hoist
  /// everything that depends on s alone.
  virtual Column column(double s) const;

  // Upper corner of the rectangle the field may be evaluated in.
  virtual double s_extent() const { return std::numeric_limits<double>::infinity(); }
  virtual double t_extent() const { return std::numeric_limits<double>::infinity(); }
};

/// Field given by a closure; used for deterministic observations.
class FunctionField : public Field {
 public:
  explicit FunctionField(std::function<Jet(double, double)> f) : f_(std::move(f)) {}
  Jet jet(double s, double t) const override { return f_(s, t); }

 private:
  std::function<Jet(double, double)> f_;
};

/// The noise sheet of a model built from a KL sample, with exact term-wise
/// partial derivatives. Evaluation outside [0,S] x [0,T] throws OutOfRectangle.
class KLSheet : public Field {
 public:
  KLSheet(const FieldModel& model, std::shared_ptr<const KLSample> kl);

  Jet jet(double s, double t) const override;
  Column column(double s) const override;
  double s_extent() const override { return kl_->S; }
  double t_extent() const override { return kl_->T; }

  const FieldModel& model() const { return model_; }
  const KLSample& kl() const { return *kl_; }

 private:
  void s_factors(double s, Eigen::VectorXd& a, Eigen::VectorXd& da) const;
  void t_factors(double t, Eigen::VectorXd& b, Eigen::VectorXd& db) const;
  void check_point(double s, double t) const;

  FieldModel model_;
  std::shared_ptr<const KLSample> kl_;
  Eigen::MatrixXd coeffs_;  // kappa * omega_jk / ((2j-1)(2k-1))
};

/// Z = sum_k m_k g_k + noise_scale * U, with U a KL sheet (absent for a
/// drift-only observation).
class FieldSample : public Field {
 public:
  FieldSample(std::shared_ptr<const RegressorSet> regressors, Eigen::VectorXd m,
              std::shared_ptr<const KLSheet> noise, double noise_scale = 1.0);

  Jet jet(double s, double t) const override;
  Column column(double s) const override;
  double s_extent() const override;
  double t_extent() const override;

  const Eigen::VectorXd& m() const { return m_; }

 private:
  std::shared_ptr<const RegressorSet> regressors_;
  Eigen::VectorXd m_;
  std::shared_ptr<const KLSheet> noise_;
  double noise_scale_;
};

/// Y(u, v) = 2 sqrt(alpha beta u' v') / sigma * Z(log u' / 2 alpha, log v' / 2 beta),
/// u' = u + shift. Holds a reference to Z.
class TransformedField : public Field {
 public:
  TransformedField(const Field& z, double alpha, double beta, double sigma, TransformMode mode);

  Jet jet(double u, double v) const override;
  Column column(double u) const override;
  double s_extent() const override;
  double t_extent() const override;

 private:
  const Field& z_;
  double alpha_;
  double beta_;
  double sigma_;
  double shift_;
};

}  // namespace rfmle
