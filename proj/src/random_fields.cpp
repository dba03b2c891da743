#include "rfmle/random_fields.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rfmle/error.hpp"

namespace rfmle {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_model(const FieldModel& model, FieldModel::Kind kind) {
  if (model.kind != kind)
    throw Error(Errc::wrong_model_variant, std::string("expected ") + std::string(to_string(kind)) +
                                               ", got " + std::string(to_string(model.kind)));
  model.check();
}

void require_in_rectangle(const KLSample& kl, double s, double t) {
  const double slack = 1e-12;
  if (!(s >= -slack * kl.S && s <= kl.S * (1.0 + slack) && t >= -slack * kl.T &&
        t <= kl.T * (1.0 + slack))) {
    std::ostringstream os;
    os << "(" << s << ", " << t << ") outside [0, " << kl.S << "] x [0, " << kl.T << "]";
    throw Error(Errc::out_of_rectangle, os.str());
  }
}

// sum_{j,k} omega_jk / ((2j-1)(2k-1)) sin((2j-1) x_t) sin((2k-1) x_s)
double double_sine_sum(const KLSample& kl, double x_s, double x_t) {
  double acc = 0.0;
  for (int j = 1; j <= kl.n; ++j) {
    const double st = std::sin((2 * j - 1) * x_t) / (2 * j - 1);
    for (int k = 1; k <= kl.n; ++k)
      acc += kl.omega(j - 1, k - 1) * st * std::sin((2 * k - 1) * x_s) / (2 * k - 1);
  }
  return acc;
}

// sin((2k-1) theta) and cos((2k-1) theta), k = 1..n, by the three-term
// recurrence x_{k+1} = 2 cos(2 theta) x_k - x_{k-1}.
void odd_harmonics(double theta, Eigen::Index n, Eigen::VectorXd& sines, Eigen::VectorXd& cosines) {
  sines.resize(n);
  cosines.resize(n);
  if (n == 0) return;
  const double s1 = std::sin(theta);
  const double c1 = std::cos(theta);
  const double two_cos2 = 2.0 * (c1 * c1 - s1 * s1);
  double sp = -s1, sc = s1;
  double cp = c1, cc = c1;
  sines[0] = sc;
  cosines[0] = cc;
  for (Eigen::Index k = 1; k < n; ++k) {
    const double sn = two_cos2 * sc - sp;
    const double cn = two_cos2 * cc - cp;
    sp = sc;
    sc = sn;
    cp = cc;
    cc = cn;
    sines[k] = sc;
    cosines[k] = cc;
  }
}

}  // namespace

FieldModel FieldModel::stationary_ou(double alpha, double beta, double sigma) {
  FieldModel m{Kind::stationary_ou, alpha, beta, sigma};
  m.check();
  return m;
}

FieldModel FieldModel::zero_start_ou(double alpha, double beta, double sigma) {
  FieldModel m{Kind::zero_start_ou, alpha, beta, sigma};
  m.check();
  return m;
}

void FieldModel::check() const {
  if (is_ou() && !(alpha > 0.0 && beta > 0.0 && sigma > 0.0))
    throw Error(Errc::invalid_argument,
                "Ornstein-Uhlenbeck models require alpha > 0, beta > 0, sigma > 0");
}

std::string_view to_string(FieldModel::Kind kind) {
  switch (kind) {
    case FieldModel::Kind::wiener: return "wiener";
    case FieldModel::Kind::stationary_ou: return "ou-stat";
    case FieldModel::Kind::zero_start_ou: return "ou-zero";
  }
  return "unknown";
}

FieldModel::Kind parse_model_kind(std::string_view name) {
  if (name == "wiener") return FieldModel::Kind::wiener;
  if (name == "ou-stat") return FieldModel::Kind::stationary_ou;
  if (name == "ou-zero") return FieldModel::Kind::zero_start_ou;
  throw Error(Errc::invalid_argument, "unknown model '" + std::string(name) + "'");
}

double counter_normal(std::uint64_t seed, std::uint64_t j, std::uint64_t k) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (j * 0xd1b54a32d192ed03ULL));
  h = splitmix64(h ^ (k * 0x8cb92ba72f3d8dd7ULL));
  const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, u);
}

KLSample draw_kl(int n, double S, double T, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::invalid_argument, "KL truncation order must be >= 1");
  if (!(S > 0.0) || !(T > 0.0)) throw Error(Errc::invalid_argument, "S and T must be > 0");
  KLSample kl{n, S, T, Eigen::MatrixXd(n, n), seed};
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) kl.omega(j, k) = counter_normal(seed, j + 1, k + 1);
  return kl;
}

double eval_wiener(const KLSample& kl, double s, double t) {
  require_in_rectangle(kl, s, t);
  const double kappa = 8.0 * std::sqrt(kl.S * kl.T) / (kPi * kPi);
  return kappa * double_sine_sum(kl, kPi * s / (2.0 * kl.S), kPi * t / (2.0 * kl.T));
}

double eval_stationary_ou(const KLSample& kl, const FieldModel& model, double s, double t) {
  require_model(model, FieldModel::Kind::stationary_ou);
  require_in_rectangle(kl, s, t);
  const double a = model.alpha, b = model.beta;
  const double kappa = 4.0 * model.sigma * std::exp(a * (kl.S - s) + b * (kl.T - t)) /
                       (kPi * kPi * std::sqrt(a * b));
  return kappa * double_sine_sum(kl, 0.5 * kPi * std::exp(2.0 * a * (s - kl.S)),
                                 0.5 * kPi * std::exp(2.0 * b * (t - kl.T)));
}

double eval_zero_start_ou(const KLSample& kl, const FieldModel& model, double s, double t) {
  require_model(model, FieldModel::Kind::zero_start_ou);
  require_in_rectangle(kl, s, t);
  const double a = model.alpha, b = model.beta;
  const double span_s = std::expm1(2.0 * a * kl.S);
  const double span_t = std::expm1(2.0 * b * kl.T);
  const double kappa = 4.0 * model.sigma * std::sqrt(span_s * span_t) /
                       (kPi * kPi * std::exp(a * s + b * t) * std::sqrt(a * b));
  return kappa * double_sine_sum(kl, 0.5 * kPi * std::expm1(2.0 * a * s) / span_s,
                                 0.5 * kPi * std::expm1(2.0 * b * t) / span_t);
}

Field::Column Field::column(double s) const {
  return [this, s](double t) { return jet(s, t); };
}

// ---------------------------------------------------------------------------
// KLSheet
//
// U(s, t) = sum_jk C_jk b_j(t) a_k(s) with a_k(s) = A(s) sin((2k-1) theta(s)),
// b_j(t) = B(t) sin((2j-1) phi(t)); A, B, theta, phi depend on the model.

KLSheet::KLSheet(const FieldModel& model, std::shared_ptr<const KLSample> kl)
    : model_(model), kl_(std::move(kl)) {
  if (!kl_) throw Error(Errc::invalid_argument, "KLSheet requires a KL sample");
  model_.check();
  const KLSample& k = *kl_;
  double kappa = 0.0;
  switch (model_.kind) {
    case FieldModel::Kind::wiener:
      kappa = 8.0 * std::sqrt(k.S * k.T) / (kPi * kPi);
      break;
    case FieldModel::Kind::stationary_ou:
      kappa = 4.0 * model_.sigma * std::exp(model_.alpha * k.S + model_.beta * k.T) /
              (kPi * kPi * std::sqrt(model_.alpha * model_.beta));
      break;
    case FieldModel::Kind::zero_start_ou:
      kappa = 4.0 * model_.sigma *
              std::sqrt(std::expm1(2.0 * model_.alpha * k.S) * std::expm1(2.0 * model_.beta * k.T)) /
              (kPi * kPi * std::sqrt(model_.alpha * model_.beta));
      break;
  }
  coeffs_.resize(k.n, k.n);
  for (int j = 0; j < k.n; ++j)
    for (int kk = 0; kk < k.n; ++kk)
      coeffs_(j, kk) = kappa * k.omega(j, kk) / ((2.0 * j + 1.0) * (2.0 * kk + 1.0));
}

void KLSheet::check_point(double s, double t) const { require_in_rectangle(*kl_, s, t); }

namespace {

// Envelope E(x), phase angle theta(x) and their derivatives for one axis.
struct AxisMap {
  double envelope, d_envelope, theta, d_theta;
};

AxisMap axis_map(FieldModel::Kind kind, double rate, double x, double extent) {
  switch (kind) {
    case FieldModel::Kind::wiener:
      return {1.0, 0.0, 0.5 * kPi * x / extent, 0.5 * kPi / extent};
    case FieldModel::Kind::stationary_ou: {
      const double e = std::exp(-rate * x);
      const double theta = 0.5 * kPi * std::exp(2.0 * rate * (x - extent));
      return {e, -rate * e, theta, 2.0 * rate * theta};
    }
    case FieldModel::Kind::zero_start_ou: {
      const double e = std::exp(-rate * x);
      const double span = std::expm1(2.0 * rate * extent);
      const double theta = 0.5 * kPi * std::expm1(2.0 * rate * x) / span;
      const double d_theta = kPi * rate * std::exp(2.0 * rate * x) / span;
      return {e, -rate * e, theta, d_theta};
    }
  }
  return {};
}

void axis_factors(const AxisMap& m, Eigen::Index n, Eigen::VectorXd& f, Eigen::VectorXd& df) {
  Eigen::VectorXd sines, cosines;
  odd_harmonics(m.theta, n, sines, cosines);
  f.resize(n);
  df.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double order = 2.0 * static_cast<double>(k) + 1.0;
    f[k] = m.envelope * sines[k];
    df[k] = m.d_envelope * sines[k] + m.envelope * cosines[k] * order * m.d_theta;
  }
}

// With b_k = E sin((2k+1) theta) along one axis, returns b.x, b.y, b'.x, b'.y
// in a single pass of the harmonic recurrence.
Jet contract(const AxisMap& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double s1 = std::sin(m.theta);
  const double c1 = std::cos(m.theta);
  const double two_cos2 = 2.0 * (c1 * c1 - s1 * s1);
  double sp = -s1, sc = s1, cp = c1, cc = c1;
  double sx = 0.0, sy = 0.0, cx = 0.0, cy = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (k > 0) {
      const double sn = two_cos2 * sc - sp;
      const double cn = two_cos2 * cc - cp;
      sp = sc;
      sc = sn;
      cp = cc;
      cc = cn;
    }
    const double order_cos = (2.0 * static_cast<double>(k) + 1.0) * cc;
    sx += sc * x[k];
    sy += sc * y[k];
    cx += order_cos * x[k];
    cy += order_cos * y[k];
  }
  const double w = m.envelope * m.d_theta;
  return {m.envelope * sx, m.envelope * sy, m.d_envelope * sx + w * cx, m.d_envelope * sy + w * cy};
}

}  // namespace

void KLSheet::s_factors(double s, Eigen::VectorXd& a, Eigen::VectorXd& da) const {
  axis_factors(axis_map(model_.kind, model_.alpha, s, kl_->S), kl_->n, a, da);
}

void KLSheet::t_factors(double t, Eigen::VectorXd& b, Eigen::VectorXd& db) const {
  axis_factors(axis_map(model_.kind, model_.beta, t, kl_->T), kl_->n, b, db);
}

Jet KLSheet::jet(double s, double t) const {
  check_point(s, t);
  Eigen::VectorXd a, da, b, db;
  s_factors(s, a, da);
  t_factors(t, b, db);
  const Eigen::VectorXd ca = coeffs_ * a;
  const Eigen::VectorXd cda = coeffs_ * da;
  return {b.dot(ca), b.dot(cda), db.dot(ca), db.dot(cda)};
}

Field::Column KLSheet::column(double s) const {
  check_point(s, 0.0);
  Eigen::VectorXd a, da;
  s_factors(s, a, da);
  auto ca = std::make_shared<const Eigen::VectorXd>(coeffs_ * a);
  auto cda = std::make_shared<const Eigen::VectorXd>(coeffs_ * da);
  return [this, s, ca, cda](double t) {
    check_point(s, t);
    return contract(axis_map(model_.kind, model_.beta, t, kl_->T), *ca, *cda);
  };
}

// ---------------------------------------------------------------------------

FieldSample::FieldSample(std::shared_ptr<const RegressorSet> regressors, Eigen::VectorXd m,
                         std::shared_ptr<const KLSheet> noise, double noise_scale)
    : regressors_(std::move(regressors)),
      m_(std::move(m)),
      noise_(std::move(noise)),
      noise_scale_(noise_scale) {
  if (regressors_ && regressors_->size() != m_.size())
    throw Error(Errc::invalid_argument, "parameter vector size does not match the regressors");
}

Jet FieldSample::jet(double s, double t) const {
  Jet z;
  if (regressors_) z = regressors_->combine(m_, s, t);
  if (noise_ && noise_scale_ != 0.0) z += noise_scale_ * noise_->jet(s, t);
  return z;
}

Field::Column FieldSample::column(double s) const {
  Column noise_col;
  if (noise_ && noise_scale_ != 0.0) noise_col = noise_->column(s);
  return [this, s, noise_col = std::move(noise_col)](double t) {
    Jet z;
    if (regressors_) z = regressors_->combine(m_, s, t);
    if (noise_col) z += noise_scale_ * noise_col(t);
    return z;
  };
}

double FieldSample::s_extent() const {
  return noise_ ? noise_->s_extent() : std::numeric_limits<double>::infinity();
}

double FieldSample::t_extent() const {
  return noise_ ? noise_->t_extent() : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------

TransformedField::TransformedField(const Field& z, double alpha, double beta, double sigma,
                                   TransformMode mode)
    : z_(z),
      alpha_(alpha),
      beta_(beta),
      sigma_(sigma),
      shift_(mode == TransformMode::zero_start ? 1.0 : 0.0) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(sigma > 0.0))
    throw Error(Errc::invalid_argument, "TransformedField requires alpha, beta, sigma > 0");
}

Jet TransformedField::jet(double u, double v) const {
  if (!(u + shift_ > 0.0) || !(v + shift_ > 0.0))
    throw Error(Errc::non_positive_coordinate, "transformed field evaluated outside its range");
  const double s = std::log(u + shift_) / (2.0 * alpha_);
  const double t = std::log(v + shift_) / (2.0 * beta_);
  return transform_jet(z_.jet(s, t), u, v, alpha_, beta_, sigma_, shift_);
}

Field::Column TransformedField::column(double u) const {
  if (!(u + shift_ > 0.0))
    throw Error(Errc::non_positive_coordinate, "transformed field evaluated outside its range");
  const double s = std::log(u + shift_) / (2.0 * alpha_);
  Column inner = z_.column(s);
  return [this, u, inner = std::move(inner)](double v) {
    if (!(v + shift_ > 0.0))
      throw Error(Errc::non_positive_coordinate, "transformed field evaluated outside its range");
    const double t = std::log(v + shift_) / (2.0 * beta_);
    return transform_jet(inner(t), u, v, alpha_, beta_, sigma_, shift_);
  };
}

double TransformedField::s_extent() const {
  return std::exp(2.0 * alpha_ * z_.s_extent()) - shift_;
}

double TransformedField::t_extent() const {
  return std::exp(2.0 * beta_ * z_.t_extent()) - shift_;
}

}  // namespace rfmle
