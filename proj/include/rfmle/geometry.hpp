#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rfmle {

/// One polynomial piece p(s) = sum_i coeffs[i] * s^i valid on [lo, hi].
struct PolynomialPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs;
};

/// A strictly monotone boundary arc t = f(s), s in [lo, hi].
///
/// The inverse is closed form when one is supplied; otherwise it is found by
/// bisection to 1e-12 in the abscissa.
class Curve {
 public:
  enum class Direction { increasing, decreasing };

  Curve() = default;
  Curve(std::function<double(double)> f, double lo, double hi, Direction direction,
        std::function<double(double)> inverse = {});

  double operator()(double s) const { return f_(s); }
  double inverse(double t) const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  Direction direction() const { return direction_; }
  bool increasing() const { return direction_ == Direction::increasing; }
  bool has_closed_form_inverse() const { return static_cast<bool>(inverse_); }

  // Ordinate range covered by the arc.
  double t_min() const;
  double t_max() const;

  // Set for curves built by polynomial_curve(); used for serialization.
  const std::vector<PolynomialPiece>& pieces() const { return pieces_; }

 private:
  friend Curve polynomial_curve(std::vector<PolynomialPiece> pieces, Direction direction);

  std::function<double(double)> f_;
  std::function<double(double)> inverse_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  Direction direction_ = Direction::increasing;
  std::vector<PolynomialPiece> pieces_;
};

/// Piecewise polynomial arc; pieces must be contiguous and sorted by lo.
Curve polynomial_curve(std::vector<PolynomialPiece> pieces, Curve::Direction direction);

struct CircleParams {
  double cx = 0.0;
  double cy = 0.0;
  double r = 0.0;
};

/// Observation domain G bounded by the lower arcs gamma12 (on [a,b1]) and
/// gamma1 (on [b1,c]) and the upper arcs gamma2 (on [a,b2]) and gamma0 (on
/// [b2,c]).
struct DomainSpec {
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double c = 0.0;
  Curve gamma12;
  Curve gamma1;
  Curve gamma2;
  Curve gamma0;
  // <= 0 selects the default min(b1-a, c-b1, b2-a, c-b2) / 10.
  double strip_epsilon = 0.0;
  // Present when the domain came from circle_domain().
  std::optional<CircleParams> circle;
};

/// Vertical strip [s_lo, s_hi] of G between two boundary arcs.
struct Strip {
  double s_lo;
  double s_hi;
  const Curve* lower;
  const Curve* upper;
};

/// A DomainSpec that passed validate(). Immutable and cheap to copy.
class ValidatedDomain {
 public:
  const DomainSpec& spec() const { return *spec_; }
  double a() const { return spec_->a; }
  double b1() const { return spec_->b1; }
  double b2() const { return spec_->b2; }
  double c() const { return spec_->c; }
  const Curve& gamma12() const { return spec_->gamma12; }
  const Curve& gamma1() const { return spec_->gamma1; }
  const Curve& gamma2() const { return spec_->gamma2; }
  const Curve& gamma0() const { return spec_->gamma0; }
  double strip_epsilon() const { return epsilon_; }

  /// The three pieces G1, G2, G3 in increasing s; G2 is omitted when b1 == b2.
  std::vector<Strip> strips() const;

  /// Bounding box [a, c] x [t_min, t_max].
  double t_min() const;
  double t_max() const;

 private:
  friend ValidatedDomain validate(const DomainSpec& spec, int grid_points);
  ValidatedDomain(std::shared_ptr<const DomainSpec> spec, double epsilon)
      : spec_(std::move(spec)), epsilon_(epsilon) {}

  std::shared_ptr<const DomainSpec> spec_;
  double epsilon_;
};

double default_strip_epsilon(const DomainSpec& spec);

/// Checks every DomainSpec invariant on a grid of `grid_points` samples per
/// arc. Throws rfmle::Error naming the first violation.
ValidatedDomain validate(const DomainSpec& spec, int grid_points = 256);

DomainSpec circle_domain(double cx, double cy, double r);

bool contains(const ValidatedDomain& domain, double s, double t);

enum class TransformMode { stationary, zero_start };

/// Image of G under u = exp(2 alpha s) - shift, v = exp(2 beta t) - shift with
/// shift 0 (stationary) or 1 (zero_start).
DomainSpec transform_domain(const ValidatedDomain& domain, double alpha, double beta,
                            TransformMode mode);

}  // namespace rfmle
