#include "rfmle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rfmle/error.hpp"

namespace rfmle {

namespace {

constexpr double kEndpointTol = 1e-10;

// Absolute 1e-10 near the origin, relative for large transformed domains.
bool near(double x, double y) {
  return std::abs(x - y) <= kEndpointTol * std::max({1.0, std::abs(x), std::abs(y)});
}

std::string at(const char* curve, double s) {
  std::ostringstream os;
  os.precision(12);
  os << curve << " at s=" << s;
  return os.str();
}

double horner(const std::vector<double>& coeffs, double s) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[i] = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
  if (n > 1) xs.back() = hi;
  return xs;
}

struct Interval {
  double lo;
  double hi;
};

// Inner epsilon-strips of the four arcs, as vertical sections at abscissa s.
Interval strip_gamma12(const DomainSpec& d, double eps, double s) {
  if (s <= d.a + eps) return {d.gamma12(s), d.gamma12(d.a)};
  return {d.gamma12(s), d.gamma12(s) + eps};
}
Interval strip_gamma1(const DomainSpec& d, double eps, double s) {
  if (s >= d.c - eps) return {d.gamma1(s), d.gamma1(d.c)};
  return {d.gamma1(s), d.gamma1(s) + eps};
}
Interval strip_gamma2(const DomainSpec& d, double eps, double s) {
  if (s <= d.a + eps) return {d.gamma2(d.a), d.gamma2(s)};
  return {d.gamma2(s) - eps, d.gamma2(s)};
}
Interval strip_gamma0(const DomainSpec& d, double eps, double s) {
  if (s >= d.c - eps) return {d.gamma0(d.c), d.gamma0(s)};
  return {d.gamma0(s) - eps, d.gamma0(s)};
}

template <class LowerStrip, class UpperStrip>
void check_strips_disjoint(const DomainSpec& d, double eps, double s_lo, double s_hi, int n,
                           LowerStrip lower, UpperStrip upper, const char* what) {
  if (s_lo > s_hi) return;
  for (double s : linspace(s_lo, s_hi, s_lo == s_hi ? 1 : n)) {
    Interval lo = lower(d, eps, s);
    Interval hi = upper(d, eps, s);
    if (std::max(lo.lo, hi.lo) <= std::min(lo.hi, hi.hi))
      throw Error(Errc::strip_overlap, at(what, s));
  }
}

void check_interval(const Curve& curve, double lo, double hi, const char* name) {
  if (!(curve.lo() < curve.hi()))
    throw Error(Errc::invalid_argument, std::string(name) + " has an empty interval");
  if (!near(curve.lo(), lo) || !near(curve.hi(), hi)) {
    std::ostringstream os;
    os << name << " is defined on [" << curve.lo() << ", " << curve.hi() << "], expected [" << lo
       << ", " << hi << "]";
    throw Error(Errc::invalid_argument, os.str());
  }
}

void check_monotone(const Curve& curve, Curve::Direction expected, int n, const char* name) {
  if (curve.direction() != expected)
    throw Error(Errc::monotonicity_violation,
                std::string(name) + " declared with the wrong monotonicity direction");
  auto xs = linspace(curve.lo(), curve.hi(), n);
  double prev = curve(xs[0]);
  if (!std::isfinite(prev)) throw Error(Errc::monotonicity_violation, at(name, xs[0]) + " (not finite)");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    double cur = curve(xs[i]);
    bool ok = expected == Curve::Direction::increasing ? cur > prev : cur < prev;
    if (!ok || !std::isfinite(cur)) throw Error(Errc::monotonicity_violation, at(name, xs[i]));
    prev = cur;
  }
}

void check_inverse(const Curve& curve, int n, const char* name) {
  // Compared in ordinate space: the abscissa round trip is ill-conditioned
  // where the slope vanishes (e.g. the bottom of a circle).
  for (double s : linspace(curve.lo(), curve.hi(), n)) {
    double t = curve(s);
    double back = curve(curve.inverse(t));
    if (!(std::abs(back - t) <= 1e-12 * std::max(1.0, std::abs(t))))
      throw Error(Errc::invalid_argument, at(name, s) + " inverse does not round-trip");
  }
}

void check_endpoint(double lhs, double rhs, const char* what) {
  if (!near(lhs, rhs)) {
    std::ostringstream os;
    os.precision(12);
    os << what << ": " << lhs << " vs " << rhs;
    throw Error(Errc::endpoint_mismatch, os.str());
  }
}

void check_positive(const Curve& curve, int n, const char* name) {
  for (double s : linspace(curve.lo(), curve.hi(), n))
    if (!(curve(s) > 0.0)) throw Error(Errc::non_positive_ordinate, at(name, s));
}

}  // namespace

Curve::Curve(std::function<double(double)> f, double lo, double hi, Direction direction,
             std::function<double(double)> inverse)
    : f_(std::move(f)), inverse_(std::move(inverse)), lo_(lo), hi_(hi), direction_(direction) {}

double Curve::t_min() const { return increasing() ? f_(lo_) : f_(hi_); }
double Curve::t_max() const { return increasing() ? f_(hi_) : f_(lo_); }

double Curve::inverse(double t) const {
  if (inverse_) return inverse_(t);
  double lo = lo_;
  double hi = hi_;
  const bool inc = increasing();
  if (inc ? t <= f_(lo) : t >= f_(lo)) return lo;
  if (inc ? t >= f_(hi) : t <= f_(hi)) return hi;
  // Bisect to adjacent doubles; a width tolerance in s would be amplified by
  // the slope in the ordinate round trip.
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    bool below = inc ? f_(mid) < t : f_(mid) > t;
    (below ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Curve polynomial_curve(std::vector<PolynomialPiece> pieces, Curve::Direction direction) {
  if (pieces.empty()) throw Error(Errc::invalid_argument, "polynomial curve without pieces");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].lo < pieces[i].hi) || pieces[i].coeffs.empty())
      throw Error(Errc::invalid_argument, "polynomial piece with empty interval or no coefficients");
    if (i > 0 && !near(pieces[i].lo, pieces[i - 1].hi))
      throw Error(Errc::invalid_argument, "polynomial pieces are not contiguous");
  }
  auto shared = std::make_shared<const std::vector<PolynomialPiece>>(pieces);
  auto f = [shared](double s) {
    const auto& ps = *shared;
    auto it = std::upper_bound(ps.begin(), ps.end(), s,
                               [](double x, const PolynomialPiece& p) { return x < p.hi; });
    if (it == ps.end()) it = std::prev(ps.end());
    return horner(it->coeffs, s);
  };
  Curve curve(f, pieces.front().lo, pieces.back().hi, direction);
  curve.pieces_ = std::move(pieces);
  return curve;
}

std::vector<Strip> ValidatedDomain::strips() const {
  const DomainSpec& d = *spec_;
  std::vector<Strip> out;
  const double left = std::min(d.b1, d.b2);
  const double right = std::max(d.b1, d.b2);
  out.push_back({d.a, left, &d.gamma12, &d.gamma2});
  if (d.b1 < d.b2) out.push_back({d.b1, d.b2, &d.gamma1, &d.gamma2});
  if (d.b1 > d.b2) out.push_back({d.b2, d.b1, &d.gamma12, &d.gamma0});
  out.push_back({right, d.c, &d.gamma1, &d.gamma0});
  return out;
}

double ValidatedDomain::t_min() const {
  return std::min(spec_->gamma12.t_min(), spec_->gamma1.t_min());
}

double ValidatedDomain::t_max() const {
  return std::max(spec_->gamma2.t_max(), spec_->gamma0.t_max());
}

double default_strip_epsilon(const DomainSpec& d) {
  return std::min({d.b1 - d.a, d.c - d.b1, d.b2 - d.a, d.c - d.b2}) / 10.0;
}

ValidatedDomain validate(const DomainSpec& spec, int grid_points) {
  if (grid_points < 16) throw Error(Errc::invalid_argument, "grid_points must be >= 16");
  const DomainSpec& d = spec;
  if (!(d.a > 0.0)) throw Error(Errc::non_positive_coordinate, "a must be > 0");
  if (!(d.a < d.b1 && d.a < d.b2 && d.b1 < d.c && d.b2 < d.c))
    throw Error(Errc::invalid_argument, "breakpoints must satisfy a < b1, b2 < c");

  check_interval(d.gamma12, d.a, d.b1, "gamma12");
  check_interval(d.gamma1, d.b1, d.c, "gamma1");
  check_interval(d.gamma2, d.a, d.b2, "gamma2");
  check_interval(d.gamma0, d.b2, d.c, "gamma0");

  using Dir = Curve::Direction;
  check_monotone(d.gamma12, Dir::decreasing, grid_points, "gamma12");
  check_monotone(d.gamma1, Dir::increasing, grid_points, "gamma1");
  check_monotone(d.gamma2, Dir::increasing, grid_points, "gamma2");
  check_monotone(d.gamma0, Dir::decreasing, grid_points, "gamma0");

  check_endpoint(d.gamma12(d.b1), d.gamma1(d.b1), "gamma12(b1) vs gamma1(b1)");
  check_endpoint(d.gamma2(d.b2), d.gamma0(d.b2), "gamma2(b2) vs gamma0(b2)");
  check_endpoint(d.gamma12(d.a), d.gamma2(d.a), "gamma12(a) vs gamma2(a)");
  check_endpoint(d.gamma1(d.c), d.gamma0(d.c), "gamma1(c) vs gamma0(c)");

  check_positive(d.gamma12, grid_points, "gamma12");
  check_positive(d.gamma1, grid_points, "gamma1");

  check_inverse(d.gamma12, grid_points, "gamma12");
  check_inverse(d.gamma1, grid_points, "gamma1");
  check_inverse(d.gamma2, grid_points, "gamma2");
  check_inverse(d.gamma0, grid_points, "gamma0");

  const double eps = d.strip_epsilon > 0.0 ? d.strip_epsilon : default_strip_epsilon(d);
  check_strips_disjoint(d, eps, d.b1, d.b2, grid_points, strip_gamma1, strip_gamma2,
                        "gamma1/gamma2 strips");
  check_strips_disjoint(d, eps, d.b2, d.b1, grid_points, strip_gamma12, strip_gamma0,
                        "gamma12/gamma0 strips");

  return ValidatedDomain(std::make_shared<const DomainSpec>(spec), eps);
}

DomainSpec circle_domain(double cx, double cy, double r) {
  if (!(r > 0.0)) throw Error(Errc::invalid_argument, "circle radius must be > 0");
  if (!(cx - r > 0.0) || !(cy - r > 0.0)) {
    std::ostringstream os;
    os << "circle(" << cx << ", " << cy << ", " << r << ")";
    throw Error(Errc::circle_not_in_positive_quadrant, os.str());
  }
  auto half = [cx, r](double s) { return std::sqrt(std::max(0.0, r * r - (s - cx) * (s - cx))); };
  auto half_t = [cy, r](double t) { return std::sqrt(std::max(0.0, r * r - (t - cy) * (t - cy))); };
  using Dir = Curve::Direction;
  DomainSpec d;
  d.a = cx - r;
  d.b1 = cx;
  d.b2 = cx;
  d.c = cx + r;
  d.gamma12 = Curve([=](double s) { return cy - half(s); }, d.a, cx, Dir::decreasing,
                    [=](double t) { return cx - half_t(t); });
  d.gamma1 = Curve([=](double s) { return cy - half(s); }, cx, d.c, Dir::increasing,
                   [=](double t) { return cx + half_t(t); });
  d.gamma2 = Curve([=](double s) { return cy + half(s); }, d.a, cx, Dir::increasing,
                   [=](double t) { return cx - half_t(t); });
  d.gamma0 = Curve([=](double s) { return cy + half(s); }, cx, d.c, Dir::decreasing,
                   [=](double t) { return cx + half_t(t); });
  d.circle = CircleParams{cx, cy, r};
  return d;
}

bool contains(const ValidatedDomain& domain, double s, double t) {
  for (const Strip& strip : domain.strips()) {
    if (s < strip.s_lo || s > strip.s_hi) continue;
    if ((*strip.lower)(s) <= t && t <= (*strip.upper)(s)) return true;
  }
  return false;
}

DomainSpec transform_domain(const ValidatedDomain& domain, double alpha, double beta,
                            TransformMode mode) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw Error(Errc::invalid_argument, "transform_domain requires alpha, beta > 0");
  const double shift = mode == TransformMode::zero_start ? 1.0 : 0.0;
  auto to_u = [=](double s) { return std::exp(2.0 * alpha * s) - shift; };
  auto to_v = [=](double t) { return std::exp(2.0 * beta * t) - shift; };
  auto from_u = [=](double u) { return std::log(u + shift) / (2.0 * alpha); };
  auto from_v = [=](double v) { return std::log(v + shift) / (2.0 * beta); };

  auto map_curve = [&](const Curve& src) {
    return Curve([=](double u) { return to_v(src(from_u(u))); }, to_u(src.lo()), to_u(src.hi()),
                 src.direction(), [=](double v) { return to_u(src.inverse(from_v(v))); });
  };

  const DomainSpec& s = domain.spec();
  DomainSpec out;
  out.a = to_u(s.a);
  out.b1 = to_u(s.b1);
  out.b2 = to_u(s.b2);
  out.c = to_u(s.c);
  out.gamma12 = map_curve(s.gamma12);
  out.gamma1 = map_curve(s.gamma1);
  out.gamma2 = map_curve(s.gamma2);
  out.gamma0 = map_curve(s.gamma0);
  return out;
}

}  // namespace rfmle
