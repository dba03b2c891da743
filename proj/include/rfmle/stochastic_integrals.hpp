#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "rfmle/geometry.hpp"
#include "rfmle/jet.hpp"
#include "rfmle/quadrature.hpp"
#include "rfmle/random_fields.hpp"

namespace rfmle {

struct StochIntConfig {
  enum class Method { analytic, finite_difference };

  Method method = Method::analytic;
  // Difference-quotient step, finite_difference mode only.
  double fd_step = 1e-5;
  QuadConfig quad;

  void check() const;
};

/// Reads the observed field the way the integrals see it: exact partials in
/// analytic mode, forward difference quotients of step h otherwise. A step
/// that would leave the simulation rectangle is taken backwards instead.
class Probe {
 public:
  Probe(const Field& z, const StochIntConfig& cfg);

  Jet at(double s, double t) const;
  Field::Column column(double s) const;

  /// Rounding error of the quotients at (s, t): about eps |Z| / h for the
  /// first differences and eps |Z| / h^2 for the mixed one. Zero in analytic
  /// mode.
  Jet noise(double s, double t) const;
  bool exact() const { return cfg_.method == StochIntConfig::Method::analytic; }

 private:
  double step_s(double s) const;
  double step_t(double t) const;

  const Field& z_;
  StochIntConfig cfg_;
  double s_max_;
  double t_max_;
};

namespace detail {

// Absolute tolerance an integrand of the probed field can actually meet.
// Integrands are linear in the jet, so their noise is the weighted sum of the
// quotient noises; the weights are read off unit jets. A panel of width w
// carrying noise e has a Richardson difference of about e w, and panels are
// accepted below 15 tol w / measure, so `scale` is a fraction of the measure.
// The noise itself is a worst-case bound over the sampled points, which keeps
// that fraction small; larger values stop refinement of the domain geometry.
template <class F, class Points>
QuadConfig noise_floor(const Probe& z, const F& f, const Points& points, double scale,
                       QuadConfig quad) {
  if (z.exact()) return quad;
  double worst = 0.0;
  for (const auto& [s, t] : points) {
    const Jet n = z.noise(s, t);
    worst = std::max(worst, magnitude(f(s, t, Jet{0, 1, 0, 0})) * n.d1 +
                                magnitude(f(s, t, Jet{0, 0, 1, 0})) * n.d2 +
                                magnitude(f(s, t, Jet{0, 0, 0, 1})) * n.d12);
  }
  quad.abs_tol = std::max(quad.abs_tol, worst * scale);
  return quad;
}

template <class Map>
std::vector<std::pair<double, double>> sample_line(double lo, double hi, const Map& map) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i <= 16; ++i) pts.push_back(map(lo + (hi - lo) * i / 16.0));
  return pts;
}

std::vector<std::pair<double, double>> sample_area(const ValidatedDomain& domain);

}  // namespace detail

// General forms: the integrand F(s, t, jet) sees the curve point and the
// probed field there, and may return a scalar or an Eigen vector/matrix. In
// finite-difference mode the absolute tolerance is raised to the rounding
// noise of the quotients.

/// int_lo^hi F(s, gamma(s), Z) ds
template <class F>
auto line_s(const Probe& z, const F& f, const Curve& gamma, double lo, double hi,
            const QuadConfig& quad) {
  const auto on_curve = [&](double s) { return std::pair(s, gamma(s)); };
  return integrate_1d(
      [&](double s) {
        const double t = gamma(s);
        return f(s, t, z.at(s, t));
      },
      lo, hi,
      detail::noise_floor(z, f, detail::sample_line(lo, hi, on_curve), 0.02 * std::abs(hi - lo), quad));
}

/// int_lo^hi F(gamma^-1(t), t, Z) dt
template <class F>
auto line_t(const Probe& z, const F& f, const Curve& gamma, double t_lo, double t_hi,
            const QuadConfig& quad) {
  const auto on_curve = [&](double t) { return std::pair(gamma.inverse(t), t); };
  return integrate_1d(
      [&](double t) {
        const double s = gamma.inverse(t);
        return f(s, t, z.at(s, t));
      },
      t_lo, t_hi,
      detail::noise_floor(z, f, detail::sample_line(t_lo, t_hi, on_curve),
                          0.02 * std::abs(t_hi - t_lo), quad));
}

/// iint_G F(s, t, Z) ds dt
template <class F>
auto area(const Probe& z, const F& f, const ValidatedDomain& domain, const QuadConfig& quad) {
  // The inner integrals run ten times tighter than the outer tolerance, so the
  // area floor is ten times the line one to keep them above the noise too.
  const double box = (domain.c() - domain.a()) * (domain.t_max() - domain.t_min());
  return integrate_over_G_columns(
      [&](double s) {
        return [&f, s, col = z.column(s)](double t) { return f(s, t, col(t)); };
      },
      domain, detail::noise_floor(z, f, detail::sample_area(domain), 0.2 * box, quad));
}

using LineWeight = std::function<double(double s, double t)>;
using AreaWeight = std::function<double(double s, double t)>;

// Scalar primitives. Weights take the curve point (s, gamma(s)). They throw
// QuadratureFailure when the quadrature flags max_depth_exceeded.

/// int_lo^hi y Z(ds, gamma(s))
double line_ds(const Field& z, const LineWeight& y, const Curve& gamma, double lo, double hi,
               const StochIntConfig& cfg);
/// int_{t_lo}^{t_hi} y Z(gamma^-1(t), dt)
double line_dt(const Field& z, const LineWeight& y, const Curve& gamma, double t_lo, double t_hi,
               const StochIntConfig& cfg);
/// iint_G y Z(ds, dt)
double area_d1d2(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
                 const StochIntConfig& cfg);
/// iint_G y Z(ds, t) dt
double area_d1(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
               const StochIntConfig& cfg);
/// iint_G y Z(s, dt) ds
double area_d2(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
               const StochIntConfig& cfg);
/// iint_G y Z ds dt
double area_plain(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
                  const StochIntConfig& cfg);

}  // namespace rfmle
