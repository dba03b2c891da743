#include "rfmle/stochastic_integrals.hpp"

#include <cmath>
#include <limits>

#include "rfmle/error.hpp"

namespace rfmle {

void StochIntConfig::check() const {
  if (!(fd_step > 0.0)) throw Error(Errc::invalid_argument, "fd_step must be > 0");
  if (!(quad.abs_tol > 0.0) || !(quad.rel_tol > 0.0))
    throw Error(Errc::invalid_argument, "quadrature tolerances must be > 0");
}

Probe::Probe(const Field& z, const StochIntConfig& cfg)
    : z_(z), cfg_(cfg), s_max_(z.s_extent()), t_max_(z.t_extent()) {
  cfg_.check();
}

double Probe::step_s(double s) const { return s + cfg_.fd_step <= s_max_ ? cfg_.fd_step : -cfg_.fd_step; }
double Probe::step_t(double t) const { return t + cfg_.fd_step <= t_max_ ? cfg_.fd_step : -cfg_.fd_step; }

Jet Probe::at(double s, double t) const {
  if (cfg_.method == StochIntConfig::Method::analytic) return z_.jet(s, t);
  const double hs = step_s(s), ht = step_t(t);
  const double z00 = z_(s, t);
  const double z10 = z_(s + hs, t);
  const double z01 = z_(s, t + ht);
  const double z11 = z_(s + hs, t + ht);
  return {z00, (z10 - z00) / hs, (z01 - z00) / ht, (z11 - z10 - z01 + z00) / (hs * ht)};
}

Jet Probe::noise(double s, double t) const {
  if (exact()) return {};
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double h = cfg_.fd_step;
  const double z = std::abs(z_(s, t));
  return {0.0, 2 * eps * z / h, 2 * eps * z / h, 4 * eps * z / (h * h)};
}

Field::Column Probe::column(double s) const {
  if (cfg_.method == StochIntConfig::Method::analytic) return z_.column(s);
  const double hs = step_s(s);
  return [this, hs, c0 = z_.column(s), c1 = z_.column(s + hs)](double t) {
    const double ht = step_t(t);
    const double z00 = c0(t).value;
    const double z10 = c1(t).value;
    const double z01 = c0(t + ht).value;
    const double z11 = c1(t + ht).value;
    return Jet{z00, (z10 - z00) / hs, (z01 - z00) / ht, (z11 - z10 - z01 + z00) / (hs * ht)};
  };
}

namespace detail {

std::vector<std::pair<double, double>> sample_area(const ValidatedDomain& domain) {
  std::vector<std::pair<double, double>> pts;
  for (const Strip& strip : domain.strips())
    for (int i = 0; i <= 4; ++i) {
      const double s = strip.s_lo + (strip.s_hi - strip.s_lo) * i / 4.0;
      const double lo = (*strip.lower)(s), hi = (*strip.upper)(s);
      for (int j = 0; j <= 4; ++j) pts.emplace_back(s, lo + (hi - lo) * j / 4.0);
    }
  return pts;
}

}  // namespace detail

namespace {

double checked(const QuadResult<double>& r, const char* what) {
  if (r.diagnostics.max_depth_exceeded)
    throw Error(Errc::quadrature_failure, std::string(what) + ": maximum recursion depth exceeded");
  return r.value;
}

template <class Pick>
double area_with(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
                 const StochIntConfig& cfg, Pick pick, const char* what) {
  const Probe probe(z, cfg);
  return checked(area(probe, [&](double s, double t, const Jet& j) { return y(s, t) * pick(j); },
                      domain, cfg.quad),
                 what);
}

}  // namespace

double line_ds(const Field& z, const LineWeight& y, const Curve& gamma, double lo, double hi,
               const StochIntConfig& cfg) {
  const Probe probe(z, cfg);
  return checked(
      line_s(probe, [&](double s, double t, const Jet& j) { return y(s, t) * j.d1; }, gamma, lo, hi,
             cfg.quad),
      "line_ds");
}

double line_dt(const Field& z, const LineWeight& y, const Curve& gamma, double t_lo, double t_hi,
               const StochIntConfig& cfg) {
  const Probe probe(z, cfg);
  return checked(
      line_t(probe, [&](double s, double t, const Jet& j) { return y(s, t) * j.d2; }, gamma, t_lo,
             t_hi, cfg.quad),
      "line_dt");
}

double area_d1d2(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
                 const StochIntConfig& cfg) {
  return area_with(z, y, domain, cfg, [](const Jet& j) { return j.d12; }, "area_d1d2");
}

double area_d1(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
               const StochIntConfig& cfg) {
  return area_with(z, y, domain, cfg, [](const Jet& j) { return j.d1; }, "area_d1");
}

double area_d2(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
               const StochIntConfig& cfg) {
  return area_with(z, y, domain, cfg, [](const Jet& j) { return j.d2; }, "area_d2");
}

double area_plain(const Field& z, const AreaWeight& y, const ValidatedDomain& domain,
                  const StochIntConfig& cfg) {
  return area_with(z, y, domain, cfg, [](const Jet& j) { return j.value; }, "area_plain");
}

}  // namespace rfmle
