#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include "rfmle/geometry.hpp"

namespace rfmle {

struct QuadConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-7;
  int max_depth = 40;
  // The interval is first cut into this many Simpson panels so that an
  // oscillating integrand cannot alias the first three-point estimate.
  int initial_panels = 8;
  // Work limit of one 1D integral. Once spent, open panels are accepted as if
  // they had reached max_depth, so an integrand that never settles (rounding
  // noise in difference quotients) cannot recurse 2^max_depth times.
  std::size_t max_evaluations = 20000;
};

struct QuadDiagnostics {
  std::size_t evaluations = 0;
  // Sum of Richardson error estimates over accepted panels.
  double error_estimate = 0.0;
  // Error accumulated on panels accepted only because max_depth was reached.
  double depth_limited_error = 0.0;
  // Set when depth_limited_error exceeds the requested tolerance.
  bool max_depth_exceeded = false;

  QuadDiagnostics& operator+=(const QuadDiagnostics& other) {
    evaluations += other.evaluations;
    error_estimate += other.error_estimate;
    depth_limited_error += other.depth_limited_error;
    max_depth_exceeded = max_depth_exceeded || other.max_depth_exceeded;
    return *this;
  }
};

template <class T>
struct QuadResult {
  T value;
  QuadDiagnostics diagnostics;
};

/// Largest absolute component; the error norm for vector and matrix valued
/// integrands.
inline double magnitude(double x) { return std::abs(x); }

template <class Derived>
double magnitude(const Eigen::DenseBase<Derived>& x) {
  return x.size() == 0 ? 0.0 : x.derived().cwiseAbs().maxCoeff();
}

namespace detail {

// Concrete value type for an integrand result (Eigen expressions decay to
// their plain matrix type).
template <class X, class = void>
struct plain {
  using type = X;
};
template <class X>
struct plain<X, std::void_t<typename X::PlainObject>> {
  using type = typename X::PlainObject;
};
template <class X>
using plain_t = typename plain<std::decay_t<X>>::type;

template <class T, class F>
struct SimpsonRecursion {
  const F& f;
  int max_depth;
  std::size_t max_evaluations;
  QuadDiagnostics& diag;
  double global_tol;

  T eval(double x) {
    ++diag.evaluations;
    return T(f(x));
  }

  // Integrates over [a, b] given f(a), f(mid), f(b) and the whole-panel
  // Simpson estimate.
  T run(double a, double b, const T& fa, const T& fm, const T& fb, const T& whole, double tol,
        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = eval(lm);
    const T frm = eval(rm);
    const double h = (b - a) / 12.0;
    const T left = h * (fa + 4.0 * flm + fm);
    const T right = h * (fm + 4.0 * frm + fb);
    const T delta = left + right - whole;
    const double err = magnitude(delta);
    if (err <= 15.0 * tol || depth >= max_depth || diag.evaluations >= max_evaluations ||
        !(lm > a) || !(b > rm)) {
      diag.error_estimate += err / 15.0;
      if (err > 15.0 * tol) {
        diag.depth_limited_error += err / 15.0;
        if (diag.depth_limited_error > global_tol) diag.max_depth_exceeded = true;
      }
      return T(left + right + delta / 15.0);
    }
    return T(run(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             run(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1));
  }
};

}  // namespace detail

/// Recursive adaptive Simpson quadrature of f over [lo, hi].
///
/// A panel is accepted when |S_left + S_right - S_whole| <= 15 tol, with
/// tol = max(abs_tol, rel_tol |I_coarse|, rounding level) split in half at
/// each level, and the Richardson correction is added. T is double or an Eigen dense type.
template <class F>
auto integrate_1d(const F& f, double lo, double hi, const QuadConfig& cfg = {}) {
  using T = detail::plain_t<decltype(f(lo))>;
  QuadResult<T> result{T(f(lo)), {}};
  result.diagnostics.evaluations = 1;
  if (lo == hi) {
    result.value = T(0.0 * result.value);
    return result;
  }
  const int panels = std::max(1, cfg.initial_panels);
  const double width = (hi - lo) / panels;

  // Coarse pass over the initial panels to fix the tolerance.
  std::vector<double> x(2 * panels + 1);
  for (int i = 0; i <= 2 * panels; ++i) x[i] = lo + 0.5 * width * i;
  x.back() = hi;
  std::vector<T> fx;
  fx.reserve(x.size());
  fx.push_back(result.value);
  for (std::size_t i = 1; i < x.size(); ++i) fx.push_back(T(f(x[i])));
  result.diagnostics.evaluations = x.size();

  std::vector<T> whole;
  whole.reserve(panels);
  T coarse = T(0.0 * fx[0]);
  for (int p = 0; p < panels; ++p) {
    const double a = x[2 * p];
    const double b = x[2 * p + 2];
    whole.push_back(T((b - a) / 6.0 * (fx[2 * p] + 4.0 * fx[2 * p + 1] + fx[2 * p + 2])));
    coarse = T(coarse + whole.back());
  }
  // Simpson differences of a cancelling integrand bottom out at rounding of
  // the samples, so the tolerance never goes below that level.
  double largest = 0.0;
  for (const T& v : fx) largest = std::max(largest, magnitude(v));
  const double rounding = 16.0 * std::numeric_limits<double>::epsilon() * largest * std::abs(hi - lo);
  const double tol = std::max({cfg.abs_tol, cfg.rel_tol * magnitude(coarse), rounding});

  detail::SimpsonRecursion<T, F> rec{f, cfg.max_depth, cfg.max_evaluations, result.diagnostics, tol};
  T total = T(0.0 * fx[0]);
  for (int p = 0; p < panels; ++p) {
    total = T(total + rec.run(x[2 * p], x[2 * p + 2], fx[2 * p], fx[2 * p + 1], fx[2 * p + 2],
                              whole[p], tol / panels, 1));
  }
  result.value = std::move(total);
  return result;
}

/// Iterated integral over G: outer in s across the strips G1, G2, G3, inner in
/// t between the lower and upper arcs of the strip.
///
/// `column(s)` returns a callable t -> value; this lets an integrand hoist
/// work that only depends on s out of the inner loop.
template <class ColumnFactory>
auto integrate_over_G_columns(const ColumnFactory& column, const ValidatedDomain& domain,
                              const QuadConfig& cfg = {}) {
  using Column = std::decay_t<decltype(column(domain.a()))>;
  using T = detail::plain_t<decltype(std::declval<const Column&>()(0.0))>;

  // Inner integrals are solved more tightly than the outer so that their
  // error does not look like roughness to the outer recursion.
  QuadConfig inner_cfg = cfg;
  inner_cfg.abs_tol = cfg.abs_tol / (10.0 * std::max(1.0, domain.c() - domain.a()));
  inner_cfg.rel_tol = cfg.rel_tol / 10.0;
  inner_cfg.initial_panels = std::max(2, cfg.initial_panels / 2);

  QuadDiagnostics inner_diag;
  QuadResult<T> total{};
  bool first = true;
  for (const Strip& strip : domain.strips()) {
    auto outer = [&](double s) -> T {
      const Column col = column(s);
      auto r = integrate_1d(col, (*strip.lower)(s), (*strip.upper)(s), inner_cfg);
      inner_diag += r.diagnostics;
      return r.value;
    };
    auto piece = integrate_1d(outer, strip.s_lo, strip.s_hi, cfg);
    if (first) {
      total = std::move(piece);
      first = false;
    } else {
      total.value = T(total.value + piece.value);
      total.diagnostics += piece.diagnostics;
    }
  }
  total.diagnostics += inner_diag;
  return total;
}

/// Iterated integral of f(s, t) over G.
template <class F>
auto integrate_over_G(const F& f, const ValidatedDomain& domain, const QuadConfig& cfg = {}) {
  return integrate_over_G_columns(
      [&f](double s) { return [&f, s](double t) { return f(s, t); }; }, domain, cfg);
}

}  // namespace rfmle
