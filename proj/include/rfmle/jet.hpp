#pragma once

#include <cmath>

namespace rfmle {

/// Value of a function of (s, t) with its partials d/ds, d/dt and d2/dsdt.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d12 = 0.0;

  Jet& operator+=(const Jet& o) {
    value += o.value;
    d1 += o.d1;
    d2 += o.d2;
    d12 += o.d12;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator*(double k, const Jet& a) { return {k * a.value, k * a.d1, k * a.d2, k * a.d12}; }
};

/// Chain rule for g(u, v) = 2 sqrt(alpha beta (u+shift)(v+shift)) / sigma * h(s, t)
/// with s = log(u+shift) / (2 alpha), t = log(v+shift) / (2 beta), given the
/// jet of h at (s, t). shift is 0 for the stationary and 1 for the zero-start
/// transform.
inline Jet transform_jet(const Jet& h, double u, double v, double alpha, double beta, double sigma,
                         double shift) {
  const double up = u + shift;
  const double vp = v + shift;
  const double root = std::sqrt(alpha * beta * up * vp);
  Jet g;
  g.value = 2.0 * root / sigma * h.value;
  g.d1 = std::sqrt(beta * vp) / (sigma * std::sqrt(alpha * up)) * (alpha * h.value + h.d1);
  g.d2 = std::sqrt(alpha * up) / (sigma * std::sqrt(beta * vp)) * (beta * h.value + h.d2);
  g.d12 = (alpha * beta * h.value + beta * h.d1 + alpha * h.d2 + h.d12) / (2.0 * sigma * root);
  return g;
}

}  // namespace rfmle
