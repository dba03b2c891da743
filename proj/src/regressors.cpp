#include "rfmle/regressors.hpp"

#include <cmath>
#include <sstream>

#include "rfmle/error.hpp"
#include "rfmle/expression.hpp"

namespace rfmle {

RegressorJets RegressorSet::jets(double s, double t) const {
  const Eigen::Index p = size();
  RegressorJets out{Eigen::VectorXd(p), Eigen::VectorXd(p), Eigen::VectorXd(p), Eigen::VectorXd(p)};
  for (Eigen::Index k = 0; k < p; ++k) {
    const Jet j = regressors_[static_cast<std::size_t>(k)].jet(s, t);
    out.value[k] = j.value;
    out.d1[k] = j.d1;
    out.d2[k] = j.d2;
    out.d12[k] = j.d12;
  }
  return out;
}

Jet RegressorSet::combine(const Eigen::VectorXd& m, double s, double t) const {
  if (m.size() != size()) throw Error(Errc::invalid_argument, "parameter vector size mismatch");
  Jet acc;
  for (int k = 0; k < size(); ++k) acc += m[k] * regressors_[static_cast<std::size_t>(k)].jet(s, t);
  return acc;
}

RegressorSet polynomial_example_basis() {
  std::vector<Regressor> rs;
  rs.push_back({[](double s, double t) { return Jet{s * s + t * t, 2.0 * s, 2.0 * t, 0.0}; }, "s^2+t^2"});
  rs.push_back({[](double s, double t) { return Jet{s + t, 1.0, 1.0, 0.0}; }, "s+t"});
  rs.push_back({[](double s, double t) { return Jet{s * t, t, s, 1.0}; }, "s*t"});
  return RegressorSet(std::move(rs));
}

Regressor expression_regressor(const std::string& text) {
  const expr::Expr f = expr::parse(text);
  const expr::Expr fs = expr::derivative(f, expr::Var::s);
  const expr::Expr ft = expr::derivative(f, expr::Var::t);
  const expr::Expr fst = expr::derivative(fs, expr::Var::t);
  return {[=](double s, double t) { return Jet{f(s, t), fs(s, t), ft(s, t), fst(s, t)}; }, text};
}

RegressorSet regressors_from_expressions(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(Errc::invalid_argument, "at least one regressor is required");
  std::vector<Regressor> rs;
  rs.reserve(texts.size());
  for (const auto& text : texts) rs.push_back(expression_regressor(text));
  return RegressorSet(std::move(rs));
}

Regressor finite_difference_regressor(std::function<double(double, double)> value, double h) {
  if (!(h > 0.0)) throw Error(Errc::invalid_argument, "finite-difference step must be > 0");
  return {[value = std::move(value), h](double s, double t) {
            const double inv = 1.0 / (2.0 * h);
            Jet j;
            j.value = value(s, t);
            j.d1 = (value(s + h, t) - value(s - h, t)) * inv;
            j.d2 = (value(s, t + h) - value(s, t - h)) * inv;
            j.d12 = (value(s + h, t + h) - value(s + h, t - h) - value(s - h, t + h) +
                     value(s - h, t - h)) *
                    inv * inv;
            return j;
          },
          std::string{}};
}

RegressorSet transform_regressors(const RegressorSet& h, double alpha, double beta, double sigma,
                                  TransformMode mode) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(sigma > 0.0))
    throw Error(Errc::invalid_argument, "transform_regressors requires alpha, beta, sigma > 0");
  const double shift = mode == TransformMode::zero_start ? 1.0 : 0.0;
  std::vector<Regressor> out;
  out.reserve(h.regressors().size());
  for (const Regressor& src : h.regressors()) {
    out.push_back({[src, alpha, beta, sigma, shift](double u, double v) {
                     if (!(u + shift > 0.0) || !(v + shift > 0.0)) {
                       std::ostringstream os;
                       os << "(u, v) = (" << u << ", " << v << ")";
                       throw Error(Errc::non_positive_coordinate, os.str());
                     }
                     const double s = std::log(u + shift) / (2.0 * alpha);
                     const double t = std::log(v + shift) / (2.0 * beta);
                     return transform_jet(src.jet(s, t), u, v, alpha, beta, sigma, shift);
                   },
                   std::string{}});
  }
  return RegressorSet(std::move(out));
}

}  // namespace rfmle
