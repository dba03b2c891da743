#include "rfmle/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rfmle/error.hpp"

namespace rfmle::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::parse_error, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("'") + key + "': " + e.what());
  }
}

double entry(const json& x) {
  if (x.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!x.is_number()) bad("matrix entries must be numbers");
  return x.get<double>();
}

json scalar(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

Curve curve_from_json(const json& j, const char* name) {
  const json& ps = field(field(j, name), "pieces");
  if (!ps.is_array() || ps.empty()) bad(std::string(name) + ".pieces must be a nonempty array");
  std::vector<PolynomialPiece> pieces;
  for (const json& p : ps) {
    PolynomialPiece piece{number(p, "lo"), number(p, "hi"), {}};
    for (const json& c : field(p, "coeffs")) piece.coeffs.push_back(entry(c));
    pieces.push_back(std::move(piece));
  }
  // Direction from the end values; validate() checks strict monotonicity.
  auto eval = [](const PolynomialPiece& p, double s) {
    double acc = 0.0;
    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * s + *it;
    return acc;
  };
  const double first = eval(pieces.front(), pieces.front().lo);
  const double last = eval(pieces.back(), pieces.back().hi);
  return polynomial_curve(std::move(pieces),
                          last > first ? Curve::Direction::increasing : Curve::Direction::decreasing);
}

json curve_to_json(const Curve& c, const char* name) {
  if (c.pieces().empty())
    throw Error(Errc::invalid_argument, std::string(name) + " is not a polynomial curve");
  json ps = json::array();
  for (const auto& p : c.pieces()) ps.push_back({{"lo", p.lo}, {"hi", p.hi}, {"coeffs", p.coeffs}});
  return {{"pieces", ps}};
}

}  // namespace

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(scalar(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(scalar(v[i]));
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) bad("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) bad("ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = entry(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) bad("vector must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = entry(j[i]);
  return v;
}

DomainSpec domain_from_json(const json& j) {
  const std::string kind = value_or<std::string>(j, "kind", "");
  DomainSpec d;
  if (kind == "circle") {
    d = circle_domain(number(j, "cx"), number(j, "cy"), number(j, "r"));
  } else if (kind == "curves") {
    d.a = number(j, "a");
    d.b1 = number(j, "b1");
    d.b2 = number(j, "b2");
    d.c = number(j, "c");
    d.gamma12 = curve_from_json(j, "gamma12");
    d.gamma1 = curve_from_json(j, "gamma1");
    d.gamma2 = curve_from_json(j, "gamma2");
    d.gamma0 = curve_from_json(j, "gamma0");
  } else {
    bad("domain.kind must be 'circle' or 'curves'");
  }
  d.strip_epsilon = value_or<double>(j, "strip_epsilon", 0.0);
  return d;
}

json to_json(const DomainSpec& d) {
  json out;
  if (d.circle) {
    out = {{"kind", "circle"}, {"cx", d.circle->cx}, {"cy", d.circle->cy}, {"r", d.circle->r}};
  } else {
    out = {{"kind", "curves"},
           {"a", d.a},
           {"b1", d.b1},
           {"b2", d.b2},
           {"c", d.c},
           {"gamma12", curve_to_json(d.gamma12, "gamma12")},
           {"gamma1", curve_to_json(d.gamma1, "gamma1")},
           {"gamma2", curve_to_json(d.gamma2, "gamma2")},
           {"gamma0", curve_to_json(d.gamma0, "gamma0")}};
  }
  if (d.strip_epsilon > 0.0) out["strip_epsilon"] = d.strip_epsilon;
  return out;
}

std::shared_ptr<const RegressorSet> regressors_from_json(const json& j) {
  if (!j.is_array()) bad("regressors must be an array of {\"expr\": ...}");
  std::vector<std::string> texts;
  for (const json& r : j) {
    const json& e = field(r, "expr");
    if (!e.is_string()) bad("regressor expr must be a string");
    texts.push_back(e.get<std::string>());
  }
  return std::make_shared<const RegressorSet>(regressors_from_expressions(texts));
}

json regressors_to_json(const RegressorSet& r) {
  json out = json::array();
  for (const auto& g : r.regressors()) {
    if (g.expression.empty())
      throw Error(Errc::invalid_argument, "regressor has no source expression");
    out.push_back({{"expr", g.expression}});
  }
  return out;
}

FieldModel model_from_json(const json& j) {
  FieldModel m;
  try {
    m.kind = parse_model_kind(value_or<std::string>(j, "kind", "wiener"));
  } catch (const Error& e) {
    bad(e.what());
  }
  m.alpha = value_or<double>(j, "alpha", 1.0);
  m.beta = value_or<double>(j, "beta", 1.0);
  m.sigma = value_or<double>(j, "sigma", 1.0);
  return m;
}

json to_json(const FieldModel& m) {
  return {{"kind", std::string(to_string(m.kind))}, {"alpha", m.alpha}, {"beta", m.beta}, {"sigma", m.sigma}};
}

QuadConfig quad_from_json(const json& j) {
  QuadConfig q;
  q.abs_tol = value_or<double>(j, "abs_tol", q.abs_tol);
  q.rel_tol = value_or<double>(j, "rel_tol", q.rel_tol);
  q.max_depth = value_or<int>(j, "max_depth", q.max_depth);
  q.initial_panels = value_or<int>(j, "initial_panels", q.initial_panels);
  q.max_evaluations = value_or<std::size_t>(j, "max_evaluations", q.max_evaluations);
  if (!(q.abs_tol > 0.0) || !(q.rel_tol > 0.0) || q.max_depth < 1 || q.initial_panels < 1 ||
      q.max_evaluations < 16)
    bad("quadrature settings must be positive");
  return q;
}

json to_json(const QuadConfig& q) {
  return {{"abs_tol", q.abs_tol}, {"rel_tol", q.rel_tol}, {"max_depth", q.max_depth},
          {"initial_panels", q.initial_panels}, {"max_evaluations", q.max_evaluations}};
}

StochIntConfig stoch_from_json(const json& j) {
  StochIntConfig c;
  const std::string method = value_or<std::string>(j, "method", "analytic");
  if (method == "analytic")
    c.method = StochIntConfig::Method::analytic;
  else if (method == "finite_difference")
    c.method = StochIntConfig::Method::finite_difference;
  else
    bad("stochastic.method must be 'analytic' or 'finite_difference'");
  c.fd_step = value_or<double>(j, "fd_step", c.fd_step);
  if (!(c.fd_step > 0.0)) bad("stochastic.fd_step must be > 0");
  return c;
}

json to_json(const StochIntConfig& c) {
  return {{"method", c.method == StochIntConfig::Method::analytic ? "analytic" : "finite_difference"},
          {"fd_step", c.fd_step}};
}

json to_json(const EstimationResult& r) {
  return {{"model", to_json(r.model)},
          {"A", to_json(r.A)},
          {"zeta", to_json(r.zeta)},
          {"m_hat", to_json(r.m_hat)},
          {"covariance", to_json(r.covariance)},
          {"a_inverse", to_json(r.a_inverse)},
          {"diagnostics",
           {{"evaluations", r.diagnostics.evaluations},
            {"error_estimate", r.diagnostics.error_estimate},
            {"depth_limited_error", r.diagnostics.depth_limited_error},
            {"max_depth_exceeded", r.diagnostics.max_depth_exceeded}}}};
}

std::vector<AggregateRow> aggregate_rows(const ExperimentResult& r) {
  std::vector<AggregateRow> rows;
  for (const SweepPoint& pt : r.points) {
    for (Eigen::Index i = 0; i < pt.mean_m_hat.size(); ++i)
      rows.push_back({pt.n, "mean_m_hat", static_cast<int>(i), -1, pt.mean_m_hat[i]});
    auto upper = [&](const char* stat, const Eigen::MatrixXd& m) {
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = i; k < m.cols(); ++k)
          rows.push_back({pt.n, stat, static_cast<int>(i), static_cast<int>(k), m(i, k)});
    };
    upper("cov_zeta", pt.cov_zeta);
    upper("theory_cov_zeta", pt.theory_cov_zeta);
    upper("cov_m_hat", pt.cov_m_hat);
    rows.push_back({pt.n, "used", -1, -1, static_cast<double>(pt.used)});
    rows.push_back({pt.n, "failed", -1, -1, static_cast<double>(pt.failed)});
  }
  return rows;
}

json aggregate_to_json(const ExperimentResult& r) {
  json pts = json::array();
  for (const SweepPoint& pt : r.points) {
    pts.push_back({{"n", pt.n},
                   {"used", pt.used},
                   {"failed", pt.failed},
                   {"mean_m_hat", to_json(pt.mean_m_hat)},
                   {"cov_zeta", to_json(pt.cov_zeta)},
                   {"theory_cov_zeta", to_json(pt.theory_cov_zeta)},
                   {"cov_m_hat", to_json(pt.cov_m_hat)},
                   {"cov_relative_error", scalar(pt.cov_relative_error())}});
  }
  json rows = json::array();
  for (const auto& row : aggregate_rows(r))
    rows.push_back({{"n", row.n}, {"stat", row.stat}, {"i", row.i}, {"j", row.j}, {"value", row.value}});
  return {{"points", pts}, {"rows", rows}};
}

json replications_to_json(const ExperimentResult& r) {
  json out = json::array();
  for (const auto& rec : r.replications) {
    out.push_back({{"n", rec.n},
                   {"replication", rec.replication},
                   {"ok", rec.ok},
                   {"m_hat", to_json(rec.m_hat)},
                   {"zeta", to_json(rec.zeta)}});
  }
  return out;
}

ExperimentResult experiment_result_from_json(const json& aggregate, const json& replications) {
  ExperimentResult r;
  try {
    for (const json& p : field(aggregate, "points")) {
      SweepPoint pt;
      pt.n = p.at("n").get<int>();
      pt.used = p.at("used").get<int>();
      pt.failed = p.at("failed").get<int>();
      pt.mean_m_hat = vector_from_json(p.at("mean_m_hat"));
      pt.cov_zeta = matrix_from_json(p.at("cov_zeta"));
      pt.theory_cov_zeta = matrix_from_json(p.at("theory_cov_zeta"));
      pt.cov_m_hat = matrix_from_json(p.at("cov_m_hat"));
      r.points.push_back(std::move(pt));
    }
    if (!replications.is_array()) bad("replications must be an array");
    for (const json& j : replications) {
      ReplicationRecord rec;
      rec.n = j.at("n").get<int>();
      rec.replication = j.at("replication").get<int>();
      rec.ok = j.at("ok").get<bool>();
      rec.m_hat = vector_from_json(j.at("m_hat"));
      rec.zeta = vector_from_json(j.at("zeta"));
      r.replications.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  return r;
}

ExperimentConfig RunConfig::experiment() const {
  ExperimentConfig e;
  e.model = model;
  e.domain = domain;
  e.regressors = regressors;
  e.true_m = true_m;
  e.replications = replications;
  e.n_sweep = n_sweep;
  e.S = S;
  e.T = T;
  e.base_seed = base_seed;
  e.noise_scale = noise_scale;
  e.workers = workers;
  e.stoch = stoch;
  e.stoch.quad = experiment_quad;
  e.fisher_quad = stoch.quad;
  return e;
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  RunConfig c;
  c.domain = domain_from_json(field(j, "domain"));
  c.regressors = regressors_from_json(field(j, "regressors"));
  c.model = model_from_json(j.value("model", json::object()));
  if (j.contains("true_m")) {
    c.true_m = vector_from_json(j.at("true_m"));
  } else {
    c.true_m = Eigen::VectorXd::Zero(c.regressors->size());
  }
  if (c.true_m.size() != c.regressors->size()) bad("true_m must have one entry per regressor");
  if (!c.true_m.allFinite()) bad("true_m entries must be finite");

  const json sim = j.value("simulation", json::object());
  c.S = value_or<double>(sim, "S", c.S);
  c.T = value_or<double>(sim, "T", c.T);
  c.n = value_or<int>(sim, "n", c.n);
  c.noise_scale = value_or<double>(sim, "noise_scale", c.noise_scale);
  if (!(c.S > 0.0) || !(c.T > 0.0) || c.n < 1) bad("simulation needs S, T > 0 and n >= 1");

  const json ex = j.value("experiment", json::object());
  c.replications = value_or<int>(ex, "replications", c.replications);
  c.n_sweep = value_or<std::vector<int>>(ex, "n_sweep", c.n_sweep);
  c.base_seed = value_or<std::uint64_t>(ex, "base_seed", c.base_seed);
  c.workers = value_or<int>(ex, "workers", c.workers);

  c.stoch = stoch_from_json(j.value("stochastic", json::object()));
  const json quad = j.value("quadrature", json::object());
  c.stoch.quad = quad_from_json(quad);
  c.experiment_quad = ex.contains("score_quadrature") ? quad_from_json(ex.at("score_quadrature")) : c.stoch.quad;
  return c;
}

json to_json(const RunConfig& c) {
  return {{"domain", to_json(c.domain)},
          {"regressors", regressors_to_json(*c.regressors)},
          {"model", to_json(c.model)},
          {"true_m", to_json(c.true_m)},
          {"simulation", {{"S", c.S}, {"T", c.T}, {"n", c.n}, {"noise_scale", c.noise_scale}}},
          {"experiment",
           {{"replications", c.replications},
            {"n_sweep", c.n_sweep},
            {"base_seed", c.base_seed},
            {"workers", c.workers},
            {"score_quadrature", to_json(c.experiment_quad)}}},
          {"stochastic", to_json(c.stoch)},
          {"quadrature", to_json(c.stoch.quad)}};
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(path + ": " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

}  // namespace rfmle::io
