#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rfmle/estimation.hpp"
#include "rfmle/experiment.hpp"
#include "rfmle/geometry.hpp"
#include "rfmle/random_fields.hpp"
#include "rfmle/regressors.hpp"

// JSON and file plumbing. Malformed input throws Error(parse_error), file
// system failures Error(io_error).
namespace rfmle::io {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m);  // row-major nested arrays
json to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const json& j);
Eigen::VectorXd vector_from_json(const json& j);  // null entries read as NaN

// Domain: {"kind":"circle","cx","cy","r"} or {"kind":"curves","a","b1","b2",
// "c","gamma12","gamma1","gamma2","gamma0"} with each arc given as
// {"pieces":[{"lo","hi","coeffs":[c0, c1, ...]}]}.
DomainSpec domain_from_json(const json& j);
json to_json(const DomainSpec& d);

// [{"expr": "s^2+t^2"}, ...]
std::shared_ptr<const RegressorSet> regressors_from_json(const json& j);
json regressors_to_json(const RegressorSet& r);

// {"kind": "wiener" | "ou-stat" | "ou-zero", "alpha", "beta", "sigma"}
FieldModel model_from_json(const json& j);
json to_json(const FieldModel& m);

QuadConfig quad_from_json(const json& j);
json to_json(const QuadConfig& q);
StochIntConfig stoch_from_json(const json& j);
json to_json(const StochIntConfig& c);

json to_json(const EstimationResult& r);

struct AggregateRow {
  int n;
  std::string stat;
  int i;
  int j;
  double value;
};

/// Long-format aggregate table: mean_m_hat (p rows per n), cov_zeta,
/// theory_cov_zeta and cov_m_hat (p(p+1)/2 rows each), used and failed.
std::vector<AggregateRow> aggregate_rows(const ExperimentResult& r);

json aggregate_to_json(const ExperimentResult& r);
json replications_to_json(const ExperimentResult& r);
/// Inverse of the two functions above.
ExperimentResult experiment_result_from_json(const json& aggregate, const json& replications);

/// Everything a command can read from the shared config file.
struct RunConfig {
  DomainSpec domain;
  std::shared_ptr<const RegressorSet> regressors;
  FieldModel model;
  Eigen::VectorXd true_m;
  // simulation
  double S = 8.0;
  double T = 8.0;
  int n = 50;
  double noise_scale = 1.0;
  // experiment
  int replications = 200;
  std::vector<int> n_sweep{25, 50};
  std::uint64_t base_seed = 0;
  int workers = 1;
  // Score quadrature of the Monte Carlo replications; defaults to stoch.quad.
  QuadConfig experiment_quad;
  StochIntConfig stoch;

  ExperimentConfig experiment() const;
};

RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& c);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rfmle::io
