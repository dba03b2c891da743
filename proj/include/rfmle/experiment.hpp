#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rfmle/geometry.hpp"
#include "rfmle/random_fields.hpp"
#include "rfmle/regressors.hpp"
#include "rfmle/stochastic_integrals.hpp"

namespace rfmle {

struct ExperimentConfig {
  FieldModel model;
  DomainSpec domain;
  std::shared_ptr<const RegressorSet> regressors;
  Eigen::VectorXd true_m;
  int replications = 200;
  std::vector<int> n_sweep{25, 50};
  double S = 8.0;
  double T = 8.0;
  std::uint64_t base_seed = 0;
  // 0 gives the drift-only field.
  double noise_scale = 1.0;
  int workers = 1;
  // stoch.quad drives the score integrals; fisher_quad the Fisher matrix.
  StochIntConfig stoch;
  QuadConfig fisher_quad;
  bool keep_replications = true;

  /// Throws InvalidArgument on N < 2, an empty or unsorted sweep, a size
  /// mismatch between true_m and the regressors, or non-positive S, T.
  void check() const;
};

struct ReplicationRecord {
  int n = 0;
  int replication = 0;
  bool ok = true;
  Eigen::VectorXd m_hat;
  Eigen::VectorXd zeta;
};

struct SweepPoint {
  int n = 0;
  int used = 0;
  int failed = 0;
  Eigen::VectorXd mean_m_hat;
  // Empirical covariance of zeta with the 1/(N-1) normalization.
  Eigen::MatrixXd cov_zeta;
  // Model covariance of zeta: A for Wiener, sigma^2/(alpha beta) A for OU.
  Eigen::MatrixXd theory_cov_zeta;
  // Model covariance of m_hat.
  Eigen::MatrixXd cov_m_hat;

  /// ||cov_zeta - theory||_F / ||theory||_F
  double cov_relative_error() const;
};

struct ExperimentResult {
  std::vector<SweepPoint> points;
  std::vector<ReplicationRecord> replications;  // empty unless kept

  bool operator==(const ExperimentResult& other) const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Seed of replication `index`.
inline std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index) {
  return base_seed ^ index;
}

enum class TableFormat { csv, json };

/// Writes replications.{csv,json} and aggregate.{csv,json} into `dir` and
/// returns the paths written. Aggregate rows are (n, stat, i, j, value) with
/// j = -1 for vector statistics and only i <= j for symmetric matrices.
std::vector<std::string> emit_tables(const ExperimentResult& result, const std::string& dir,
                                     TableFormat format);

}  // namespace rfmle
