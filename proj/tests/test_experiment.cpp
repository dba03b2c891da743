#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include "rfmle/error.hpp"
#include "rfmle/experiment.hpp"

using namespace rfmle;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.model = FieldModel::stationary_ou(1, 1, 1);
  cfg.domain = circle_domain(2, 2, 1);
  cfg.regressors = std::make_shared<const RegressorSet>(polynomial_example_basis());
  cfg.true_m = Eigen::Vector3d(5, 8, 3);
  cfg.replications = 6;
  cfg.n_sweep = {4, 8};
  cfg.S = 3;
  cfg.T = 3;
  cfg.base_seed = 77;
  cfg.stoch.quad.rel_tol = 1e-5;
  cfg.stoch.quad.abs_tol = 1e-6;
  return cfg;
}

int count_lines(const std::string& path) {
  std::ifstream in(path);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rfmle_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("aggregates and replication records") {
  const ExperimentResult r = run_experiment(small_config());
  REQUIRE(r.points.size() == 2);
  CHECK(r.replications.size() == 12);
  for (const SweepPoint& p : r.points) {
    CHECK(p.used + p.failed == 6);
    CHECK(p.cov_zeta.isApprox(p.cov_zeta.transpose()));
    CHECK(p.theory_cov_zeta.rows() == 3);
  }
  CHECK(r.replications[7].n == 8);
  CHECK(r.replications[7].replication == 1);
}

TEST_CASE("worker count does not change the result") {
  ExperimentConfig cfg = small_config();
  const ExperimentResult one = run_experiment(cfg);
  cfg.workers = 4;
  CHECK(run_experiment(cfg) == one);
  cfg.base_seed = 78;
  CHECK_FALSE(run_experiment(cfg) == one);
}

TEST_CASE("zero noise recovers the drift parameters") {
  ExperimentConfig cfg = small_config();
  cfg.noise_scale = 0.0;
  // m_hat is as accurate as the score quadrature.
  cfg.stoch = StochIntConfig{};
  cfg.n_sweep = {1};
  cfg.replications = 2;
  const ExperimentResult r = run_experiment(cfg);
  for (const auto& rec : r.replications) CHECK((rec.m_hat - cfg.true_m).norm() <= 1e-6);
  // Identical replications: zero spread.
  CHECK(r.points[0].cov_zeta.norm() == 0.0);
}

TEST_CASE("table rows") {
  const ExperimentResult r = run_experiment(small_config());
  const fs::path dir = scratch_dir("tables");
  const auto csv = emit_tables(r, dir.string(), TableFormat::csv);
  REQUIRE(csv.size() == 2);
  // 2 n x 6 replications x 3 parameters.
  CHECK(count_lines((dir / "replications.csv").string()) == 1 + 36);
  // Per n: 3 means, 3 x 6 upper-triangle entries, used, failed.
  CHECK(count_lines((dir / "aggregate.csv").string()) == 1 + 2 * (3 + 18 + 2));
  const auto json = emit_tables(r, dir.string(), TableFormat::json);
  CHECK(fs::exists(dir / "aggregate.json"));
  CHECK(fs::exists(dir / "replications.json"));
  fs::remove_all(dir);
}

TEST_CASE("configuration checks") {
  ExperimentConfig cfg = small_config();
  cfg.replications = 1;
  CHECK_THROWS_AS(run_experiment(cfg), Error);
  cfg = small_config();
  cfg.n_sweep = {8, 4};
  CHECK_THROWS_AS(run_experiment(cfg), Error);
  cfg = small_config();
  cfg.true_m = Eigen::Vector2d(1, 2);
  CHECK_THROWS_AS(run_experiment(cfg), Error);
}

TEST_CASE("minimal N = 2 run") {
  ExperimentConfig cfg = small_config();
  cfg.replications = 2;
  cfg.n_sweep = {3};
  const ExperimentResult r = run_experiment(cfg);
  CHECK(r.points[0].used == 2);
  CHECK(r.points[0].cov_zeta.allFinite());
}
