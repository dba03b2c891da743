#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "rfmle/cli.hpp"
#include "rfmle/io.hpp"

using namespace rfmle;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = RFMLE_CONFIG_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rfmle_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write_config(const fs::path& dir, const json& config) {
  const std::string path = (dir / "config.json").string();
  io::write_text_file(path, config.dump(2));
  return path;
}

json example(const std::string& name) { return io::read_json_file(kConfigs + "/" + name); }

void check_manifest(const fs::path& dir, const std::string& command) {
  const json m = io::read_json_file((dir / "manifest.json").string());
  CHECK(m.at("command") == command);
  CHECK(m.contains("tool_version"));
  CHECK(m.contains("wall_time_seconds"));
  for (const json& o : m.at("outputs"))
    CHECK(o.at("sha256") == cli::sha256_file((dir / o.at("path").get<std::string>()).string()));
}

}  // namespace

TEST_CASE("sha256 of a known file") {
  const fs::path dir = scratch_dir("sha");
  io::write_text_file((dir / "abc").string(), "abc");
  CHECK(cli::sha256_file((dir / "abc").string()) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("domain-check exit codes") {
  const fs::path dir = scratch_dir("domain");
  const Outcome ok = run({"domain-check", "--config", kConfigs + "/example_wiener.json", "--out", dir.string()});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("domain: valid") != std::string::npos);
  check_manifest(dir, "domain-check");

  json bad = example("example_wiener.json");
  bad["domain"] = {{"kind", "circle"}, {"cx", 1}, {"cy", 1}, {"r", 2}};
  const Outcome invalid = run({"domain-check", "--config", write_config(dir, bad), "--out", dir.string()});
  CHECK(invalid.code == cli::kDomainFailure);
  CHECK(invalid.out.find("CircleNotInPositiveQuadrant") != std::string::npos);

  io::write_text_file((dir / "broken.json").string(), "{\"domain\": ");
  CHECK(run({"domain-check", "--config", (dir / "broken.json").string(), "--out", dir.string()}).code ==
        cli::kUsageError);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kUsageError);
  CHECK(run({"fisher"}).code == cli::kUsageError);
  CHECK(run({"fisher", "--config", kConfigs + "/example_wiener.json", "--model", "brownian"}).code ==
        cli::kUsageError);
  CHECK(run({"frobnicate"}).code == cli::kUsageError);
  const fs::path dir = scratch_dir("usage");
  CHECK(run({"estimate", "--config", kConfigs + "/example_wiener.json", "--out", dir.string()}).code ==
        cli::kUsageError);
  CHECK(run({"estimate", "--config", kConfigs + "/example_wiener.json", "--out", dir.string(),
             "--field", (dir / "missing.csv").string()})
            .code == cli::kUsageError);
}

TEST_CASE("fisher writes the matrix") {
  const fs::path dir = scratch_dir("fisher");
  const Outcome r = run({"fisher", "--config", kConfigs + "/example_wiener.json", "--out", dir.string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("condition number") != std::string::npos);
  CHECK(r.err.empty());
  const Eigen::MatrixXd A = io::matrix_from_json(io::read_json_file((dir / "fisher.json").string()).at("A"));
  CHECK(A(0, 0) == doctest::Approx(339.0895).epsilon(2e-6));
  CHECK(A(1, 2) == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(fs::exists(dir / "fisher.csv"));
  check_manifest(dir, "fisher");

  json dup = example("example_wiener.json");
  dup["regressors"] = json::array({{{"expr", "s*t"}}, {{"expr", "s*t"}}});
  dup["true_m"] = {1, 1};
  const Outcome w = run({"fisher", "--config", write_config(dir, dup), "--out", dir.string()});
  CHECK(w.code == cli::kOk);
  CHECK(w.err.find("condition number above threshold") != std::string::npos);
}

TEST_CASE("estimate from a simulation and from a grid") {
  const fs::path dir = scratch_dir("estimate");
  json cfg = example("example_wiener.json");
  cfg["simulation"]["noise_scale"] = 0.0;
  const std::string config = write_config(dir, cfg);
  const Outcome sim = run({"estimate", "--config", config, "--simulate", "5", "--out", dir.string(),
                           "--dump-grid", "400"});
  REQUIRE(sim.code == cli::kOk);
  const json est = io::read_json_file((dir / "estimate.json").string());
  const Eigen::VectorXd m = io::vector_from_json(est.at("m_hat"));
  // Exact up to the default quadrature tolerance (rel 1e-7).
  CHECK((m - Eigen::Vector3d(5, 8, 3)).norm() <= 1e-6);
  check_manifest(dir, "estimate");

  const fs::path grid_dir = dir / "grid";
  const Outcome grid = run({"estimate", "--config", config, "--field", (dir / "field.csv").string(),
                            "--out", grid_dir.string()});
  REQUIRE(grid.code == cli::kOk);
  const Eigen::VectorXd mg =
      io::vector_from_json(io::read_json_file((grid_dir / "estimate.json").string()).at("m_hat"));
  CHECK((mg - Eigen::Vector3d(5, 8, 3)).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("minimal experiment is reproducible") {
  json cfg = example("example_ou_stat.json");
  cfg["experiment"]["replications"] = 2;
  cfg["experiment"]["n_sweep"] = {3, 5};
  const fs::path a = scratch_dir("exp_a"), b = scratch_dir("exp_b");
  const std::string config = write_config(a, cfg);
  REQUIRE(run({"experiment", "--config", config, "--out", a.string()}).code == cli::kOk);
  REQUIRE(run({"experiment", "--config", config, "--out", b.string()}).code == cli::kOk);
  check_manifest(a, "experiment");
  const json ma = io::read_json_file((a / "manifest.json").string());
  const json mb = io::read_json_file((b / "manifest.json").string());
  CHECK(ma.at("outputs") == mb.at("outputs"));
  CHECK(ma.at("outputs").size() == 5);
  CHECK(fs::exists(a / "band_check.json"));
  const json agg = io::read_json_file((a / "aggregate.json").string());
  CHECK(agg.at("points").size() == 2);
}
