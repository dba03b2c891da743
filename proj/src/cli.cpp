#include "rfmle/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "rfmle/error.hpp"
#include "rfmle/estimation.hpp"
#include "rfmle/experiment.hpp"
#include "rfmle/grid_field.hpp"
#include "rfmle/io.hpp"

#ifndef RFMLE_VERSION
#define RFMLE_VERSION "0.0.0"
#endif

namespace rfmle::cli {

namespace fs = std::filesystem;
using io::json;

std::string sha256_file(const std::string& path) {
  const std::string bytes = io::read_text_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::io_error, "SHA-256 failed for '" + path + "'");
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

namespace {

constexpr double kConditionWarning = 1e10;

struct Options {
  std::string config;
  std::string model;
  std::string out = "rfmle-out";
  std::string field;
  std::string profile;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> simulate;
  std::optional<int> workers;
  int dump_grid = 0;
};

// Collects output files and writes the run manifest last.
class Run {
 public:
  Run(std::string command, const Options& opt, std::vector<std::string> args)
      : command_(std::move(command)), dir_(opt.out), args_(std::move(args)),
        start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(Errc::io_error, "cannot create '" + dir_.string() + "': " + ec.message());
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& content) {
    io::write_text_file(path(name), content);
    outputs_.push_back(name);
  }
  void adopt(const std::string& full_path) { outputs_.push_back(fs::path(full_path).filename().string()); }

  void set_config(json config) { config_ = std::move(config); }

  void finish() {
    json outputs = json::array();
    for (const auto& name : outputs_) outputs.push_back({{"path", name}, {"sha256", sha256_file(path(name))}});
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const json manifest = {{"command", command_},       {"tool_version", RFMLE_VERSION},
                           {"arguments", args_},        {"config", config_},
                           {"wall_time_seconds", wall}, {"outputs", outputs}};
    io::write_text_file(path("manifest.json"), manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path dir_;
  std::vector<std::string> args_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
  json config_ = json::object();
};

std::string format_matrix(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) os << "  " << std::setw(12) << m(i, k);
    os << '\n';
  }
  return os.str();
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << std::setprecision(17) << "i,j,value\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) os << i << ',' << k << ',' << m(i, k) << '\n';
  return os.str();
}

io::RunConfig load_config(const Options& opt) {
  io::RunConfig cfg = io::run_config_from_json(io::read_json_file(opt.config));
  if (!opt.model.empty()) cfg.model.kind = parse_model_kind(opt.model);
  if (opt.seed) cfg.base_seed = *opt.seed;
  if (opt.workers) cfg.workers = *opt.workers;
  return cfg;
}

int cmd_domain_check(const Options& opt, const std::vector<std::string>& args, std::ostream& out) {
  const json config = io::read_json_file(opt.config);
  if (!config.is_object() || !config.contains("domain"))
    throw Error(Errc::parse_error, "config has no 'domain' section");
  Run run("domain-check", opt, args);
  run.set_config({{"domain", config.at("domain")}});
  std::ostringstream report;
  int code = kOk;
  try {
    const ValidatedDomain d = validate(io::domain_from_json(config.at("domain")));
    const auto area = integrate_over_G([](double, double) { return 1.0; }, d);
    report << std::setprecision(10) << "domain: valid\n"
           << "breakpoints: a=" << d.a() << " b1=" << d.b1() << " b2=" << d.b2() << " c=" << d.c() << '\n'
           << "t range: [" << d.t_min() << ", " << d.t_max() << "]\n"
           << "strip epsilon: " << d.strip_epsilon() << '\n'
           << "area: " << area.value << '\n';
  } catch (const Error& e) {
    if (e.code() == Errc::parse_error || e.code() == Errc::io_error) throw;
    report << "domain: invalid\n" << to_string(e.code()) << '\n' << e.what() << '\n';
    code = kDomainFailure;
  }
  out << report.str();
  run.write("domain_check.txt", report.str());
  run.finish();
  return code;
}

int cmd_fisher(const Options& opt, const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  const io::RunConfig cfg = load_config(opt);
  Run run("fisher", opt, args);
  run.set_config(io::to_json(cfg));
  const ValidatedDomain d = validate(cfg.domain);
  const auto A = fisher(cfg.model, d, *cfg.regressors, cfg.stoch.quad);
  if (A.diagnostics.max_depth_exceeded)
    throw Error(Errc::quadrature_failure, "Fisher matrix quadrature hit the depth limit");
  const double cond = condition_number(A.value);

  out << "model: " << to_string(cfg.model.kind) << '\n' << "A =\n" << format_matrix(A.value);
  out << std::setprecision(6) << "condition number: " << cond << '\n';
  if (!(cond < kConditionWarning))
    err << "warning: condition number above threshold (" << kConditionWarning
        << "); the regressors may be linearly dependent on G\n";

  const json j = {{"model", io::to_json(cfg.model)},
                  {"A", io::to_json(A.value)},
                  {"condition_number", std::isfinite(cond) ? json(cond) : json(nullptr)},
                  {"quadrature_evaluations", A.diagnostics.evaluations}};
  run.write("fisher.json", j.dump(2) + "\n");
  run.write("fisher.csv", matrix_csv(A.value));
  run.finish();
  return kOk;
}

int cmd_estimate(const Options& opt, const std::vector<std::string>& args, std::ostream& out) {
  const io::RunConfig cfg = load_config(opt);
  const ValidatedDomain d = validate(cfg.domain);

  std::unique_ptr<Field> z;
  json source;
  if (!opt.field.empty()) {
    z = std::make_unique<GridField>(read_grid_csv(opt.field));
    source = {{"kind", "grid"}, {"path", opt.field}};
  } else {
    std::shared_ptr<const KLSheet> noise;
    if (cfg.noise_scale != 0.0) {
      auto kl = std::make_shared<const KLSample>(draw_kl(cfg.n, cfg.S, cfg.T, *opt.simulate));
      noise = std::make_shared<const KLSheet>(cfg.model, kl);
    }
    z = std::make_unique<FieldSample>(cfg.regressors, cfg.true_m, noise, cfg.noise_scale);
    source = {{"kind", "simulated"}, {"seed", *opt.simulate}, {"n", cfg.n}, {"true_m", io::to_json(cfg.true_m)}};
  }

  Run run("estimate", opt, args);
  run.set_config(io::to_json(cfg));
  if (opt.dump_grid > 0) {
    if (opt.dump_grid < 2) throw Error(Errc::invalid_argument, "--dump-grid needs at least 2 points");
    // Pad the bounding box so that the one-sided edge slopes of the grid
    // adapter stay off the boundary of G.
    const double pad_s = 0.02 * (d.c() - d.a());
    const double pad_t = 0.02 * (d.t_max() - d.t_min());
    double s0 = d.a() - pad_s, s1 = d.c() + pad_s, t0 = d.t_min() - pad_t, t1 = d.t_max() + pad_t;
    s0 = std::max(s0, 0.0);
    t0 = std::max(t0, 0.0);
    s1 = std::min(s1, z->s_extent());
    t1 = std::min(t1, z->t_extent());
    std::ostringstream csv;
    write_grid_csv(csv, sample_grid(*z, s0, s1, opt.dump_grid, t0, t1, opt.dump_grid));
    run.write("field.csv", csv.str());
  }

  const EstimationResult r = estimate(cfg.model, *z, d, *cfg.regressors, cfg.stoch);
  if (r.diagnostics.max_depth_exceeded)
    throw Error(Errc::quadrature_failure, "quadrature hit the depth limit");
  out << std::setprecision(10) << "model: " << to_string(r.model.kind) << '\n'
      << "m_hat: " << r.m_hat.transpose() << '\n'
      << "zeta: " << r.zeta.transpose() << '\n';
  json j = io::to_json(r);
  j["source"] = source;
  run.write("estimate.json", j.dump(2) + "\n");
  run.finish();
  return kOk;
}

int cmd_experiment(const Options& opt, const std::vector<std::string>& args, std::ostream& out) {
  io::RunConfig cfg = load_config(opt);
  if (opt.profile == "desk") {
    cfg.replications = 200;
    cfg.n_sweep = {25, 50};
  } else if (opt.profile == "paper") {
    cfg.replications = 1000;
    cfg.n_sweep = {25, 50, 75, 100};
  } else if (!opt.profile.empty()) {
    throw Error(Errc::invalid_argument, "--profile must be 'desk' or 'paper'");
  }
  Run run("experiment", opt, args);
  run.set_config(io::to_json(cfg));
  const ExperimentResult result = run_experiment(cfg.experiment());
  for (const auto& p : emit_tables(result, opt.out, TableFormat::csv)) run.adopt(p);
  for (const auto& p : emit_tables(result, opt.out, TableFormat::json)) run.adopt(p);

  // Acceptance band: |mean - m| <= 3 sqrt(diag(cov)/N), Frobenius error <= 15%.
  json bands = json::array();
  out << std::setprecision(6);
  for (const SweepPoint& pt : result.points) {
    const Eigen::ArrayXd se = (pt.cov_m_hat.diagonal().array() / std::max(pt.used, 1)).sqrt();
    const Eigen::ArrayXd dev = (pt.mean_m_hat - cfg.true_m).array().abs();
    const bool mean_ok = pt.used > 0 && (dev <= 3.0 * se).all();
    const double frob = pt.cov_relative_error();
    const bool cov_ok = frob <= 0.15;
    out << "n=" << pt.n << " used=" << pt.used << " failed=" << pt.failed
        << " mean_m_hat=[" << pt.mean_m_hat.transpose() << "] cov_rel_error=" << frob
        << " mean_band=" << (mean_ok ? "pass" : "FAIL") << " cov_band=" << (cov_ok ? "pass" : "FAIL")
        << '\n';
    bands.push_back({{"n", pt.n}, {"mean_band", mean_ok}, {"cov_relative_error", frob}, {"cov_band", cov_ok}});
  }
  run.write("band_check.json", bands.dump(2) + "\n");
  run.finish();
  return kOk;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::io_error:
      return kUsageError;
    default:
      return kDomainFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum likelihood estimation of drift parameters of Gaussian sheets"};
  app.name("rfmle");
  app.require_subcommand(1);
  app.set_version_flag("--version", RFMLE_VERSION);

  Options opt;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON configuration file")->required();
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
  };
  auto model_flag = [&](CLI::App* sub) {
    sub->add_option("--model", opt.model, "noise model")
        ->check(CLI::IsMember({"wiener", "ou-stat", "ou-zero"}));
  };

  CLI::App* domain_check = app.add_subcommand("domain-check", "validate the observation domain");
  common(domain_check);

  CLI::App* fisher_cmd = app.add_subcommand("fisher", "compute the Fisher matrix A");
  common(fisher_cmd);
  model_flag(fisher_cmd);

  CLI::App* estimate_cmd = app.add_subcommand("estimate", "estimate the drift parameters");
  common(estimate_cmd);
  model_flag(estimate_cmd);
  auto* field_opt = estimate_cmd->add_option("--field", opt.field, "gridded observations (CSV s,t,z)");
  auto* sim_opt = estimate_cmd->add_option("--simulate", opt.simulate, "simulate a field with this seed");
  field_opt->excludes(sim_opt);
  estimate_cmd->add_option("--dump-grid", opt.dump_grid, "also write the field on an N x N grid");

  CLI::App* experiment_cmd = app.add_subcommand("experiment", "Monte Carlo study");
  common(experiment_cmd);
  model_flag(experiment_cmd);
  experiment_cmd->add_option("--seed", opt.seed, "base seed");
  experiment_cmd->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
  experiment_cmd->add_option("--profile", opt.profile, "desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));

  std::vector<std::string> argv_storage{"rfmle"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  if (estimate_cmd->parsed() && opt.field.empty() == !opt.simulate) {
    err << "error: estimate needs exactly one of --field or --simulate\n";
    return kUsageError;
  }

  try {
    if (domain_check->parsed()) return cmd_domain_check(opt, args, out);
    if (fisher_cmd->parsed()) return cmd_fisher(opt, args, out, err);
    if (estimate_cmd->parsed()) return cmd_estimate(opt, args, out);
    if (experiment_cmd->parsed()) return cmd_experiment(opt, args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace rfmle::cli
