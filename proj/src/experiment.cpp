#include "rfmle/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <thread>

#include "rfmle/error.hpp"
#include "rfmle/estimation.hpp"
#include "rfmle/io.hpp"

namespace rfmle {

void ExperimentConfig::check() const {
  if (replications < 2) throw Error(Errc::invalid_argument, "at least 2 replications are required");
  if (n_sweep.empty()) throw Error(Errc::invalid_argument, "n_sweep is empty");
  for (std::size_t i = 0; i < n_sweep.size(); ++i) {
    if (n_sweep[i] < 1) throw Error(Errc::invalid_argument, "truncation orders must be >= 1");
    if (i > 0 && n_sweep[i] <= n_sweep[i - 1])
      throw Error(Errc::invalid_argument, "n_sweep must be strictly increasing");
  }
  if (!regressors || regressors->size() == 0)
    throw Error(Errc::invalid_argument, "no regressors configured");
  if (true_m.size() != regressors->size())
    throw Error(Errc::invalid_argument, "true_m size does not match the regressors");
  if (!(S > 0.0) || !(T > 0.0)) throw Error(Errc::invalid_argument, "S and T must be > 0");
  if (workers < 1) throw Error(Errc::invalid_argument, "workers must be >= 1");
  model.check();
  stoch.check();
}

double SweepPoint::cov_relative_error() const {
  return (cov_zeta - theory_cov_zeta).norm() / theory_cov_zeta.norm();
}

bool ExperimentResult::operator==(const ExperimentResult& o) const {
  if (points.size() != o.points.size() || replications.size() != o.replications.size()) return false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SweepPoint &a = points[i], &b = o.points[i];
    if (a.n != b.n || a.used != b.used || a.failed != b.failed || a.mean_m_hat != b.mean_m_hat ||
        a.cov_zeta != b.cov_zeta || a.theory_cov_zeta != b.theory_cov_zeta ||
        a.cov_m_hat != b.cov_m_hat)
      return false;
  }
  for (std::size_t i = 0; i < replications.size(); ++i) {
    const ReplicationRecord &a = replications[i], &b = o.replications[i];
    if (a.n != b.n || a.replication != b.replication || a.ok != b.ok || a.m_hat != b.m_hat ||
        a.zeta != b.zeta)
      return false;
  }
  return true;
}

namespace {

ReplicationRecord run_replication(const ExperimentConfig& cfg, const ValidatedDomain& domain,
                                  const EstimationResult& fit, int n, int index) {
  ReplicationRecord rec;
  rec.n = n;
  rec.replication = index;
  try {
    const std::uint64_t seed = replication_seed(cfg.base_seed, static_cast<std::uint64_t>(index));
    auto kl = std::make_shared<const KLSample>(draw_kl(n, cfg.S, cfg.T, seed));
    auto noise = std::make_shared<const KLSheet>(cfg.model, kl);
    const FieldSample z(cfg.regressors, cfg.true_m, noise, cfg.noise_scale);
    const auto zeta = score(cfg.model, z, domain, *cfg.regressors, cfg.stoch);
    rec.zeta = zeta.value;
    rec.m_hat = fit.a_inverse * zeta.value;
    rec.ok = !zeta.diagnostics.max_depth_exceeded && rec.zeta.allFinite();
  } catch (const Error&) {
    rec.ok = false;
  }
  if (!rec.ok) {
    const Eigen::Index p = cfg.true_m.size();
    rec.zeta = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
    rec.m_hat = rec.zeta;
  }
  return rec;
}

// Fixed-order fold over the replications of one n.
SweepPoint aggregate(const std::vector<ReplicationRecord>& recs, const EstimationResult& fit,
                     const FieldModel& model, int n) {
  const Eigen::Index p = fit.A.rows();
  SweepPoint pt;
  pt.n = n;
  pt.mean_m_hat = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd mean_zeta = Eigen::VectorXd::Zero(p);
  for (const auto& r : recs) {
    if (!r.ok) {
      ++pt.failed;
      continue;
    }
    ++pt.used;
    pt.mean_m_hat += r.m_hat;
    mean_zeta += r.zeta;
  }
  pt.cov_zeta = Eigen::MatrixXd::Zero(p, p);
  if (pt.used > 0) {
    pt.mean_m_hat /= pt.used;
    mean_zeta /= pt.used;
  }
  if (pt.used > 1) {
    for (const auto& r : recs) {
      if (!r.ok) continue;
      const Eigen::VectorXd d = r.zeta - mean_zeta;
      pt.cov_zeta += d * d.transpose();
    }
    pt.cov_zeta /= (pt.used - 1);
  }
  const double scale = model.is_ou() ? model.sigma * model.sigma / (model.alpha * model.beta) : 1.0;
  pt.theory_cov_zeta = scale * fit.A;
  pt.cov_m_hat = fit.covariance;
  return pt;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.check();
  const ValidatedDomain domain = validate(cfg.domain);
  const auto A = fisher(cfg.model, domain, *cfg.regressors, cfg.fisher_quad);
  if (A.diagnostics.max_depth_exceeded)
    throw Error(Errc::quadrature_failure, "Fisher matrix quadrature did not converge");
  const EstimationResult fit =
      mle(A.value, Eigen::VectorXd::Zero(cfg.true_m.size()), cfg.model);

  ExperimentResult result;
  for (const int n : cfg.n_sweep) {
    std::vector<ReplicationRecord> recs(static_cast<std::size_t>(cfg.replications));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (int i = next++; i < cfg.replications; i = next++) {
        try {
          recs[static_cast<std::size_t>(i)] = run_replication(cfg, domain, fit, n, i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    const int threads = std::min(cfg.workers, cfg.replications);
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    result.points.push_back(aggregate(recs, fit, cfg.model, n));
    if (cfg.keep_replications)
      result.replications.insert(result.replications.end(), recs.begin(), recs.end());
  }
  return result;
}

std::vector<std::string> emit_tables(const ExperimentResult& result, const std::string& dir,
                                     TableFormat format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create '" + dir + "': " + ec.message());

  std::vector<std::string> written;
  if (format == TableFormat::json) {
    const auto path = (fs::path(dir) / "replications.json").string();
    io::write_text_file(path, io::replications_to_json(result).dump(2) + "\n");
    written.push_back(path);
    const auto agg = (fs::path(dir) / "aggregate.json").string();
    io::write_text_file(agg, io::aggregate_to_json(result).dump(2) + "\n");
    written.push_back(agg);
    return written;
  }

  std::ostringstream reps;
  reps << std::setprecision(17) << "n,replication,param_index,m_hat\n";
  for (const auto& r : result.replications)
    for (Eigen::Index k = 0; k < r.m_hat.size(); ++k)
      reps << r.n << ',' << r.replication << ',' << k << ',' << r.m_hat[k] << '\n';
  const auto path = (fs::path(dir) / "replications.csv").string();
  io::write_text_file(path, reps.str());
  written.push_back(path);

  std::ostringstream agg;
  agg << std::setprecision(17) << "n,stat,i,j,value\n";
  for (const auto& row : io::aggregate_rows(result))
    agg << row.n << ',' << row.stat << ',' << row.i << ',' << row.j << ',' << row.value << '\n';
  const auto agg_path = (fs::path(dir) / "aggregate.csv").string();
  io::write_text_file(agg_path, agg.str());
  written.push_back(agg_path);
  return written;
}

}  // namespace rfmle
