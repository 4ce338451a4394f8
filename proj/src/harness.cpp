#include "delasso/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "delasso/covariance.hpp"
#include "delasso/diagnostics.hpp"

namespace delasso {

namespace {

double estimate_sigma(const RegressionProblem& problem, const DebiasedFit& fit,
                      const HarnessOptions& options) {
  switch (options.sigma_source) {
    case TestReport::SigmaSource::Known:
      return options.known_sigma;
    case TestReport::SigmaSource::RobustQuantile:
      return robust_sigma(fit);
    case TestReport::SigmaSource::ScaledLasso: {
      const double lam = std::sqrt(2.0 * std::log(static_cast<double>(problem.p())) /
                                   static_cast<double>(problem.n()));
      auto sl = scaled_lasso(problem, lam);
      if (sl.degenerate_residual || sl.sigma_hat <= 0.0)
        throw ZeroVariance("scaled lasso produced a degenerate noise estimate");
      return sl.sigma_hat;
    }
  }
  throw DomainError("unknown sigma source");
}

}  // namespace

ReplicationResult run_replication(const ExperimentConfig& config, int r,
                                  const HarnessOptions& options) {
  config.validate();
  ReplicationResult result;
  result.seed = config.seed;
  result.replication = r;
  try {
    Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(r));

    auto cov = materialize_covariance(config.cov);
    Eigen::LLT<Matrix> llt(cov.sigma);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite("run_replication: Cholesky of Sigma failed");
    Matrix lower = llt.matrixL();

    RegressionProblem problem;
    problem.X = sample_design(lower, config.n, rng);
    GroundTruth truth =
        sample_theta0(config.p, config.s0, config.theta_value, config.sigma, rng);
    problem.Y = sample_response(problem.X, truth, rng);

    LassoOptions lasso_opts;
    lasso_opts.tol = 1e-6;
    double lambda_used;
    if (options.fixed_lambda) {
      lambda_used = *options.fixed_lambda;
    } else {
      auto grid = lambda_grid(problem, options.cv_grid_size, options.cv_grid_ratio);
      auto cv = cross_validate(problem, grid, options.cv_folds, rng, lasso_opts);
      lambda_used = cv.lambda_cv;
    }
    LassoOptions final_opts;
    LassoFit lasso_fit = lasso(problem, lambda_used, final_opts);

    PrecisionEstimate precision;
    if (options.precision == PrecisionMode::Oracle) {
      precision = oracle_precision(config.cov);
    } else {
      double lambda_node =
          options.lambda_node
              ? *options.lambda_node
              : std::sqrt(2.0 * std::log(static_cast<double>(config.p)) / config.n);
      precision = nodewise_precision(problem.X, lambda_node, 1e-6, 1);
    }

    DebiasedFit fit = debias(problem, lasso_fit, precision);
    double sigma_hat = estimate_sigma(problem, fit, options);

    Vector pv = p_values(fit, sigma_hat);
    auto decisions = decide(pv, config.alpha);

    std::vector<bool> on_support(config.p, false);
    for (int i : truth.support) on_support[i] = true;
    int null_total = 0, null_reject = 0, sig_total = 0, sig_reject = 0;
    for (int i = 0; i < config.p; ++i) {
      if (on_support[i]) {
        ++sig_total;
        sig_reject += decisions[i];
      } else {
        ++null_total;
        null_reject += decisions[i];
      }
    }

    result.type1_error = null_total ? static_cast<double>(null_reject) / null_total : 0.0;
    result.avg_power = sig_total ? static_cast<double>(sig_reject) / sig_total : 0.0;
    result.null_count = null_total;
    result.null_rejections = null_reject;
    result.sigma_hat = sigma_hat;
    result.lambda_used = lambda_used;
    result.precision_error = precision_error_norm(precision.omega_hat, cov.omega);
    result.ks_statistic = qq_data(fit, truth, config.sigma).ks_statistic;

    auto decomposition = decompose_bias(fit, truth, problem, precision);
    if (config.s0 >= 1) {
      double d = infty_k_norm(decomposition.delta, config.s0);
      result.delta_inf_s0_sq = d * d;
    }
    auto prediction =
        predicted_average_power(truth, config.cov, config.n, config.alpha);
    result.predicted_power = prediction.average.value_or(0.0);
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
  }
  return result;
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const HarnessOptions& options) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.per_replication.resize(config.replications);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= config.replications) return;
      report.per_replication[r] = run_replication(config, r, options);
    }
  };
  int threads = std::max(1, std::min(options.threads, config.replications));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // single-threaded deterministic aggregation over successful replications
  std::vector<const ReplicationResult*> ok;
  for (const auto& r : report.per_replication)
    if (r.ok) ok.push_back(&r);
  report.failed_replications = config.replications - static_cast<int>(ok.size());

  if (!ok.empty()) {
    double t1 = 0.0, pw = 0.0, pp = 0.0;
    long long nulls = 0, null_rej = 0;
    for (auto* r : ok) {
      t1 += r->type1_error;
      pw += r->avg_power;
      pp += r->predicted_power;
      nulls += r->null_count;
      null_rej += r->null_rejections;
    }
    const double m = static_cast<double>(ok.size());
    report.type1_mean = t1 / m;
    report.power_mean = pw / m;
    report.predicted_power = pp / m;
    report.pooled_type1 = nulls ? static_cast<double>(null_rej) / nulls : 0.0;
    double vt = 0.0, vp = 0.0;
    for (auto* r : ok) {
      vt += (r->type1_error - report.type1_mean) * (r->type1_error - report.type1_mean);
      vp += (r->avg_power - report.power_mean) * (r->avg_power - report.power_mean);
    }
    double denom = std::max(1.0, m - 1.0);
    report.type1_std = std::sqrt(vt / denom);
    report.power_std = std::sqrt(vp / denom);
  }
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["p"] = c.p;
  j["s0"] = c.s0;
  j["theta_value"] = c.theta_value;
  j["sigma"] = c.sigma;
  j["alpha"] = c.alpha;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  switch (c.cov.kind) {
    case CovarianceModel::Kind::Identity:
      j["cov"] = "identity";
      break;
    case CovarianceModel::Kind::CirculantPrecision:
      j["cov"] = "circulant";
      j["cov_bandwidth"] = c.cov.bandwidth;
      break;
    case CovarianceModel::Kind::Explicit:
      j["cov"] = "explicit";
      break;
  }
  return j;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(report.config);
  j["type1_mean"] = report.type1_mean;
  j["type1_std"] = report.type1_std;
  j["power_mean"] = report.power_mean;
  j["power_std"] = report.power_std;
  j["pooled_type1"] = report.pooled_type1;
  j["predicted_power"] = report.predicted_power;
  j["failed_replications"] = report.failed_replications;
  j["per_replication"] = nlohmann::ordered_json::array();
  for (const auto& r : report.per_replication) {
    nlohmann::ordered_json rj;
    rj["replication"] = r.replication;
    rj["ok"] = r.ok;
    if (!r.ok) rj["error"] = r.error;
    rj["type1_error"] = r.type1_error;
    rj["avg_power"] = r.avg_power;
    rj["sigma_hat"] = r.sigma_hat;
    rj["lambda_used"] = r.lambda_used;
    rj["precision_error"] = r.precision_error;
    rj["ks_statistic"] = r.ks_statistic;
    rj["delta_inf_s0_sq"] = r.delta_inf_s0_sq;
    rj["predicted_power"] = r.predicted_power;
    j["per_replication"].push_back(std::move(rj));
  }
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "row,replication,ok,type1_error,avg_power,sigma_hat,lambda_used,"
         "precision_error,ks_statistic,delta_inf_s0_sq,predicted_power\n";
  for (const auto& r : report.per_replication) {
    out << "replication," << r.replication << ',' << (r.ok ? 1 : 0) << ','
        << fmt(r.type1_error) << ',' << fmt(r.avg_power) << ',' << fmt(r.sigma_hat)
        << ',' << fmt(r.lambda_used) << ',' << fmt(r.precision_error) << ','
        << fmt(r.ks_statistic) << ',' << fmt(r.delta_inf_s0_sq) << ','
        << fmt(r.predicted_power) << '\n';
  }
  out << "summary,," << (report.failed_replications == 0 ? 1 : 0) << ','
      << fmt(report.type1_mean) << ',' << fmt(report.power_mean) << ",,,,,,"
      << fmt(report.predicted_power) << '\n';
  return out.str();
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("emit_report: cannot open " + path);
  out << (format == ReportFormat::Json ? report_to_json(report) : report_to_csv(report));
  if (!out) throw IOError("emit_report: write failed for " + path);
}

FitResult fit_dataset(const RegressionProblem& problem, double alpha,
                      const HarnessOptions& options, std::uint64_t seed) {
  problem.validate();
  Rng rng(seed);

  LassoOptions lasso_opts;
  lasso_opts.tol = 1e-6;
  double lambda_used;
  if (options.fixed_lambda) {
    lambda_used = *options.fixed_lambda;
  } else {
    auto grid = lambda_grid(problem, options.cv_grid_size, options.cv_grid_ratio);
    lambda_used = cross_validate(problem, grid, options.cv_folds, rng, lasso_opts).lambda_cv;
  }
  LassoFit lasso_fit = lasso(problem, lambda_used);

  double lambda_node =
      options.lambda_node
          ? *options.lambda_node
          : std::sqrt(2.0 * std::log(static_cast<double>(problem.p())) /
                      static_cast<double>(problem.n()));
  PrecisionEstimate precision =
      nodewise_precision(problem.X, lambda_node, 1e-6, options.threads);

  FitResult result;
  result.fit = debias(problem, lasso_fit, precision);
  result.lambda_used = lambda_used;

  double sigma_hat = estimate_sigma(problem, result.fit, options);
  result.report.alpha = alpha;
  result.report.sigma_used = sigma_hat;
  result.report.sigma_source = options.sigma_source;
  result.report.p_values = p_values(result.fit, sigma_hat);
  result.report.decisions = decide(result.report.p_values, alpha);
  result.intervals = confidence_intervals(result.fit, sigma_hat, alpha);
  return result;
}

void write_fit_csv(const FitResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("write_fit_csv: cannot open " + path);
  out << "index,theta_hat,theta_u,var_proxy,p_value,decision,ci_lower,ci_upper\n";
  for (Index i = 0; i < result.fit.theta_u.size(); ++i) {
    out << i << ',' << fmt(result.fit.theta_hat[i]) << ',' << fmt(result.fit.theta_u[i])
        << ',' << fmt(result.fit.var_proxy[i]) << ',' << fmt(result.report.p_values[i])
        << ',' << result.report.decisions[i] << ',' << fmt(result.intervals.lower[i])
        << ',' << fmt(result.intervals.upper[i]) << '\n';
  }
}

RegressionProblem read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("read_xy_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (first && !numeric) {  // optional header
      first = false;
      continue;
    }
    first = false;
    if (!numeric) throw IOError("read_xy_csv: non-numeric row in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IOError("read_xy_csv: no data rows in " + path);
  const size_t cols = rows[0].size();
  if (cols < 2) throw IOError("read_xy_csv: need Y plus at least one X column");
  RegressionProblem problem;
  problem.X.resize(rows.size(), cols - 1);
  problem.Y.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw IOError("read_xy_csv: ragged rows in " + path);
    problem.Y[i] = rows[i][0];
    for (size_t j = 1; j < cols; ++j) problem.X(i, j - 1) = rows[i][j];
  }
  problem.validate();
  return problem;
}

}  // namespace delasso
