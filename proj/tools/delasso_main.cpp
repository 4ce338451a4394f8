// Command-line front end: simulate / fit / qq / diagnose.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "delasso/covariance.hpp"
#include "delasso/diagnostics.hpp"
#include "delasso/harness.hpp"

namespace {

using namespace delasso;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out;
  std::string precision = "nodewise";
  std::string sigma = "scaled";
  std::optional<double> alpha;
};

HarnessOptions to_options(const GlobalFlags& g) {
  HarnessOptions opt;
  opt.threads = g.threads;
  if (g.precision == "oracle")
    opt.precision = PrecisionMode::Oracle;
  else if (g.precision == "nodewise")
    opt.precision = PrecisionMode::Nodewise;
  else
    throw ConfigError("--precision must be nodewise or oracle");

  if (g.sigma == "scaled") {
    opt.sigma_source = TestReport::SigmaSource::ScaledLasso;
  } else if (g.sigma == "robust") {
    opt.sigma_source = TestReport::SigmaSource::RobustQuantile;
  } else if (g.sigma.rfind("known:", 0) == 0) {
    opt.sigma_source = TestReport::SigmaSource::Known;
    opt.known_sigma = std::stod(g.sigma.substr(6));
    if (opt.known_sigma <= 0.0) throw ConfigError("--sigma known value must be > 0");
  } else {
    throw ConfigError("--sigma must be scaled, robust, or known:<value>");
  }
  return opt;
}

int cmd_simulate(const std::string& config_path, const GlobalFlags& g,
                 const std::string& format) {
  ExperimentConfig config = parse_config_file(config_path);
  if (g.seed) config.seed = *g.seed;
  if (g.alpha) config.alpha = *g.alpha;
  config.validate();

  ExperimentReport report = run_experiment(config, to_options(g));
  if (report.failed_replications == config.replications) {
    std::cerr << "all replications failed";
    if (!report.per_replication.empty())
      std::cerr << ": " << report.per_replication.front().error;
    std::cerr << "\n";
    return 3;
  }

  ReportFormat fmt = format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
  if (g.out.empty()) {
    std::cout << (fmt == ReportFormat::Json ? report_to_json(report)
                                            : report_to_csv(report));
  } else {
    emit_report(report, fmt, g.out);
  }
  std::fprintf(stderr,
               "type1_mean=%.4f type1_std=%.4f power_mean=%.4f power_std=%.4f "
               "predicted_power=%.4f failed=%d\n",
               report.type1_mean, report.type1_std, report.power_mean,
               report.power_std, report.predicted_power, report.failed_replications);
  return 0;
}

int cmd_fit(const std::string& data_path, const GlobalFlags& g) {
  RegressionProblem problem = read_xy_csv(data_path);
  FitResult result = fit_dataset(problem, g.alpha.value_or(0.05), to_options(g),
                                 g.seed.value_or(1));
  if (g.out.empty()) throw ConfigError("fit: --out is required");
  write_fit_csv(result, g.out);
  std::fprintf(stderr, "lambda=%.6g sigma_hat=%.6g rejections=%d of %d\n",
               result.lambda_used, result.report.sigma_used,
               static_cast<int>(std::count(result.report.decisions.begin(),
                                           result.report.decisions.end(), 1)),
               static_cast<int>(result.report.decisions.size()));
  return 0;
}

int cmd_qq(const std::string& config_path, const GlobalFlags& g, int replication) {
  ExperimentConfig config = parse_config_file(config_path);
  if (g.seed) config.seed = *g.seed;
  config.validate();
  HarnessOptions opt = to_options(g);

  Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(replication));
  auto cov = materialize_covariance(config.cov);
  Eigen::LLT<Matrix> llt(cov.sigma);
  Matrix lower = llt.matrixL();

  RegressionProblem problem;
  problem.X = sample_design(lower, config.n, rng);
  GroundTruth truth =
      sample_theta0(config.p, config.s0, config.theta_value, config.sigma, rng);
  problem.Y = sample_response(problem.X, truth, rng);

  LassoOptions lasso_opts;
  lasso_opts.tol = 1e-6;
  auto grid = lambda_grid(problem, opt.cv_grid_size, opt.cv_grid_ratio);
  double lam = cross_validate(problem, grid, opt.cv_folds, rng, lasso_opts).lambda_cv;
  LassoFit lasso_fit = lasso(problem, lam);

  PrecisionEstimate precision =
      opt.precision == PrecisionMode::Oracle
          ? oracle_precision(config.cov)
          : nodewise_precision(problem.X,
                               std::sqrt(2.0 * std::log(static_cast<double>(config.p)) /
                                         config.n),
                               1e-6, opt.threads);
  DebiasedFit fit = debias(problem, lasso_fit, precision);
  QQData data = qq_data(fit, truth, config.sigma);

  if (g.out.empty()) throw ConfigError("qq: --out is required");
  write_qq_csv(data, g.out);
  std::fprintf(stderr, "ks_statistic=%.4f\n", data.ks_statistic);
  return 0;
}

int cmd_diagnose(const std::string& data_path, const GlobalFlags& g, int s, int q,
                 double c, int t) {
  RegressionProblem problem = read_xy_csv(data_path);
  Rng rng(g.seed.value_or(1));
  REReport re;
  re.s = s;
  re.q = q;
  re.c = c;
  re.t = t;
  re.phi_max_t = phi_max(problem.X, t);
  re.kappa_s_c = re_constant(problem.X, s, c, rng);
  re.kappa_s_q_c = re_constant_sqc(problem.X, s, q, c, rng);
  re.exact = true;
  std::printf("phi_max(%d)=%.6g\nkappa(%d,%.3g)=%.6g\nkappa(%d,%d,%.3g)=%.6g\n",
              t, re.phi_max_t, s, c, re.kappa_s_c, s, q, c, re.kappa_s_q_c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Debiased-Lasso inference for high-dimensional linear regression"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  std::uint64_t seed_value = 0;
  bool seed_set = false;
  double alpha_value = 0.0;
  bool alpha_set = false;
  app.add_option("--seed", seed_value)->each([&](const std::string&) { seed_set = true; });
  app.add_option("--threads", g.threads)->check(CLI::PositiveNumber);
  app.add_option("--out", g.out);
  app.add_option("--precision", g.precision)->check(CLI::IsMember({"nodewise", "oracle"}));
  app.add_option("--sigma", g.sigma);
  app.add_option("--alpha", alpha_value)->each([&](const std::string&) { alpha_set = true; });

  std::string config_path, data_path, format = "json";
  int replication = 0;
  int s = 2, q = 2, t = 2;
  double c = 3.0;

  auto* simulate = app.add_subcommand("simulate", "Run the Monte-Carlo experiment");
  simulate->add_option("config", config_path)->required();
  simulate->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* fit = app.add_subcommand("fit", "Run inference on one CSV dataset (Y, X...)");
  fit->add_option("data", data_path)->required();

  auto* qq = app.add_subcommand("qq", "Emit Q-Q data for one replication");
  qq->add_option("config", config_path)->required();
  qq->add_option("--replication", replication);

  auto* diagnose = app.add_subcommand("diagnose", "RE constants on a small dataset");
  diagnose->add_option("data", data_path)->required();
  diagnose->add_option("--s", s);
  diagnose->add_option("--q", q);
  diagnose->add_option("--c", c);
  diagnose->add_option("--t", t);

  CLI11_PARSE(app, argc, argv);

  if (seed_set) g.seed = seed_value;
  if (alpha_set) g.alpha = alpha_value;

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, g, format);
    if (fit->parsed()) return cmd_fit(data_path, g);
    if (qq->parsed()) return cmd_qq(config_path, g, replication);
    if (diagnose->parsed()) return cmd_diagnose(data_path, g, s, q, c, t);
  } catch (const delasso::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
