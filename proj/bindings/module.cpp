#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delasso/diagnostics.hpp"
#include "delasso/harness.hpp"

namespace py = pybind11;
using namespace delasso;

namespace {

CovarianceModel cov_from_args(const std::string& kind, int p, int bandwidth,
                              const std::optional<Matrix>& sigma) {
  if (kind == "identity") return CovarianceModel::identity(p);
  if (kind == "circulant") return CovarianceModel::circulant_precision(p, bandwidth);
  if (kind == "explicit") {
    if (!sigma) throw ConfigError("explicit covariance needs a sigma matrix");
    return CovarianceModel::explicit_sigma(*sigma);
  }
  throw ConfigError("unknown covariance kind '" + kind + "'");
}

HarnessOptions options_from_args(const std::string& precision,
                                 const std::string& sigma_source,
                                 double known_sigma, int threads,
                                 std::optional<double> fixed_lambda,
                                 std::optional<double> lambda_node) {
  HarnessOptions opts;
  if (precision == "nodewise")
    opts.precision = PrecisionMode::Nodewise;
  else if (precision == "oracle")
    opts.precision = PrecisionMode::Oracle;
  else
    throw ConfigError("precision must be 'nodewise' or 'oracle'");

  if (sigma_source == "scaled")
    opts.sigma_source = TestReport::SigmaSource::ScaledLasso;
  else if (sigma_source == "robust")
    opts.sigma_source = TestReport::SigmaSource::RobustQuantile;
  else if (sigma_source == "known")
    opts.sigma_source = TestReport::SigmaSource::Known;
  else
    throw ConfigError("sigma_source must be 'scaled', 'robust' or 'known'");

  opts.known_sigma = known_sigma;
  opts.threads = threads;
  opts.fixed_lambda = fixed_lambda;
  opts.lambda_node = lambda_node;
  return opts;
}

py::dict replication_to_dict(const ReplicationResult& r) {
  py::dict d;
  d["replication"] = r.replication;
  d["ok"] = r.ok;
  d["error"] = r.error;
  d["type1_error"] = r.type1_error;
  d["avg_power"] = r.avg_power;
  d["sigma_hat"] = r.sigma_hat;
  d["lambda_used"] = r.lambda_used;
  d["precision_error"] = r.precision_error;
  d["ks_statistic"] = r.ks_statistic;
  d["delta_inf_s0_sq"] = r.delta_inf_s0_sq;
  d["predicted_power"] = r.predicted_power;
  d["null_count"] = r.null_count;
  d["null_rejections"] = r.null_rejections;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "debiased-lasso inference core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ShapeMismatch>(m, "ShapeMismatch", PyExc_ValueError);
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ValueError);

  m.def(
      "lasso",
      [](const Matrix& X, const Vector& Y, double lambda, double tol, int max_iter) {
        RegressionProblem problem{X, Y};
        auto fit = lasso(problem, lambda, {tol, max_iter});
        py::dict d;
        d["theta_hat"] = fit.theta_hat;
        d["lambda"] = fit.lambda;
        d["iterations"] = fit.iterations;
        d["max_kkt_violation"] = fit.max_kkt_violation;
        d["active_set"] = fit.active_set;
        d["converged"] = fit.converged;
        return d;
      },
      py::arg("X"), py::arg("Y"), py::arg("lambda_"), py::arg("tol") = 1e-7,
      py::arg("max_iter") = 100000);

  m.def(
      "scaled_lasso",
      [](const Matrix& X, const Vector& Y, double lambda) {
        auto fit = scaled_lasso(RegressionProblem{X, Y}, lambda);
        py::dict d;
        d["theta_hat"] = fit.theta_hat;
        d["sigma_hat"] = fit.sigma_hat;
        d["converged"] = fit.converged;
        d["degenerate_residual"] = fit.degenerate_residual;
        return d;
      },
      py::arg("X"), py::arg("Y"), py::arg("lambda_"));

  m.def(
      "nodewise_precision",
      [](const Matrix& X, double lambda_node, int threads) {
        return nodewise_precision(X, lambda_node, 1e-7, threads).omega_hat;
      },
      py::arg("X"), py::arg("lambda_node"), py::arg("threads") = 1);

  m.def(
      "fit",
      [](const Matrix& X, const Vector& Y, double alpha, const std::string& precision,
         const std::string& sigma_source, double known_sigma, int threads,
         std::uint64_t seed) {
        auto opts = options_from_args(precision, sigma_source, known_sigma, threads,
                                      std::nullopt, std::nullopt);
        auto result = fit_dataset(RegressionProblem{X, Y}, alpha, opts, seed);
        py::dict d;
        d["theta_hat"] = result.fit.theta_hat;
        d["theta_u"] = result.fit.theta_u;
        d["var_proxy"] = result.fit.var_proxy;
        d["p_values"] = result.report.p_values;
        d["decisions"] = result.report.decisions;
        d["ci_lower"] = result.intervals.lower;
        d["ci_upper"] = result.intervals.upper;
        d["sigma_hat"] = result.report.sigma_used;
        d["lambda_used"] = result.lambda_used;
        return d;
      },
      py::arg("X"), py::arg("Y"), py::arg("alpha") = 0.05,
      py::arg("precision") = "nodewise", py::arg("sigma_source") = "scaled",
      py::arg("known_sigma") = 1.0, py::arg("threads") = 1, py::arg("seed") = 1);

  m.def(
      "simulate",
      [](int n, int p, int s0, double theta_value, double sigma,
         const std::string& cov_kind, int cov_bandwidth,
         const std::optional<Matrix>& cov_sigma, double alpha, int replications,
         std::uint64_t seed, const std::string& precision,
         const std::string& sigma_source, double known_sigma, int threads,
         std::optional<double> fixed_lambda, std::optional<double> lambda_node) {
        ExperimentConfig cfg;
        cfg.n = n;
        cfg.p = p;
        cfg.s0 = s0;
        cfg.theta_value = theta_value;
        cfg.sigma = sigma;
        cfg.cov = cov_from_args(cov_kind, p, cov_bandwidth, cov_sigma);
        cfg.alpha = alpha;
        cfg.replications = replications;
        cfg.seed = seed;
        auto opts = options_from_args(precision, sigma_source, known_sigma, threads,
                                      fixed_lambda, lambda_node);
        auto report = run_experiment(cfg, opts);

        py::dict d;
        d["type1_mean"] = report.type1_mean;
        d["type1_std"] = report.type1_std;
        d["power_mean"] = report.power_mean;
        d["power_std"] = report.power_std;
        d["pooled_type1"] = report.pooled_type1;
        d["predicted_power"] = report.predicted_power;
        d["failed_replications"] = report.failed_replications;
        py::list reps;
        for (const auto& r : report.per_replication) reps.append(replication_to_dict(r));
        d["per_replication"] = reps;
        d["json"] = report_to_json(report);
        return d;
      },
      py::arg("n"), py::arg("p"), py::arg("s0"), py::arg("theta_value"),
      py::arg("sigma"), py::arg("cov_kind") = "identity", py::arg("cov_bandwidth") = 0,
      py::arg("cov_sigma") = std::nullopt, py::arg("alpha") = 0.05,
      py::arg("replications") = 20, py::arg("seed") = 1,
      py::arg("precision") = "nodewise", py::arg("sigma_source") = "scaled",
      py::arg("known_sigma") = 1.0, py::arg("threads") = 1,
      py::arg("fixed_lambda") = std::nullopt, py::arg("lambda_node") = std::nullopt);

  m.def("std_normal_cdf", &std_normal_cdf, py::arg("x"));
  m.def("std_normal_quantile", &std_normal_quantile, py::arg("q"));
  m.def("power_function", &G, py::arg("alpha"), py::arg("u"));
  m.def("infty_k_norm", &infty_k_norm, py::arg("v"), py::arg("k"));
  m.def("ks_statistic_normal", &ks_statistic_normal, py::arg("sample"));

  m.def(
      "phi_max", [](const Matrix& X, int t) { return phi_max(X, t); }, py::arg("X"),
      py::arg("t"));
  m.def(
      "re_constant",
      [](const Matrix& X, int s, double c, std::uint64_t seed, int restarts) {
        Rng rng(seed);
        return re_constant(X, s, c, rng, restarts);
      },
      py::arg("X"), py::arg("s"), py::arg("c"), py::arg("seed") = 1,
      py::arg("restarts") = 50);
}
