#pragma once

#include <optional>
#include <string>
#include <vector>

#include "delasso/inference.hpp"
#include "delasso/sampler.hpp"

namespace delasso {

enum class PrecisionMode { Nodewise, Oracle };

struct HarnessOptions {
  PrecisionMode precision = PrecisionMode::Nodewise;
  TestReport::SigmaSource sigma_source = TestReport::SigmaSource::ScaledLasso;
  double known_sigma = 1.0;  // used when sigma_source == Known
  int threads = 1;
  int cv_folds = 5;
  int cv_grid_size = 100;
  double cv_grid_ratio = 1e-3;
  // empty => lambda by cross-validation; set => fixed lasso lambda
  std::optional<double> fixed_lambda;
  // empty => sqrt(2 log p / n)
  std::optional<double> lambda_node;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  int replication = 0;
  bool ok = false;
  std::string error;

  double type1_error = 0.0;  // fraction of null coordinates rejected
  double avg_power = 0.0;    // fraction of support coordinates rejected
  double sigma_hat = 0.0;
  double lambda_used = 0.0;
  double precision_error = 0.0;   // ||Omega_hat - Omega||_inf (row-l1)
  double ks_statistic = 0.0;      // standardized residuals vs N(0,1)
  double delta_inf_s0_sq = 0.0;   // ||Delta||^2_(inf, s0)
  double predicted_power = 0.0;   // Eq.-(20)-style prediction for this support
  int null_count = 0;
  int null_rejections = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReplicationResult> per_replication;
  double type1_mean = 0.0, type1_std = 0.0;
  double power_mean = 0.0, power_std = 0.0;
  double pooled_type1 = 0.0;  // all null coordinates pooled across replications
  double predicted_power = 0.0;
  int failed_replications = 0;
};

/// One full pipeline pass for replication index r: sample data, CV lasso,
/// precision estimate, debias, noise estimate, tests, rates.
ReplicationResult run_replication(const ExperimentConfig& config, int r,
                                  const HarnessOptions& options = {});

/// All replications (concurrently when options.threads > 1) plus aggregation.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const HarnessOptions& options = {});

enum class ReportFormat { Csv, Json };

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::string& path);
std::string report_to_json(const ExperimentReport& report);
std::string report_to_csv(const ExperimentReport& report);

/// Inference on a single dataset: lasso (CV lambda), nodewise precision,
/// debias, sigma estimate, p-values, decisions, confidence intervals.
struct FitResult {
  DebiasedFit fit;
  TestReport report;
  ConfidenceIntervals intervals;
  double lambda_used = 0.0;
};

FitResult fit_dataset(const RegressionProblem& problem, double alpha,
                      const HarnessOptions& options, std::uint64_t seed);

/// CSV with rows (index, theta_hat, theta_u, var_proxy, p_value, decision,
/// ci_lower, ci_upper).
void write_fit_csv(const FitResult& result, const std::string& path);

/// Plain numeric CSV, first column Y, remaining columns X; optional header.
RegressionProblem read_xy_csv(const std::string& path);

}  // namespace delasso
