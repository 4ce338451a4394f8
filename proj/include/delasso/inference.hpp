#pragma once

#include <optional>
#include <vector>

#include "delasso/debias.hpp"
#include "delasso/types.hpp"

namespace delasso {

struct TestReport {
  Vector p_values;
  std::vector<int> decisions;  // 1 = reject
  double alpha = 0.05;
  double sigma_used = 0.0;
  enum class SigmaSource { ScaledLasso, RobustQuantile, Known };
  SigmaSource sigma_source = SigmaSource::ScaledLasso;
};

struct ConfidenceIntervals {
  Vector lower;
  Vector upper;
  double level = 0.95;
};

struct PowerPrediction {
  std::vector<double> per_coordinate;   // G(alpha, sqrt(n)|theta0_i|/(sigma sqrt(Omega_ii)))
  std::optional<double> average;        // absent when the support is empty
};

struct MinimaxQuantities {
  // eta with the empty conditioning set admitted / excluded (|S| < s0)
  std::optional<double> eta_with_empty;
  std::optional<double> eta_without_empty;
  double increase_factor_bound = 0.0;  // sqrt(sigma_max(Sigma)/sigma_min(Sigma))
  bool exact = false;
};

/// Phi(x) to ~1e-15 via the complementary error function.
double std_normal_cdf(double x);

/// Phi^{-1}(q), q in (0,1), rational initial guess polished by Newton steps
/// on the cdf to ~1e-12.
double std_normal_quantile(double q);

/// P_i = 2(1 - Phi(sqrt(n)|theta_u_i| / (sigma_hat var_proxy_i^{1/2}))).
Vector p_values(const DebiasedFit& fit, double sigma_hat);

/// 1 iff P_i <= alpha (inclusive threshold).
std::vector<int> decide(const Vector& p_values, double alpha);

/// theta_u_i +/- Phi^{-1}(1 - alpha/2) sigma_hat sqrt(var_proxy_i / n).
ConfidenceIntervals confidence_intervals(const DebiasedFit& fit, double sigma_hat,
                                         double alpha);

/// Quantile-of-|z| noise estimator: |z|_(ceil(p q)) / Phi^{-1}((1+q)/2)
/// with z_i = sqrt(n) theta_u_i / var_proxy_i^{1/2}.
double robust_sigma(const DebiasedFit& fit, double quantile_alpha = 0.5);

/// Exact two-sided Gaussian power at level alpha and standardized shift u.
double G(double alpha, double u);

/// Per-coordinate and average predicted power over the true support, using
/// the exact Omega diagonal.
PowerPrediction predicted_average_power(const GroundTruth& truth,
                                        const CovarianceModel& cov, int n,
                                        double alpha);

/// eta_{Sigma,s0} by exhaustive enumeration over conditioning sets
/// (p <= 20, s0 <= 4), plus the eigenvalue bound on the increase factor.
/// When `exact` is false only the bound is filled in.
MinimaxQuantities minimax_quantities(const Matrix& sigma, int s0, bool exact = true);

}  // namespace delasso
