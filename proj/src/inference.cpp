#include "delasso/inference.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "delasso/covariance.hpp"

namespace delasso {

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

namespace {

// Acklam's rational approximation, |relative error| < 1.15e-9.
double quantile_initial_guess(double q) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double q_low = 0.02425;
  if (q < q_low) {
    double u = std::sqrt(-2.0 * std::log(q));
    return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  if (q > 1.0 - q_low) {
    double u = std::sqrt(-2.0 * std::log(1.0 - q));
    return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  double u = q - 0.5;
  double r = u * u;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double std_normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

}  // namespace

double std_normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("std_normal_quantile: q must be in (0,1)");
  double x = quantile_initial_guess(q);
  // Halley-polished Newton steps on Phi(x) - q
  for (int i = 0; i < 3; ++i) {
    double err = std_normal_cdf(x) - q;
    double pdf = std_normal_pdf(x);
    if (pdf == 0.0) break;
    double step = err / pdf;
    x -= step / (1.0 + 0.5 * x * step);
  }
  return x;
}

namespace {

Vector standardized_z(const DebiasedFit& fit) {
  const double sqrt_n = std::sqrt(static_cast<double>(fit.n));
  Vector z(fit.theta_u.size());
  for (Index i = 0; i < z.size(); ++i) {
    double v = fit.var_proxy[i];
    if (v <= 1e-14)
      throw ZeroVariance("degenerate variance proxy at coordinate " + std::to_string(i));
    z[i] = sqrt_n * fit.theta_u[i] / std::sqrt(v);
  }
  return z;
}

}  // namespace

Vector p_values(const DebiasedFit& fit, double sigma_hat) {
  if (sigma_hat <= 0.0) throw DomainError("p_values: sigma_hat must be > 0");
  Vector z = standardized_z(fit);
  Vector pv(z.size());
  for (Index i = 0; i < z.size(); ++i)
    pv[i] = 2.0 * (1.0 - std_normal_cdf(std::abs(z[i]) / sigma_hat));
  return pv;
}

std::vector<int> decide(const Vector& pv, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("decide: alpha must be in (0,1)");
  std::vector<int> decisions(pv.size());
  for (Index i = 0; i < pv.size(); ++i) decisions[i] = pv[i] <= alpha ? 1 : 0;
  return decisions;
}

ConfidenceIntervals confidence_intervals(const DebiasedFit& fit, double sigma_hat,
                                         double alpha) {
  if (sigma_hat <= 0.0) throw DomainError("confidence_intervals: sigma_hat must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("confidence_intervals: alpha must be in (0,1)");
  const double sqrt_n = std::sqrt(static_cast<double>(fit.n));
  const double crit = std_normal_quantile(1.0 - alpha / 2.0);

  ConfidenceIntervals ci;
  ci.level = 1.0 - alpha;
  ci.lower.resize(fit.theta_u.size());
  ci.upper.resize(fit.theta_u.size());
  for (Index i = 0; i < fit.theta_u.size(); ++i) {
    double v = fit.var_proxy[i];
    if (v <= 1e-14)
      throw ZeroVariance("degenerate variance proxy at coordinate " + std::to_string(i));
    double half_width = crit * sigma_hat * std::sqrt(v) / sqrt_n;
    ci.lower[i] = fit.theta_u[i] - half_width;
    ci.upper[i] = fit.theta_u[i] + half_width;
  }
  return ci;
}

double robust_sigma(const DebiasedFit& fit, double quantile_alpha) {
  if (!(quantile_alpha > 0.0 && quantile_alpha < 1.0))
    throw DomainError("robust_sigma: quantile_alpha must be in (0,1)");
  Vector z = standardized_z(fit);
  std::vector<double> mags(z.size());
  for (Index i = 0; i < z.size(); ++i) mags[i] = std::abs(z[i]);
  std::sort(mags.begin(), mags.end());
  const Index p = z.size();
  Index k = static_cast<Index>(std::ceil(static_cast<double>(p) * quantile_alpha));
  k = std::clamp<Index>(k, 1, p);
  return mags[k - 1] / std_normal_quantile((1.0 + quantile_alpha) / 2.0);
}

double G(double alpha, double u) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("G: alpha must be in (0,1)");
  if (u < 0.0) throw DomainError("G: u must be >= 0");
  double c = std_normal_quantile(1.0 - alpha / 2.0);
  return 2.0 - std_normal_cdf(c + u) - std_normal_cdf(c - u);
}

PowerPrediction predicted_average_power(const GroundTruth& truth,
                                        const CovarianceModel& cov, int n,
                                        double alpha) {
  auto mat = materialize_covariance(cov);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  PowerPrediction prediction;
  double sum = 0.0;
  for (int i : truth.support) {
    double u = sqrt_n * std::abs(truth.theta0[i]) /
               (truth.sigma * std::sqrt(mat.omega(i, i)));
    double g = G(alpha, u);
    prediction.per_coordinate.push_back(g);
    sum += g;
  }
  if (!truth.support.empty())
    prediction.average = sum / static_cast<double>(truth.support.size());
  return prediction;
}

namespace {

// Sigma_{i|S} = Sigma_ii - Sigma_{i,S} (Sigma_{S,S})^{-1} Sigma_{S,i}
double conditional_variance(const Matrix& sigma, int i, const std::vector<int>& s) {
  if (s.empty()) return sigma(i, i);
  const int m = static_cast<int>(s.size());
  Matrix sub(m, m);
  Vector cross(m);
  for (int a = 0; a < m; ++a) {
    cross[a] = sigma(i, s[a]);
    for (int b = 0; b < m; ++b) sub(a, b) = sigma(s[a], s[b]);
  }
  return sigma(i, i) - cross.dot(sub.llt().solve(cross));
}

// enumerate subsets of {0..p-1}\{i} of exactly `size` elements
void for_each_subset(int p, int i, int size, std::vector<int>& current,
                     int start, const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<int>(current.size()) == size) {
    fn(current);
    return;
  }
  for (int v = start; v < p; ++v) {
    if (v == i) continue;
    current.push_back(v);
    for_each_subset(p, i, size, current, v + 1, fn);
    current.pop_back();
  }
}

}  // namespace

MinimaxQuantities minimax_quantities(const Matrix& sigma, int s0, bool exact) {
  if (sigma.rows() != sigma.cols()) throw ShapeMismatch("minimax_quantities: Sigma not square");
  if (s0 < 1) throw DomainError("minimax_quantities: s0 must be >= 1");
  const int p = static_cast<int>(sigma.rows());

  MinimaxQuantities out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  double hi = es.eigenvalues().maxCoeff();
  if (lo <= 0.0) throw NotPositiveDefinite("minimax_quantities: Sigma not positive definite");
  out.increase_factor_bound = std::sqrt(hi / lo);
  if (!exact) return out;

  if (p > 20 || s0 > 4)
    throw TooLarge("minimax_quantities: exact enumeration capped at p <= 20, s0 <= 4");

  double eta_with = 0.0, eta_without = 0.0;
  bool any_nonempty = false;
  for (int i = 0; i < p; ++i) {
    double best_with = sigma(i, i);  // S = empty
    double best_without = std::numeric_limits<double>::infinity();
    for (int size = 1; size < s0; ++size) {
      std::vector<int> current;
      for_each_subset(p, i, size, current, 0, [&](const std::vector<int>& s) {
        double v = conditional_variance(sigma, i, s);
        best_with = std::min(best_with, v);
        best_without = std::min(best_without, v);
      });
      any_nonempty = true;
    }
    eta_with = std::max(eta_with, best_with);
    if (any_nonempty) eta_without = std::max(eta_without, best_without);
  }
  out.eta_with_empty = eta_with;
  if (any_nonempty) out.eta_without_empty = eta_without;
  out.exact = true;
  return out;
}

}  // namespace delasso
