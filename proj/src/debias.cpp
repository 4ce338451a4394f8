#include "delasso/debias.hpp"

#include <algorithm>
#include <cmath>

#include "delasso/covariance.hpp"

namespace delasso {

DebiasedFit debias(const RegressionProblem& problem, const LassoFit& lasso_fit,
                   const PrecisionEstimate& precision) {
  problem.validate();
  const Index p = problem.p();
  const double n = static_cast<double>(problem.n());
  if (lasso_fit.theta_hat.size() != p)
    throw ShapeMismatch("debias: lasso fit length != p");
  if (precision.omega_hat.rows() != p || precision.omega_hat.cols() != p)
    throw ShapeMismatch("debias: precision estimate shape != p x p");

  DebiasedFit fit;
  fit.n = problem.n();
  fit.theta_hat = lasso_fit.theta_hat;

  Vector residual = problem.Y - problem.X * lasso_fit.theta_hat;
  fit.theta_u = lasso_fit.theta_hat +
                precision.omega_hat * (problem.X.transpose() * residual) / n;

  // [Omega Sigma_hat Omega^T]_ii = ||X Omega_{i,.}^T||^2 / n
  Matrix projected = problem.X * precision.omega_hat.transpose();  // n x p
  fit.var_proxy = projected.colwise().squaredNorm().transpose() / n;
  return fit;
}

BiasDecomposition decompose_bias(const DebiasedFit& fit, const GroundTruth& truth,
                                 const RegressionProblem& problem,
                                 const PrecisionEstimate& precision) {
  const Index p = fit.theta_u.size();
  if (truth.theta0.size() != p) throw ShapeMismatch("decompose_bias: theta0 length != p");
  const double sqrt_n = std::sqrt(static_cast<double>(fit.n));

  Matrix sigma_hat = empirical_covariance(problem).sigma_hat;
  Vector gap = truth.theta0 - fit.theta_hat;

  BiasDecomposition out;
  out.delta = sqrt_n * (precision.omega_hat * (sigma_hat * gap) - gap);
  out.z_vec = sqrt_n * (fit.theta_u - truth.theta0) - out.delta;
  return out;
}

double infty_k_norm(const Vector& v, int k) {
  if (k < 1 || k > v.size()) throw DomainError("infty_k_norm: need 1 <= k <= len(v)");
  std::vector<double> mags(v.size());
  for (Index i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::partial_sort(mags.begin(), mags.begin() + k, mags.end(), std::greater<>());
  double sum_sq = 0.0;
  for (int i = 0; i < k; ++i) sum_sq += mags[i] * mags[i];
  return std::sqrt(sum_sq / k);
}

IndexSet large_bias_set(const Vector& delta, double epsilon) {
  if (epsilon <= 0.0) throw DomainError("large_bias_set: epsilon must be > 0");
  IndexSet set;
  for (Index i = 0; i < delta.size(); ++i)
    if (std::abs(delta[i]) > epsilon) set.push_back(static_cast<int>(i));
  return set;
}

}  // namespace delasso
