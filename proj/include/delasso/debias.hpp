#pragma once

#include "delasso/lasso.hpp"
#include "delasso/precision.hpp"
#include "delasso/types.hpp"

namespace delasso {

struct DebiasedFit {
  Vector theta_u;    // theta_hat + Omega_hat X^T (Y - X theta_hat) / n
  Vector var_proxy;  // [Omega_hat Sigma_hat Omega_hat^T]_ii
  Vector theta_hat;  // the underlying lasso estimate
  Index n = 0;
};

struct BiasDecomposition {
  Vector z_vec;  // sqrt(n)(theta_u - theta0) - delta
  Vector delta;  // sqrt(n)(Omega_hat Sigma_hat - I)(theta0 - theta_hat)
};

/// Debiased estimator with per-coordinate variance proxies. The proxy is
/// computed row-wise as ||X Omega_hat_{i,.}^T||^2 / n, never forming the
/// dense triple product.
DebiasedFit debias(const RegressionProblem& problem, const LassoFit& lasso_fit,
                   const PrecisionEstimate& precision);

/// Simulation-only split of sqrt(n)(theta_u - theta0) into Z + Delta.
BiasDecomposition decompose_bias(const DebiasedFit& fit, const GroundTruth& truth,
                                 const RegressionProblem& problem,
                                 const PrecisionEstimate& precision);

/// (inf,k)-norm: max over index sets |A| >= k of ||v_A||_2 / sqrt(|A|),
/// attained on the top-k entries by magnitude.
double infty_k_norm(const Vector& v, int k);

/// C_n(eps) = { i : |delta_i| > eps }.
IndexSet large_bias_set(const Vector& delta, double epsilon);

}  // namespace delasso
