#pragma once

#include <optional>
#include <vector>

#include "delasso/rng.hpp"
#include "delasso/types.hpp"

namespace delasso {

struct LassoFit {
  Vector theta_hat;
  double lambda = 0.0;
  int iterations = 0;  // completed coordinate-descent sweeps
  double max_kkt_violation = 0.0;
  IndexSet active_set;
  bool converged = false;
};

struct ScaledLassoFit {
  Vector theta_hat;
  double sigma_hat = 0.0;
  double lambda = 0.0;
  bool converged = false;
  bool degenerate_residual = false;  // ||Y - X theta|| == 0, sigma step undefined
};

struct LassoOptions {
  double tol = 1e-7;      // max absolute coordinate change per sweep
  int max_iter = 100000;  // sweeps
};

/// Cyclic coordinate descent for
///   min (1/2n)||Y - X theta||_2^2 + lambda ||theta||_1.
/// On convergence the KKT certificate holds:
///   |X_j^T(Y - X theta)/n| <= lambda + tol for all j, with equality to
///   lambda * sign(theta_j) within tol on the active set.
LassoFit lasso(const RegressionProblem& problem, double lambda,
               const LassoOptions& opts = {},
               const Vector* warm_start = nullptr);

/// lambda_max = ||X^T Y / n||_inf, then `size` log-spaced points down to
/// ratio * lambda_max.
std::vector<double> lambda_grid(const RegressionProblem& problem, int size = 100,
                                double ratio = 1e-3);

/// Path solves with warm starts; grid must be sorted descending.
std::vector<LassoFit> lasso_path(const RegressionProblem& problem,
                                 const std::vector<double>& grid,
                                 const LassoOptions& opts = {});

struct CvPoint {
  double lambda = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;
};

struct CvResult {
  double lambda_cv = 0.0;
  std::vector<CvPoint> curve;
};

/// K-fold cross-validation of held-out squared prediction error over the
/// grid. Folds are contiguous blocks of a seeded random permutation. Ties
/// resolve to the largest lambda.
CvResult cross_validate(const RegressionProblem& problem,
                        const std::vector<double>& grid, int folds, Rng& rng,
                        const LassoOptions& opts = {});

/// Scaled Lasso: alternate lasso solves with effective penalty sigma*lambda
/// and sigma = ||Y - X theta||_2 / sqrt(n), starting from sigma = sd(Y).
ScaledLassoFit scaled_lasso(const RegressionProblem& problem, double lambda,
                            double tol = 1e-6, int max_iter = 100,
                            const LassoOptions& inner_opts = {});

/// Max KKT (subgradient stationarity) violation of theta for the given lambda.
double kkt_violation(const RegressionProblem& problem, const Vector& theta,
                     double lambda);

}  // namespace delasso
