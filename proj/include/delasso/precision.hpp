#pragma once

#include <string>
#include <vector>

#include "delasso/covariance.hpp"
#include "delasso/lasso.hpp"
#include "delasso/types.hpp"

namespace delasso {

struct NodewiseFit {
  Vector gamma_hat;  // length p-1, coefficients on the remaining columns
  double tau_sq = 0.0;
};

struct PrecisionEstimate {
  enum class Method { Oracle, Nodewise };

  Matrix omega_hat;  // generally asymmetric for nodewise
  Method method = Method::Oracle;
  std::vector<NodewiseFit> per_node;  // empty for oracle
};

/// Nodewise-regression precision estimator: for each column j fit a lasso of
/// X_j on the remaining columns, set tau_j^2 = (X_j - X_{-j} gamma_j)^T X_j/n
/// and assemble Omega_hat = T^{-2} C with unit diagonal on C and -gamma on
/// the off-diagonal. Throws DegenerateTau if any tau_j^2 <= 0. Nodes run
/// concurrently on up to `threads` workers.
PrecisionEstimate nodewise_precision(const Matrix& X, double lambda_node,
                                     double tol = 1e-7, int threads = 1);

/// Exact precision matrix of a covariance model.
PrecisionEstimate oracle_precision(const CovarianceModel& cov);

/// l_inf operator norm of the difference: max over rows of the row-l1 norm.
double precision_error_norm(const Matrix& omega_hat, const Matrix& omega);

/// Write Omega_hat as dense CSV (row-major).
void write_precision_csv(const PrecisionEstimate& estimate, const std::string& path);

}  // namespace delasso
