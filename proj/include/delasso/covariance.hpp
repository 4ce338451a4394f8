#pragma once

#include <utility>

#include "delasso/types.hpp"

namespace delasso {

/// Sigma_hat = X^T X / n, symmetrized by (A + A^T)/2.
EmpiricalCovariance empirical_covariance(const RegressionProblem& problem);

struct MaterializedCovariance {
  Matrix sigma;
  Matrix omega;
};

/// Build (Sigma, Omega) for a covariance model. For the circulant-precision
/// model Omega is assembled from the banded circulant rule (circular index
/// distance <= bandwidth) and Sigma = Omega^{-1} via an LLT factorization.
/// Throws NotPositiveDefinite when Omega has an eigenvalue <= 0.
MaterializedCovariance materialize_covariance(const CovarianceModel& model);

/// Closed-form eigenvalues of the banded circulant precision matrix:
/// lambda_k = 1 + 2a sum_{d=1..b} cos(2 pi k d / p).
Vector circulant_symbol_eigenvalues(int p, int bandwidth, double off_diag);

}  // namespace delasso
