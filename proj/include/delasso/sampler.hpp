#pragma once

#include <cstdint>
#include <string>

#include "delasso/covariance.hpp"
#include "delasso/rng.hpp"
#include "delasso/types.hpp"

namespace delasso {

/// Full description of one synthetic experiment.
struct ExperimentConfig {
  int n = 240;
  int p = 300;
  int s0 = 30;
  double theta_value = 0.1;
  double sigma = 1.0;
  CovarianceModel cov = CovarianceModel::identity(300);
  double alpha = 0.05;
  int replications = 20;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Parse a key=value config file (fields named as in ExperimentConfig; the
/// covariance model is given as cov=identity | cov=circulant with
/// cov_bandwidth=<b>, or cov=explicit with cov_sigma_csv=<path>).
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// n i.i.d. rows N(0, Sigma), generated as g^T L^T with L the lower
/// Cholesky factor of Sigma.
Matrix sample_design(const CovarianceModel& cov, int n, Rng& rng);

/// Same, reusing a precomputed lower Cholesky factor of Sigma.
Matrix sample_design(const Matrix& chol_lower, int n, Rng& rng);

/// Support of size s0 uniform without replacement; theta0 = theta_value on it.
GroundTruth sample_theta0(int p, int s0, double theta_value, double sigma, Rng& rng);

/// Y = X theta0 + W, W ~ N(0, sigma^2 I).
Vector sample_response(const Matrix& X, const GroundTruth& truth, Rng& rng);

}  // namespace delasso
