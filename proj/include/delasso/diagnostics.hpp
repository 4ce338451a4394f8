#pragma once

#include <vector>

#include "delasso/debias.hpp"
#include "delasso/rng.hpp"
#include "delasso/types.hpp"

namespace delasso {

struct REReport {
  double kappa_s_c = 0.0;
  double kappa_s_q_c = 0.0;
  double phi_max_t = 0.0;
  int s = 0, q = 0, t = 0;
  double c = 0.0;
  bool exact = false;
};

struct QQPoint {
  double theoretical = 0.0;
  double sample = 0.0;
};

struct QQData {
  std::vector<QQPoint> points;  // sorted ascending in sample value
  double ks_statistic = 0.0;
};

/// Restricted maximum eigenvalue max_{1<=||v||_0<=t} ||Xv||^2/(n||v||^2),
/// exact by support enumeration (caps p <= 20, t <= 4).
double phi_max(const Matrix& X, int t);

/// Restricted eigenvalue kappa(s,c): outer enumeration over supports J with
/// |J| <= s, inner cone minimization by projected descent from `restarts`
/// random starts. The result is an upper bound on the true constant.
double re_constant(const Matrix& X, int s, double c, Rng& rng, int restarts = 50);

/// kappa(s,q,c) with denominator ||v_{J2}||, J2 = J plus the q largest
/// coordinates of v by magnitude.
double re_constant_sqc(const Matrix& X, int s, int q, double c, Rng& rng,
                       int restarts = 50);

/// Standardized residuals z_i = sqrt(n)(theta_u_i - theta0_i)/(sigma v_i^{1/2})
/// paired with Phi^{-1}((i - 0.5)/p), plus the KS distance to the standard
/// normal cdf.
QQData qq_data(const DebiasedFit& fit, const GroundTruth& truth, double sigma);

/// KS sup-distance between the empirical cdf of `sample` and Phi.
double ks_statistic_normal(const Vector& sample);

/// Prop.-style support-size bound check: ||theta_hat||_0 <=
/// 64 phi_max^2 / kappa^2 * s0, vacuously true when kappa == 0.
bool support_size_bound_check(const LassoFit& fit, const REReport& re, int s0);

/// Write (theoretical_quantile, sample_quantile) rows as CSV.
void write_qq_csv(const QQData& data, const std::string& path);

}  // namespace delasso
