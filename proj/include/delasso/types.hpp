#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "delasso/errors.hpp"

namespace delasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexSet = std::vector<int>;

/// Observed data for one regression instance: Y = X theta0 + W.
struct RegressionProblem {
  Matrix X;  // n x p design
  Vector Y;  // length n

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }

  void validate() const {
    if (X.rows() < 1 || X.cols() < 1) throw ShapeMismatch("RegressionProblem: empty design");
    if (Y.size() != X.rows()) throw ShapeMismatch("RegressionProblem: Y length != rows of X");
    if (!X.allFinite() || !Y.allFinite()) throw NonFinite("RegressionProblem: non-finite entries");
  }
};

/// Simulation-only truth bundle: sparse coefficient vector and noise level.
struct GroundTruth {
  Vector theta0;
  IndexSet support;  // indices with theta0_i != 0
  int s0 = 0;        // |support|
  double sigma = 1.0;
};

/// Population covariance specification for the design rows.
struct CovarianceModel {
  enum class Kind { Identity, CirculantPrecision, Explicit };

  Kind kind = Kind::Identity;
  int p = 0;
  // circulant precision: Omega_ii = 1, Omega_jk = a within circular bandwidth b.
  int bandwidth = 0;
  double off_diag = 0.0;
  Matrix sigma_explicit;  // used for Kind::Explicit

  static CovarianceModel identity(int p) {
    CovarianceModel m;
    m.kind = Kind::Identity;
    m.p = p;
    return m;
  }

  static CovarianceModel circulant_precision(int p, int bandwidth) {
    CovarianceModel m;
    m.kind = Kind::CirculantPrecision;
    m.p = p;
    m.bandwidth = bandwidth;
    m.off_diag = 1.0 / static_cast<double>(bandwidth);
    return m;
  }

  static CovarianceModel explicit_sigma(Matrix sigma) {
    CovarianceModel m;
    m.kind = Kind::Explicit;
    m.p = static_cast<int>(sigma.rows());
    m.sigma_explicit = std::move(sigma);
    return m;
  }
};

/// Sigma_hat = X^T X / n, symmetrized.
struct EmpiricalCovariance {
  Matrix sigma_hat;
};

}  // namespace delasso
