#include "delasso/covariance.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace delasso {

EmpiricalCovariance empirical_covariance(const RegressionProblem& problem) {
  problem.validate();
  const double n = static_cast<double>(problem.n());
  Matrix s = (problem.X.transpose() * problem.X) / n;
  s = 0.5 * (s + s.transpose()).eval();
  return EmpiricalCovariance{std::move(s)};
}

Vector circulant_symbol_eigenvalues(int p, int bandwidth, double off_diag) {
  Vector lambda(p);
  for (int k = 0; k < p; ++k) {
    double sum = 0.0;
    for (int d = 1; d <= bandwidth; ++d) {
      sum += std::cos(2.0 * M_PI * static_cast<double>(k) * d / static_cast<double>(p));
    }
    lambda[k] = 1.0 + 2.0 * off_diag * sum;
  }
  return lambda;
}

namespace {

Matrix build_circulant_precision(int p, int bandwidth, double off_diag) {
  Matrix omega = Matrix::Identity(p, p);
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < p; ++k) {
      if (j == k) continue;
      int d = std::abs(j - k);
      d = std::min(d, p - d);  // index difference modulo p
      if (d <= bandwidth) omega(j, k) = off_diag;
    }
  }
  return omega;
}

Matrix invert_spd(const Matrix& a, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) throw NotPositiveDefinite(what);
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(what);
  return llt.solve(Matrix::Identity(a.rows(), a.cols()));
}

}  // namespace

MaterializedCovariance materialize_covariance(const CovarianceModel& model) {
  if (model.p < 1) throw ShapeMismatch("materialize_covariance: p < 1");
  switch (model.kind) {
    case CovarianceModel::Kind::Identity:
      return {Matrix::Identity(model.p, model.p), Matrix::Identity(model.p, model.p)};
    case CovarianceModel::Kind::CirculantPrecision: {
      if (model.bandwidth < 1 || 2 * model.bandwidth >= model.p)
        throw DomainError("materialize_covariance: need 1 <= bandwidth < p/2");
      Matrix omega = build_circulant_precision(model.p, model.bandwidth, model.off_diag);
      Matrix sigma = invert_spd(omega, "circulant precision matrix not positive definite");
      return {std::move(sigma), std::move(omega)};
    }
    case CovarianceModel::Kind::Explicit: {
      if (model.sigma_explicit.rows() != model.sigma_explicit.cols())
        throw ShapeMismatch("materialize_covariance: explicit Sigma not square");
      Matrix omega = invert_spd(model.sigma_explicit, "explicit Sigma not positive definite");
      return {model.sigma_explicit, std::move(omega)};
    }
  }
  throw DomainError("materialize_covariance: unknown model kind");
}

}  // namespace delasso
