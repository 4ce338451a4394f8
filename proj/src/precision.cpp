#include "delasso/precision.hpp"

#include <atomic>
#include <fstream>
#include <thread>

namespace delasso {

PrecisionEstimate nodewise_precision(const Matrix& X, double lambda_node,
                                     double tol, int threads) {
  const Index n = X.rows();
  const Index p = X.cols();
  if (p < 2) throw ShapeMismatch("nodewise_precision: p must be >= 2");
  if (lambda_node <= 0.0) throw DomainError("nodewise_precision: lambda_node must be > 0");

  PrecisionEstimate est;
  est.method = PrecisionEstimate::Method::Nodewise;
  est.omega_hat = Matrix::Zero(p, p);
  est.per_node.resize(p);

  LassoOptions opts;
  opts.tol = tol;

  std::atomic<Index> next{0};
  std::atomic<Index> bad_node{-1};
  auto worker = [&]() {
    for (;;) {
      Index j = next.fetch_add(1);
      if (j >= p || bad_node.load() >= 0) return;

      RegressionProblem node;
      node.X.resize(n, p - 1);
      node.X.leftCols(j) = X.leftCols(j);
      node.X.rightCols(p - 1 - j) = X.rightCols(p - 1 - j);
      node.Y = X.col(j);

      LassoFit fit = lasso(node, lambda_node, opts);
      Vector residual = node.Y - node.X * fit.theta_hat;
      double tau_sq = residual.dot(X.col(j)) / static_cast<double>(n);
      if (tau_sq <= 0.0) {
        bad_node.store(j);
        return;
      }

      est.per_node[j] = {fit.theta_hat, tau_sq};
      est.omega_hat(j, j) = 1.0 / tau_sq;
      for (Index k = 0; k < p - 1; ++k) {
        Index col = k < j ? k : k + 1;
        est.omega_hat(j, col) = -fit.theta_hat[k] / tau_sq;
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Index bad = bad_node.load();
  if (bad >= 0)
    throw DegenerateTau(static_cast<int>(bad),
                        "nodewise_precision: tau^2 <= 0 at node " + std::to_string(bad) +
                            " (lambda too small or degenerate design)");
  return est;
}

PrecisionEstimate oracle_precision(const CovarianceModel& cov) {
  PrecisionEstimate est;
  est.method = PrecisionEstimate::Method::Oracle;
  est.omega_hat = materialize_covariance(cov).omega;
  return est;
}

double precision_error_norm(const Matrix& omega_hat, const Matrix& omega) {
  if (omega_hat.rows() != omega.rows() || omega_hat.cols() != omega.cols())
    throw ShapeMismatch("precision_error_norm: shape mismatch");
  return (omega_hat - omega).cwiseAbs().rowwise().sum().maxCoeff();
}

void write_precision_csv(const PrecisionEstimate& estimate, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IOError("write_precision_csv: cannot open " + path);
  const Matrix& m = estimate.omega_hat;
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

}  // namespace delasso
