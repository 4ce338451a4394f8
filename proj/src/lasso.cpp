#include "delasso/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace delasso {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

double kkt_violation(const RegressionProblem& problem, const Vector& theta,
                     double lambda) {
  const double n = static_cast<double>(problem.n());
  Vector grad = problem.X.transpose() * (problem.Y - problem.X * theta) / n;
  double worst = 0.0;
  for (Index j = 0; j < theta.size(); ++j) {
    double v;
    if (theta[j] != 0.0) {
      v = std::abs(grad[j] - lambda * (theta[j] > 0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, std::abs(grad[j]) - lambda);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

LassoFit lasso(const RegressionProblem& problem, double lambda,
               const LassoOptions& opts, const Vector* warm_start) {
  problem.validate();
  if (lambda < 0.0) throw DomainError("lasso: lambda must be >= 0");
  if (opts.tol <= 0.0) throw DomainError("lasso: tol must be > 0");

  const Index p = problem.p();
  const double n = static_cast<double>(problem.n());

  Vector theta = warm_start ? *warm_start : Vector::Zero(p);
  if (warm_start && warm_start->size() != p)
    throw ShapeMismatch("lasso: warm start length != p");

  Vector col_sq(p);  // ||X_j||^2 / n
  for (Index j = 0; j < p; ++j) col_sq[j] = problem.X.col(j).squaredNorm() / n;

  Vector residual = problem.Y - problem.X * theta;

  LassoFit fit;
  fit.lambda = lambda;

  auto update_coord = [&](Index j) -> double {
    if (col_sq[j] == 0.0) return 0.0;  // zero column stays at 0
    double rho = problem.X.col(j).dot(residual) / n + col_sq[j] * theta[j];
    double updated = soft_threshold(rho, lambda) / col_sq[j];
    double delta = updated - theta[j];
    if (delta != 0.0) {
      residual.noalias() -= problem.X.col(j) * delta;
      theta[j] = updated;
    }
    return std::abs(delta);
  };

  bool converged = false;
  int sweep = 0;
  std::vector<Index> active;
  while (sweep < opts.max_iter) {
    // full sweep over all coordinates
    double max_change = 0.0;
    ++sweep;
    for (Index j = 0; j < p; ++j) max_change = std::max(max_change, update_coord(j));
    if (!std::isfinite(max_change)) throw NonFinite("lasso: iterate diverged");
    if (max_change < opts.tol) {
      converged = true;
      break;
    }
    // iterate on the current active set until it stabilizes
    active.clear();
    for (Index j = 0; j < p; ++j)
      if (theta[j] != 0.0) active.push_back(j);
    while (sweep < opts.max_iter) {
      double change = 0.0;
      ++sweep;
      for (Index j : active) change = std::max(change, update_coord(j));
      if (!std::isfinite(change)) throw NonFinite("lasso: iterate diverged");
      if (change < opts.tol) break;
    }
  }

  fit.theta_hat = std::move(theta);
  fit.iterations = sweep;
  fit.converged = converged;
  fit.max_kkt_violation = kkt_violation(problem, fit.theta_hat, lambda);
  for (Index j = 0; j < p; ++j)
    if (fit.theta_hat[j] != 0.0) fit.active_set.push_back(static_cast<int>(j));
  return fit;
}

std::vector<double> lambda_grid(const RegressionProblem& problem, int size,
                                double ratio) {
  const double n = static_cast<double>(problem.n());
  double lam_max = (problem.X.transpose() * problem.Y / n).cwiseAbs().maxCoeff();
  if (lam_max <= 0.0) lam_max = 1.0;  // Y orthogonal to all columns
  std::vector<double> grid(size);
  const double log_max = std::log(lam_max);
  const double log_min = std::log(ratio * lam_max);
  for (int i = 0; i < size; ++i) {
    double t = size == 1 ? 0.0 : static_cast<double>(i) / (size - 1);
    grid[i] = std::exp(log_max + t * (log_min - log_max));
  }
  return grid;
}

std::vector<LassoFit> lasso_path(const RegressionProblem& problem,
                                 const std::vector<double>& grid,
                                 const LassoOptions& opts) {
  if (!std::is_sorted(grid.rbegin(), grid.rend()))
    throw DomainError("lasso_path: grid must be sorted descending");
  std::vector<LassoFit> fits;
  fits.reserve(grid.size());
  const Vector* warm = nullptr;
  for (double lam : grid) {
    fits.push_back(lasso(problem, lam, opts, warm));
    warm = &fits.back().theta_hat;
  }
  return fits;
}

CvResult cross_validate(const RegressionProblem& problem,
                        const std::vector<double>& grid, int folds, Rng& rng,
                        const LassoOptions& opts) {
  problem.validate();
  const Index n = problem.n();
  const Index p = problem.p();
  if (folds < 2) throw DomainError("cross_validate: folds must be >= 2");
  if (n < folds) throw DomainError("cross_validate: n < folds");

  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i + 1 < n; ++i) {
    Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[i], perm[j]);
  }

  const int g = static_cast<int>(grid.size());
  // per-fold held-out mean squared error at each grid point
  Matrix fold_err(folds, g);
  for (int f = 0; f < folds; ++f) {
    Index lo = n * f / folds;
    Index hi = n * (f + 1) / folds;
    Index n_test = hi - lo;
    Index n_train = n - n_test;

    RegressionProblem train;
    train.X.resize(n_train, p);
    train.Y.resize(n_train);
    Matrix test_x(n_test, p);
    Vector test_y(n_test);
    Index ti = 0, si = 0;
    for (Index i = 0; i < n; ++i) {
      Index row = perm[i];
      if (i >= lo && i < hi) {
        test_x.row(si) = problem.X.row(row);
        test_y[si++] = problem.Y[row];
      } else {
        train.X.row(ti) = problem.X.row(row);
        train.Y[ti++] = problem.Y[row];
      }
    }

    auto fits = lasso_path(train, grid, opts);
    for (int i = 0; i < g; ++i) {
      fold_err(f, i) =
          (test_y - test_x * fits[i].theta_hat).squaredNorm() / static_cast<double>(n_test);
    }
  }

  CvResult result;
  result.curve.resize(g);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g; ++i) {
    double mean = fold_err.col(i).mean();
    double var = (fold_err.col(i).array() - mean).square().sum() / std::max(1, folds - 1);
    result.curve[i] = {grid[i], mean, std::sqrt(var / folds)};
    if (mean < best) {  // strict: ties keep the earlier (larger) lambda
      best = mean;
      result.lambda_cv = grid[i];
    }
  }
  return result;
}

ScaledLassoFit scaled_lasso(const RegressionProblem& problem, double lambda,
                            double tol, int max_iter,
                            const LassoOptions& inner_opts) {
  problem.validate();
  if (lambda <= 0.0) throw DomainError("scaled_lasso: lambda must be > 0");
  const double n = static_cast<double>(problem.n());

  double mean = problem.Y.mean();
  double sigma = std::sqrt((problem.Y.array() - mean).square().sum() / n);
  if (sigma == 0.0) sigma = 1.0;  // Y constant; first theta step decides

  ScaledLassoFit fit;
  fit.lambda = lambda;
  Vector theta = Vector::Zero(problem.p());
  for (int it = 0; it < max_iter; ++it) {
    LassoFit step = lasso(problem, sigma * lambda, inner_opts, &theta);
    theta = step.theta_hat;
    double rss = (problem.Y - problem.X * theta).norm();
    if (rss == 0.0) {
      fit.theta_hat = std::move(theta);
      fit.sigma_hat = 0.0;
      fit.degenerate_residual = true;
      return fit;
    }
    double updated = rss / std::sqrt(n);
    bool done = std::abs(updated - sigma) < tol * sigma;
    sigma = updated;
    if (done) {
      fit.converged = true;
      break;
    }
  }
  fit.theta_hat = std::move(theta);
  fit.sigma_hat = sigma;
  return fit;
}

}  // namespace delasso
