#include "delasso/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "delasso/covariance.hpp"
#include "delasso/inference.hpp"

namespace delasso {

namespace {

void for_each_support(int p, int size, std::vector<int>& current, int start,
                      const std::function<void(const std::vector<int>&)>& fn) {
  if (static_cast<int>(current.size()) == size) {
    fn(current);
    return;
  }
  for (int v = start; v < p; ++v) {
    current.push_back(v);
    for_each_support(p, size, current, v + 1, fn);
    current.pop_back();
  }
}

}  // namespace

double phi_max(const Matrix& X, int t) {
  const int p = static_cast<int>(X.cols());
  if (t < 1 || t > p) throw DomainError("phi_max: need 1 <= t <= p");
  if (p > 20 || std::min(t, p - t) > 4)
    throw TooLarge("phi_max: enumeration capped at p <= 20, t <= 4");

  Matrix sigma_hat = X.transpose() * X / static_cast<double>(X.rows());
  if (t == p) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_hat, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  }
  double best = 0.0;
  std::vector<int> current;
  for_each_support(p, t, current, 0, [&](const std::vector<int>& s) {
    const int m = static_cast<int>(s.size());
    Matrix sub(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) sub(a, b) = sigma_hat(s[a], s[b]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().maxCoeff());
  });
  return best;
}

namespace {

struct ConeMinimizer {
  const Matrix& X;
  const std::vector<int>& support;  // J
  double cone_c;
  int q = 0;  // 0 for kappa(s,c); else the q of kappa(s,q,c)

  // denominator ||v_{J2}|| with J2 = J union top-q coordinates of v
  double denominator(const Vector& v) const {
    double sum = 0.0;
    for (int j : support) sum += v[j] * v[j];
    if (q > 0) {
      std::vector<double> off;
      std::vector<bool> in_j(v.size(), false);
      for (int j : support) in_j[j] = true;
      for (Index i = 0; i < v.size(); ++i)
        if (!in_j[i]) off.push_back(std::abs(v[i]));
      int take = std::min<int>(q, static_cast<int>(off.size()));
      std::partial_sort(off.begin(), off.begin() + take, off.end(), std::greater<>());
      for (int i = 0; i < take; ++i) sum += off[i] * off[i];
    }
    return std::sqrt(sum);
  }

  double ratio(const Vector& v) const {
    double den = denominator(v);
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return (X * v).norm() / (std::sqrt(static_cast<double>(X.rows())) * den);
  }

  // normalize ||v_J|| = 1 and shrink v_{J^c} into the l1 cone
  void project(Vector& v) const {
    double nj = 0.0;
    for (int j : support) nj += v[j] * v[j];
    nj = std::sqrt(nj);
    if (nj == 0.0) {
      for (int j : support) v[j] = 1.0 / std::sqrt(static_cast<double>(support.size()));
      nj = 1.0;
    } else {
      v /= nj;
    }
    std::vector<bool> in_j(v.size(), false);
    for (int j : support) in_j[j] = true;
    double off_l1 = 0.0;
    for (Index i = 0; i < v.size(); ++i)
      if (!in_j[i]) off_l1 += std::abs(v[i]);
    if (off_l1 > cone_c) {
      double scale = cone_c / off_l1;
      for (Index i = 0; i < v.size(); ++i)
        if (!in_j[i]) v[i] *= scale;
    }
  }

  double minimize(Rng& rng, int restarts, int iters = 300) const {
    const Index p = X.cols();
    const Matrix gram = X.transpose() * X / static_cast<double>(X.rows());
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
      Vector v(p);
      for (Index i = 0; i < p; ++i) v[i] = rng.normal();
      project(v);
      double step = 0.5;
      double current = ratio(v);
      best = std::min(best, current);
      for (int it = 0; it < iters; ++it) {
        Vector grad = 2.0 * (gram * v);
        Vector trial = v - step * grad;
        project(trial);
        double val = ratio(trial);
        if (val < current) {
          v = trial;
          current = val;
          best = std::min(best, val);
          step *= 1.1;
        } else {
          step *= 0.5;
          if (step < 1e-12) break;
        }
      }
    }
    return best;
  }
};

double re_constant_impl(const Matrix& X, int s, int q, double c, Rng& rng,
                        int restarts) {
  const int p = static_cast<int>(X.cols());
  if (s < 1 || s > p) throw DomainError("re_constant: need 1 <= s <= p");
  if (c <= 0.0) throw DomainError("re_constant: c must be > 0");
  if (p > 12 || s > 3) throw TooLarge("re_constant: enumeration capped at p <= 12, s <= 3");

  double best = std::numeric_limits<double>::infinity();
  for (int size = 1; size <= s; ++size) {
    std::vector<int> current;
    for_each_support(p, size, current, 0, [&](const std::vector<int>& j) {
      ConeMinimizer minimizer{X, j, c, q};
      best = std::min(best, minimizer.minimize(rng, restarts));
    });
  }
  return best;
}

}  // namespace

double re_constant(const Matrix& X, int s, double c, Rng& rng, int restarts) {
  return re_constant_impl(X, s, 0, c, rng, restarts);
}

double re_constant_sqc(const Matrix& X, int s, int q, double c, Rng& rng,
                       int restarts) {
  if (q < s) throw DomainError("re_constant_sqc: need q >= s");
  return re_constant_impl(X, s, q, c, rng, restarts);
}

double ks_statistic_normal(const Vector& sample) {
  std::vector<double> sorted(sample.data(), sample.data() + sample.size());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    double cdf = std_normal_cdf(sorted[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / m));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / m - cdf));
  }
  return d;
}

QQData qq_data(const DebiasedFit& fit, const GroundTruth& truth, double sigma) {
  if (sigma <= 0.0) throw DomainError("qq_data: sigma must be > 0");
  if (truth.theta0.size() != fit.theta_u.size())
    throw ShapeMismatch("qq_data: theta0 length != p");
  const Index p = fit.theta_u.size();
  const double sqrt_n = std::sqrt(static_cast<double>(fit.n));

  Vector z(p);
  for (Index i = 0; i < p; ++i)
    z[i] = sqrt_n * (fit.theta_u[i] - truth.theta0[i]) / (sigma * std::sqrt(fit.var_proxy[i]));

  std::vector<double> sorted(z.data(), z.data() + p);
  std::sort(sorted.begin(), sorted.end());

  QQData data;
  data.points.resize(p);
  for (Index i = 0; i < p; ++i) {
    data.points[i].theoretical =
        std_normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(p));
    data.points[i].sample = sorted[i];
  }
  data.ks_statistic = ks_statistic_normal(z);
  return data;
}

bool support_size_bound_check(const LassoFit& fit, const REReport& re, int s0) {
  if (!re.exact) throw TooLarge("support_size_bound_check: exact RE constants required");
  if (re.kappa_s_c <= 0.0) return true;  // vacuous bound
  double bound = 64.0 * re.phi_max_t * re.phi_max_t / (re.kappa_s_c * re.kappa_s_c) *
                 static_cast<double>(s0);
  return static_cast<double>(fit.active_set.size()) <= bound;
}

void write_qq_csv(const QQData& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IOError("write_qq_csv: cannot open " + path);
  out.precision(17);
  out << "theoretical_quantile,sample_quantile\n";
  for (const auto& pt : data.points) out << pt.theoretical << ',' << pt.sample << '\n';
}

}  // namespace delasso
