#include <doctest.h>

#include <cmath>

#include "delasso/inference.hpp"
#include "delasso/rng.hpp"

using namespace delasso;

namespace {

DebiasedFit synthetic_fit(Vector theta_u, Vector var_proxy, Index n) {
  DebiasedFit fit;
  fit.theta_u = std::move(theta_u);
  fit.var_proxy = std::move(var_proxy);
  fit.theta_hat = Vector::Zero(fit.theta_u.size());
  fit.n = n;
  return fit;
}

}  // namespace

TEST_CASE("std_normal_cdf and std_normal_quantile") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
  CHECK(std_normal_quantile(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-12));
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  for (double q : {1e-8, 1e-4, 0.01, 0.3, 0.5, 0.7, 0.99, 0.9999, 1.0 - 1e-8}) {
    double x = std_normal_quantile(q);
    CHECK(std_normal_cdf(x) == doctest::Approx(q).epsilon(1e-9));
  }
  for (double x : {-5.0, -1.3, 0.0, 0.4, 2.7, 5.0})
    CHECK(std_normal_quantile(std_normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));

  CHECK_THROWS_AS(std_normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(1.0), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(-0.2), DomainError);
}

TEST_CASE("p_values") {
  SUBCASE("zero estimate gives p = 1") {
    auto fit = synthetic_fit(Vector::Zero(3), Vector::Ones(3), 100);
    Vector pv = p_values(fit, 1.0);
    for (Index i = 0; i < 3; ++i) CHECK(pv[i] == 1.0);
  }
  SUBCASE("quantile round trip") {
    // choose theta_u so the standardized statistic is exactly Phi^{-1}(0.975)
    Vector theta_u(1), var(1);
    var[0] = 1.0;
    theta_u[0] = std_normal_quantile(0.975) / std::sqrt(400.0);
    auto fit = synthetic_fit(theta_u, var, 400);
    CHECK(p_values(fit, 1.0)[0] == doctest::Approx(0.05).epsilon(1e-12));
  }
  SUBCASE("scaling by sigma_hat") {
    Vector theta_u(1), var(1);
    theta_u[0] = 0.3;
    var[0] = 2.0;
    auto fit = synthetic_fit(theta_u, var, 50);
    double z = std::sqrt(50.0) * 0.3 / std::sqrt(2.0);
    for (double s : {0.5, 1.0, 2.0})
      CHECK(p_values(fit, s)[0] ==
            doctest::Approx(2.0 * (1.0 - std_normal_cdf(z / s))).epsilon(1e-14));
  }
  SUBCASE("degenerate variance proxy throws") {
    auto fit = synthetic_fit(Vector::Ones(2), Vector::Constant(2, 1e-16), 10);
    CHECK_THROWS_AS(p_values(fit, 1.0), ZeroVariance);
  }
  SUBCASE("invalid sigma_hat throws") {
    auto fit = synthetic_fit(Vector::Ones(2), Vector::Ones(2), 10);
    CHECK_THROWS_AS(p_values(fit, 0.0), DomainError);
  }
}

TEST_CASE("decide") {
  Vector pv(4);
  pv << 0.04, 0.06, 0.05, 1.0;
  auto d = decide(pv, 0.05);
  CHECK(d == std::vector<int>{1, 0, 1, 0});  // boundary value rejects
  CHECK(decide(pv, 0.01) == std::vector<int>{0, 0, 0, 0});
  CHECK_THROWS_AS(decide(pv, 0.0), DomainError);
  CHECK_THROWS_AS(decide(pv, 1.0), DomainError);
}

TEST_CASE("confidence_intervals") {
  Rng rng(7);
  Vector theta_u(6), var(6);
  for (Index i = 0; i < 6; ++i) {
    theta_u[i] = rng.normal() * 0.2;
    var[i] = 0.5 + rng.uniform();
  }
  auto fit = synthetic_fit(theta_u, var, 240);

  SUBCASE("exact duality with the test") {
    double sigma_hat = 1.1, alpha = 0.05;
    auto ci = confidence_intervals(fit, sigma_hat, alpha);
    auto d = decide(p_values(fit, sigma_hat), alpha);
    for (Index i = 0; i < 6; ++i) {
      bool zero_outside = ci.lower[i] > 0.0 || ci.upper[i] < 0.0;
      CHECK(zero_outside == (d[i] == 1));
    }
  }
  SUBCASE("width scales with the critical value") {
    auto narrow = confidence_intervals(fit, 1.0, 0.5);
    auto wide = confidence_intervals(fit, 1.0, 0.001);
    for (Index i = 0; i < 6; ++i) {
      CHECK(wide.upper[i] - wide.lower[i] > narrow.upper[i] - narrow.lower[i]);
      double expect = 2.0 * std_normal_quantile(1.0 - 0.001 / 2.0) *
                      std::sqrt(var[i] / 240.0);
      CHECK(wide.upper[i] - wide.lower[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("near-degenerate level") {
    auto ci = confidence_intervals(fit, 1.0, 0.999);
    for (Index i = 0; i < 6; ++i) {
      CHECK(ci.upper[i] >= ci.lower[i]);
      CHECK(ci.upper[i] - ci.lower[i] < 0.001);  // tiny critical value
    }
  }
}

TEST_CASE("robust_sigma") {
  SUBCASE("constant statistics") {
    const Index p = 8;
    Vector theta_u = Vector::Constant(p, 0.7 / std::sqrt(100.0));
    auto fit = synthetic_fit(theta_u, Vector::Ones(p), 100);
    CHECK(robust_sigma(fit, 0.5) ==
          doctest::Approx(0.7 / std_normal_quantile(0.75)).epsilon(1e-12));
  }
  SUBCASE("scale equivariance") {
    Rng rng(5);
    Vector theta_u(50);
    for (Index i = 0; i < 50; ++i) theta_u[i] = rng.normal();
    auto fit = synthetic_fit(theta_u, Vector::Ones(50), 64);
    auto scaled = synthetic_fit(3.0 * theta_u, Vector::Ones(50), 64);
    CHECK(robust_sigma(scaled) == doctest::Approx(3.0 * robust_sigma(fit)).epsilon(1e-13));
  }
  SUBCASE("consistency on exact normal scores") {
    Rng rng(11);
    const Index p = 100000;
    const double sigma = 1.7;
    Vector theta_u(p);
    for (Index i = 0; i < p; ++i) theta_u[i] = sigma * rng.normal() / std::sqrt(900.0);
    auto fit = synthetic_fit(theta_u, Vector::Ones(p), 900);
    CHECK(robust_sigma(fit, 0.5) == doctest::Approx(sigma).epsilon(0.02));
  }
}

TEST_CASE("two-sided power function G") {
  for (double alpha : {0.01, 0.05, 0.2})
    CHECK(std::abs(G(alpha, 0.0) - alpha) < 1e-12);
  CHECK(G(0.05, 10.0) > 0.9999);
  // monotone increasing in u, never below alpha
  double prev = G(0.05, 0.0);
  for (double u = 0.25; u <= 6.0; u += 0.25) {
    double g = G(0.05, u);
    CHECK(g >= prev - 1e-15);
    CHECK(g >= 0.05 - 1e-12);
    prev = g;
  }
  CHECK_THROWS_AS(G(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(G(0.05, -1.0), DomainError);
}

TEST_CASE("predicted_average_power") {
  SUBCASE("empty support has no average") {
    GroundTruth truth;
    truth.theta0 = Vector::Zero(5);
    truth.sigma = 1.0;
    auto pred = predicted_average_power(truth, CovarianceModel::identity(5), 100, 0.05);
    CHECK(pred.per_coordinate.empty());
    CHECK(!pred.average.has_value());
  }
  SUBCASE("single-coordinate closed form") {
    GroundTruth truth;
    truth.theta0 = Vector::Zero(4);
    truth.theta0[2] = 0.1;
    truth.support = {2};
    truth.s0 = 1;
    truth.sigma = 1.0;
    auto pred = predicted_average_power(truth, CovarianceModel::identity(4), 240, 0.05);
    REQUIRE(pred.average.has_value());
    CHECK(*pred.average ==
          doctest::Approx(G(0.05, std::sqrt(240.0) * 0.1)).epsilon(1e-13));
  }
  SUBCASE("power grows with n") {
    GroundTruth truth;
    truth.theta0 = Vector::Zero(12);
    truth.theta0[0] = 0.1;
    truth.support = {0};
    truth.s0 = 1;
    truth.sigma = 1.0;
    auto cov = CovarianceModel::circulant_precision(12, 3);
    auto lo = predicted_average_power(truth, cov, 240, 0.05);
    auto hi = predicted_average_power(truth, cov, 960, 0.05);
    CHECK(*hi.average > *lo.average);
  }
}

TEST_CASE("minimax_quantities") {
  SUBCASE("identity covariance") {
    auto q = minimax_quantities(Matrix::Identity(6, 6), 3);
    CHECK(q.exact);
    CHECK(*q.eta_with_empty == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(*q.eta_without_empty == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.increase_factor_bound == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("s0 = 1 admits only the empty conditioning set") {
    Matrix sigma = Matrix::Identity(3, 3);
    sigma(1, 1) = 2.5;
    auto q = minimax_quantities(sigma, 1);
    CHECK(*q.eta_with_empty == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(!q.eta_without_empty.has_value());
  }
  SUBCASE("2x2 equicorrelated") {
    Matrix sigma(2, 2);
    sigma << 1.0, 0.5, 0.5, 1.0;
    auto q = minimax_quantities(sigma, 2);
    // conditioning on the other coordinate leaves variance 1 - 0.25 = 0.75
    CHECK(*q.eta_with_empty == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(*q.eta_without_empty == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(q.increase_factor_bound == doctest::Approx(std::sqrt(1.5 / 0.5)).epsilon(1e-12));
  }
  SUBCASE("matches a brute-force oracle on a random spd matrix") {
    Rng rng(33);
    Matrix a(5, 5);
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j) a(i, j) = rng.normal();
    Matrix sigma = a * a.transpose() + 2.0 * Matrix::Identity(5, 5);
    const int s0 = 3;
    auto q = minimax_quantities(sigma, s0);

    double oracle = 0.0;
    for (int i = 0; i < 5; ++i) {
      double best = sigma(i, i);
      for (unsigned mask = 0; mask < 32; ++mask) {
        if (mask & (1u << i)) continue;
        int size = __builtin_popcount(mask);
        if (size < 1 || size >= s0) continue;
        std::vector<int> s;
        for (int v = 0; v < 5; ++v)
          if (mask & (1u << v)) s.push_back(v);
        Matrix sub(size, size);
        Vector cross(size);
        for (int a2 = 0; a2 < size; ++a2) {
          cross[a2] = sigma(i, s[a2]);
          for (int b2 = 0; b2 < size; ++b2) sub(a2, b2) = sigma(s[a2], s[b2]);
        }
        best = std::min(best, sigma(i, i) - cross.dot(sub.inverse() * cross));
      }
      oracle = std::max(oracle, best);
    }
    CHECK(*q.eta_with_empty == doctest::Approx(oracle).epsilon(1e-10));
  }
  SUBCASE("caps trigger TooLarge") {
    CHECK_THROWS_AS(minimax_quantities(Matrix::Identity(25, 25), 2), TooLarge);
    CHECK_THROWS_AS(minimax_quantities(Matrix::Identity(10, 10), 5), TooLarge);
    // bound-only mode has no cap
    auto q = minimax_quantities(Matrix::Identity(25, 25), 2, false);
    CHECK(!q.exact);
    CHECK(q.increase_factor_bound == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("confidence interval coverage at realistic scale") {
  // synthetic standardized setting: theta_u ~ N(theta0, sigma^2 v / n)
  Rng rng(17);
  const Index p = 2000;
  const double sigma = 1.0;
  Vector theta0(p), theta_u(p), var(p);
  for (Index i = 0; i < p; ++i) {
    theta0[i] = (i % 10 == 0) ? 0.1 : 0.0;
    var[i] = 0.8 + 0.4 * rng.uniform();
    theta_u[i] = theta0[i] + sigma * std::sqrt(var[i] / 240.0) * rng.normal();
  }
  auto fit = synthetic_fit(theta_u, var, 240);
  auto ci = confidence_intervals(fit, sigma, 0.05);
  int covered = 0;
  for (Index i = 0; i < p; ++i)
    if (ci.lower[i] <= theta0[i] && theta0[i] <= ci.upper[i]) ++covered;
  CHECK(static_cast<double>(covered) / p > 0.93);
  CHECK(static_cast<double>(covered) / p < 0.97);
}
