#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "delasso/sampler.hpp"

using namespace delasso;

namespace {

Matrix sample_cov(const Matrix& X) {
  return X.transpose() * X / static_cast<double>(X.rows());
}

}  // namespace

TEST_CASE("sample_design: identity covariance concentrates to I") {
  Rng rng(42);
  Matrix X = sample_design(CovarianceModel::identity(2), 10000, rng);
  CHECK((sample_cov(X) - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("sample_design: deterministic for a fixed seed") {
  Rng a(7), b(7);
  Matrix x1 = sample_design(CovarianceModel::circulant_precision(12, 3), 50, a);
  Matrix x2 = sample_design(CovarianceModel::circulant_precision(12, 3), 50, b);
  CHECK((x1 - x2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample_design: scalar variance") {
  Rng rng(5);
  Matrix sigma(1, 1);
  sigma(0, 0) = 4.0;
  Matrix X = sample_design(CovarianceModel::explicit_sigma(sigma), 20000, rng);
  double var = X.col(0).squaredNorm() / 20000.0;
  CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("sample_design: whitened rows recover identity") {
  auto model = CovarianceModel::circulant_precision(12, 3);
  auto mat = materialize_covariance(model);
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat.omega);
  Matrix omega_half = es.operatorSqrt();

  Rng rng(9);
  Matrix X = sample_design(model, 20000, rng);
  Matrix whitened = X * omega_half;  // rows ~ N(0, I)
  CHECK((sample_cov(whitened) - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff() < 0.06);
}

TEST_CASE("sample_theta0 support structure") {
  Rng rng(1);

  SUBCASE("dense support") {
    auto truth = sample_theta0(5, 5, 0.3, 1.0, rng);
    CHECK(truth.s0 == 5);
    for (Index i = 0; i < 5; ++i) CHECK(truth.theta0[i] == 0.3);
  }
  SUBCASE("empty support") {
    auto truth = sample_theta0(5, 0, 0.3, 1.0, rng);
    CHECK(truth.support.empty());
    CHECK(truth.theta0.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("typical sparse case") {
    auto truth = sample_theta0(300, 30, 0.1, 1.0, rng);
    CHECK(truth.support.size() == 30);
    CHECK(std::is_sorted(truth.support.begin(), truth.support.end()));
    int nonzeros = 0;
    for (Index i = 0; i < 300; ++i)
      if (truth.theta0[i] != 0.0) {
        ++nonzeros;
        CHECK(truth.theta0[i] == 0.1);
      }
    CHECK(nonzeros == 30);
    CHECK(std::adjacent_find(truth.support.begin(), truth.support.end()) ==
          truth.support.end());  // no duplicates
  }
}

TEST_CASE("sample_response: near-noiseless limit") {
  Rng rng(3);
  Matrix X = sample_design(CovarianceModel::identity(8), 40, rng);
  auto truth = sample_theta0(8, 3, 0.5, 1e-12, rng);
  Vector Y = sample_response(X, truth, rng);
  CHECK((Y - X * truth.theta0).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("sample_response: pure-noise moments") {
  Rng rng(17);
  Matrix X = Matrix::Zero(20000, 1);
  GroundTruth truth;
  truth.theta0 = Vector::Zero(1);
  truth.sigma = 1.0;
  Vector Y = sample_response(X, truth, rng);
  double mean = Y.mean();
  double var = (Y.array() - mean).square().sum() / (Y.size() - 1);
  CHECK(std::abs(mean) < 0.05);
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("config parsing") {
  auto cfg = parse_config_text(
      "# comment\n"
      "n = 240\np = 300\ns0 = 30\ntheta_value = 0.1\nsigma = 1.0\n"
      "alpha = 0.05\nreplications = 20\nseed = 12345\n"
      "cov = circulant\ncov_bandwidth = 5\n");
  CHECK(cfg.n == 240);
  CHECK(cfg.p == 300);
  CHECK(cfg.s0 == 30);
  CHECK(cfg.theta_value == 0.1);
  CHECK(cfg.cov.kind == CovarianceModel::Kind::CirculantPrecision);
  CHECK(cfg.cov.bandwidth == 5);
  CHECK(cfg.seed == 12345);
  cfg.validate();

  CHECK_THROWS_AS(parse_config_text("n = -5\np = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("bogus_field = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = twelve\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("n = 10\np = 4\ns0 = 9\n"), ConfigError);
}
