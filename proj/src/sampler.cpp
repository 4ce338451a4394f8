#include "delasso/sampler.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace delasso {

void ExperimentConfig::validate() const {
  if (n < 1 || p < 1) throw ConfigError("config: n and p must be >= 1");
  if (s0 < 0 || s0 > p) throw ConfigError("config: need 0 <= s0 <= p");
  if (sigma <= 0.0) throw ConfigError("config: sigma must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("config: alpha must be in (0,1)");
  if (replications < 1) throw ConfigError("config: replications must be >= 1");
  if (cov.p != p) throw ConfigError("config: covariance dimension != p");
}

namespace {

Matrix read_square_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open cov_sigma_csv " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("config: empty cov_sigma_csv");
  Matrix m(rows.size(), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("config: ragged cov_sigma_csv");
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }

  static const std::set<std::string> known = {
      "n",     "p",            "s0",   "theta_value",   "sigma",        "alpha",
      "replications", "seed",  "cov",  "cov_bandwidth", "cov_sigma_csv"};
  for (const auto& [key, val] : kv)
    if (!known.count(key)) throw ConfigError("config: unknown field '" + key + "'");

  ExperimentConfig cfg;
  auto geti = [&](const char* k, int def) {
    if (!kv.count(k)) return def;
    try {
      size_t pos = 0;
      int v = std::stoi(kv[k], &pos);
      if (pos != kv[k].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("config: field '") + k + "' is not an integer");
    }
  };
  auto getd = [&](const char* k, double def) {
    if (!kv.count(k)) return def;
    try {
      size_t pos = 0;
      double v = std::stod(kv[k], &pos);
      if (pos != kv[k].size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError(std::string("config: field '") + k + "' is not a number");
    }
  };
  cfg.n = geti("n", cfg.n);
  cfg.p = geti("p", cfg.p);
  cfg.s0 = geti("s0", cfg.s0);
  cfg.theta_value = getd("theta_value", cfg.theta_value);
  cfg.sigma = getd("sigma", cfg.sigma);
  cfg.alpha = getd("alpha", cfg.alpha);
  cfg.replications = geti("replications", cfg.replications);
  if (kv.count("seed")) {
    try {
      cfg.seed = std::stoull(kv["seed"]);
    } catch (const std::exception&) {
      throw ConfigError("config: field 'seed' is not an integer");
    }
  }

  std::string covkind = kv.count("cov") ? kv["cov"] : "identity";
  if (covkind == "identity") {
    cfg.cov = CovarianceModel::identity(cfg.p);
  } else if (covkind == "circulant") {
    if (!kv.count("cov_bandwidth")) throw ConfigError("config: circulant cov needs cov_bandwidth");
    cfg.cov = CovarianceModel::circulant_precision(cfg.p, geti("cov_bandwidth", 0));
  } else if (covkind == "explicit") {
    if (!kv.count("cov_sigma_csv")) throw ConfigError("config: explicit cov needs cov_sigma_csv");
    cfg.cov = CovarianceModel::explicit_sigma(read_square_csv(kv["cov_sigma_csv"]));
  } else {
    throw ConfigError("config: unknown cov kind '" + covkind + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Matrix sample_design(const Matrix& chol_lower, int n, Rng& rng) {
  const Index p = chol_lower.rows();
  Matrix g(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) g(i, j) = rng.normal();
  // rows are L g_i, i.e. X = G L^T
  return g * chol_lower.transpose();
}

Matrix sample_design(const CovarianceModel& cov, int n, Rng& rng) {
  auto mat = materialize_covariance(cov);
  Eigen::LLT<Matrix> llt(mat.sigma);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("sample_design: Cholesky of Sigma failed");
  Matrix lower = llt.matrixL();
  return sample_design(lower, n, rng);
}

GroundTruth sample_theta0(int p, int s0, double theta_value, double sigma, Rng& rng) {
  if (s0 > p) throw DomainError("sample_theta0: s0 > p");
  // Fisher-Yates prefix over index pool
  std::vector<int> pool(p);
  for (int i = 0; i < p; ++i) pool[i] = i;
  for (int i = 0; i < s0; ++i) {
    int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(p - i)));
    std::swap(pool[i], pool[j]);
  }
  GroundTruth truth;
  truth.theta0 = Vector::Zero(p);
  truth.support.assign(pool.begin(), pool.begin() + s0);
  std::sort(truth.support.begin(), truth.support.end());
  for (int i : truth.support) truth.theta0[i] = theta_value;
  truth.s0 = s0;
  truth.sigma = sigma;
  return truth;
}

Vector sample_response(const Matrix& X, const GroundTruth& truth, Rng& rng) {
  if (X.cols() != truth.theta0.size())
    throw ShapeMismatch("sample_response: X columns != theta0 length");
  Vector y = X * truth.theta0;
  for (Index i = 0; i < y.size(); ++i) y[i] += truth.sigma * rng.normal();
  return y;
}

}  // namespace delasso
