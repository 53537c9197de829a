#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace subpen {

enum class DataModel { S, M, L, Custom };

// One of the simulated regression designs: Data S (n=35, p=30, constant
// 0.4 off-diagonal correlation), Data M (n=100, p=200, AR(1) 0.7), Data L
// (n=500, p=1000, five diagonal blocks of the Data M covariance), or a
// caller-supplied model.
struct DataModelSpec {
  DataModel name = DataModel::Custom;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::VectorXd b_true;
  Eigen::MatrixXd covariance;

  static DataModelSpec model_s();
  static DataModelSpec model_m();
  static DataModelSpec model_l();
  static DataModelSpec custom(Eigen::Index n, Eigen::VectorXd b_true, Eigen::MatrixXd covariance);

  // Same model with a different sample size (used by sanity checks).
  DataModelSpec with_n(Eigen::Index n_override) const;

  void validate() const;
};

DataModelSpec data_model(DataModel which);
DataModel data_model_from_string(std::string_view name);
std::string_view data_model_name(DataModel which);

struct GeneratedData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd b_true;
  double sigma_true = 0.0;  // noise standard deviation
  std::uint64_t seed = 0;
};

// sigma = sqrt(b' Sigma b) / snr. sigma is the noise *standard deviation*:
// SPE's stated minimum of 1 at b_hat = b requires E(y - x b)^2 = sigma^2.
double sigma_from_snr(const Eigen::VectorXd& b_true, const Eigen::MatrixXd& covariance,
                      double snr);

// Rows of X are N(0, Sigma) via the Cholesky factor; y = X b + sigma * z.
GeneratedData generate(const DataModelSpec& spec, double snr, std::uint64_t seed);

// Standardized prediction error E(y - x b_hat)^2 / sigma^2 over a fresh
// Gaussian test point, in closed form: ((b_hat-b)' Sigma (b_hat-b) + sigma^2)
// / sigma^2. Equals 1 exactly at b_hat = b_true.
double spe(const Eigen::VectorXd& b_hat, const Eigen::VectorXd& b_true,
           const Eigen::MatrixXd& covariance, double sigma_true);

// Monte-Carlo version of spe() over n_test fresh points, for fidelity checks.
double spe_empirical(const Eigen::VectorXd& b_hat, const Eigen::VectorXd& b_true,
                     const Eigen::MatrixXd& covariance, double sigma_true,
                     std::size_t n_test, std::uint64_t seed);

// Percentage of truly zero coefficients estimated as zero
// (|b_hat_i| <= zero_tol). Requires at least one true zero.
double zero_recovery(const Eigen::VectorXd& b_hat, const Eigen::VectorXd& b_true,
                     double zero_tol = 1e-8);

}  // namespace subpen
