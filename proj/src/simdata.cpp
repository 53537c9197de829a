#include "subpen/simdata.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "subpen/rng.hpp"

namespace subpen {

namespace {

Eigen::MatrixXd ar1_covariance(Eigen::Index p, double rate) {
  Eigen::MatrixXd cov(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      cov(i, j) = std::pow(rate, std::abs(static_cast<double>(i - j)));
  return cov;
}

}  // namespace

DataModelSpec DataModelSpec::model_s() {
  DataModelSpec spec;
  spec.name = DataModel::S;
  spec.n = 35;
  spec.p = 30;
  spec.b_true = Eigen::VectorXd::Zero(30);
  spec.b_true.head(6) << 0.03, 0.07, 0.1, 0.9, 0.93, 0.97;
  spec.covariance = Eigen::MatrixXd::Constant(30, 30, 0.4);
  spec.covariance.diagonal().setOnes();
  return spec;
}

DataModelSpec DataModelSpec::model_m() {
  DataModelSpec spec;
  spec.name = DataModel::M;
  spec.n = 100;
  spec.p = 200;
  spec.b_true = Eigen::VectorXd::Zero(200);
  for (int i = 0; i < 10; ++i) spec.b_true(20 * i) = 1.0;  // entries 1, 21, ..., 181
  spec.covariance = ar1_covariance(200, 0.7);
  return spec;
}

DataModelSpec DataModelSpec::model_l() {
  const DataModelSpec m = model_m();
  DataModelSpec spec;
  spec.name = DataModel::L;
  spec.n = 500;
  spec.p = 1000;
  spec.b_true = Eigen::VectorXd::Zero(1000);
  spec.covariance = Eigen::MatrixXd::Zero(1000, 1000);
  for (int block = 0; block < 5; ++block) {
    spec.b_true.segment(200 * block, 200) = m.b_true;
    spec.covariance.block(200 * block, 200 * block, 200, 200) = m.covariance;
  }
  return spec;
}

DataModelSpec DataModelSpec::custom(Eigen::Index n, Eigen::VectorXd b_true,
                                    Eigen::MatrixXd covariance) {
  DataModelSpec spec;
  spec.name = DataModel::Custom;
  spec.n = n;
  spec.p = b_true.size();
  spec.b_true = std::move(b_true);
  spec.covariance = std::move(covariance);
  spec.validate();
  return spec;
}

DataModelSpec DataModelSpec::with_n(Eigen::Index n_override) const {
  DataModelSpec out = *this;
  out.n = n_override;
  out.validate();
  return out;
}

void DataModelSpec::validate() const {
  if (n < 1 || p < 1) throw std::invalid_argument("DataModelSpec: need n >= 1 and p >= 1");
  if (b_true.size() != p) throw std::invalid_argument("DataModelSpec: b_true size mismatch");
  if (covariance.rows() != p || covariance.cols() != p)
    throw std::invalid_argument("DataModelSpec: covariance must be p x p");
  if (!b_true.allFinite() || !covariance.allFinite())
    throw std::invalid_argument("DataModelSpec: non-finite entries");
}

DataModelSpec data_model(DataModel which) {
  switch (which) {
    case DataModel::S: return DataModelSpec::model_s();
    case DataModel::M: return DataModelSpec::model_m();
    case DataModel::L: return DataModelSpec::model_l();
    case DataModel::Custom: break;
  }
  throw std::invalid_argument("data_model: no built-in definition for CUSTOM");
}

DataModel data_model_from_string(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "S") return DataModel::S;
  if (up == "M") return DataModel::M;
  if (up == "L") return DataModel::L;
  throw std::invalid_argument("unknown data model '" + std::string(name) + "'");
}

std::string_view data_model_name(DataModel which) {
  switch (which) {
    case DataModel::S: return "S";
    case DataModel::M: return "M";
    case DataModel::L: return "L";
    case DataModel::Custom: return "CUSTOM";
  }
  throw std::invalid_argument("data_model_name: unknown model");
}

double sigma_from_snr(const Eigen::VectorXd& b_true, const Eigen::MatrixXd& covariance,
                      double snr) {
  if (!(snr > 0.0)) throw std::invalid_argument("sigma_from_snr: snr must be positive");
  if (covariance.rows() != b_true.size() || covariance.cols() != b_true.size())
    throw std::invalid_argument("sigma_from_snr: dimension mismatch");
  const double quad = b_true.dot(covariance * b_true);
  if (!(quad > 0.0))
    throw std::invalid_argument("sigma_from_snr: b' Sigma b must be positive (SNR undefined)");
  return std::sqrt(quad) / snr;
}

GeneratedData generate(const DataModelSpec& spec, double snr, std::uint64_t seed) {
  spec.validate();
  const double sigma = sigma_from_snr(spec.b_true, spec.covariance, snr);
  Eigen::LLT<Eigen::MatrixXd> llt(spec.covariance);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("generate: covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();

  Rng rng(seed);
  Eigen::MatrixXd Z(spec.n, spec.p);
  for (Eigen::Index i = 0; i < spec.n; ++i)
    for (Eigen::Index j = 0; j < spec.p; ++j) Z(i, j) = rng.normal();

  GeneratedData data;
  data.X.noalias() = Z * L.transpose();
  data.y = data.X * spec.b_true;
  for (Eigen::Index i = 0; i < spec.n; ++i) data.y(i) += sigma * rng.normal();
  data.b_true = spec.b_true;
  data.sigma_true = sigma;
  data.seed = seed;
  return data;
}

double spe(const Eigen::VectorXd& b_hat, const Eigen::VectorXd& b_true,
           const Eigen::MatrixXd& covariance, double sigma_true) {
  if (b_hat.size() != b_true.size() || covariance.rows() != b_true.size())
    throw std::invalid_argument("spe: dimension mismatch");
  if (!(sigma_true > 0.0)) throw std::invalid_argument("spe: sigma_true must be positive");
  const Eigen::VectorXd d = b_hat - b_true;
  const double s2 = sigma_true * sigma_true;
  return (d.dot(covariance * d) + s2) / s2;
}

double spe_empirical(const Eigen::VectorXd& b_hat, const Eigen::VectorXd& b_true,
                     const Eigen::MatrixXd& covariance, double sigma_true,
                     std::size_t n_test, std::uint64_t seed) {
  if (n_test == 0) throw std::invalid_argument("spe_empirical: n_test must be >= 1");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("spe_empirical: covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  Rng rng(seed);
  Eigen::VectorXd z(b_true.size());
  double total = 0.0;
  for (std::size_t i = 0; i < n_test; ++i) {
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
    const Eigen::VectorXd x = L * z;
    const double y = x.dot(b_true) + sigma_true * rng.normal();
    const double err = y - x.dot(b_hat);
    total += err * err;
  }
  return total / (static_cast<double>(n_test) * sigma_true * sigma_true);
}

double zero_recovery(const Eigen::VectorXd& b_hat, const Eigen::VectorXd& b_true,
                     double zero_tol) {
  if (b_hat.size() != b_true.size()) throw std::invalid_argument("zero_recovery: size mismatch");
  long zeros = 0, hits = 0;
  for (Eigen::Index i = 0; i < b_true.size(); ++i) {
    if (b_true(i) == 0.0) {
      ++zeros;
      if (std::abs(b_hat(i)) <= zero_tol) ++hits;
    }
  }
  if (zeros == 0)
    throw std::invalid_argument("zero_recovery: b_true has no zero entries");
  return 100.0 * static_cast<double>(hits) / static_cast<double>(zeros);
}

}  // namespace subpen
