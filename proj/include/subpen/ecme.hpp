#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "subpen/penalty.hpp"

namespace subpen {

struct RegressionProblem {
  Eigen::MatrixXd X;  // n x p design
  Eigen::VectorXd y;  // n responses

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  void validate() const;  // finite entries, n >= 1, p >= 1
};

// Alg1 carries one local regularization parameter t_j per coefficient;
// Alg2 shares one nu across the separable prior; Alg3 shares one nu with the
// nonseparable ||b||_1 prior.
enum class Variant { Alg1, Alg2, Alg3 };

std::string_view variant_name(Variant v);
Variant variant_from_string(std::string_view name);

struct EcmeConfig {
  Variant variant = Variant::Alg1;
  PenaltySpec penalty;
  double alpha_t = 10.0;  // Gamma prior Ga(alpha_t, 1/beta_t) on t_j; alpha_t > 1
  double beta_t = 1.0;
  double alpha_sigma = 0.0;  // defaults give the improper p(sigma) ~ 1/sigma
  double beta_sigma = 0.0;
  int max_iter = 500;
  double tol = 1e-7;  // relative objective-change stopping rule
  double lasso_tol = 1e-8;
  int lasso_max_sweeps = 10000;

  void validate() const;
};

enum class EcmeStatus { Converged, MaxIterReached, AbortedNonFinite };

struct EcmeState {
  Eigen::VectorXd b;
  double sigma = 1.0;
  // Size p for Alg1 (the t_j), size 1 for Alg2/Alg3 (the shared nu).
  Eigen::VectorXd t;
  Eigen::VectorXd w;  // E-step weights of the last iteration (uniform for Alg3)
  int iter = 0;
  std::vector<double> objective_trace;
  EcmeStatus status = EcmeStatus::MaxIterReached;
  double kkt_residual = 0.0;
  int sigma_floor_hits = 0;
  std::string message;

  double nu() const { return t(0); }
};

struct LassoResult {
  Eigen::VectorXd beta;
  double kkt_residual = 0.0;
  int sweeps = 0;
  bool converged = false;
};

// Weighted lasso argmin_b 1/2 ||y - X b||^2 + sum_j w_j |b_j| by cyclic
// coordinate descent with soft thresholding; active-set sweeps after each
// full pass, warm-started from `warm` (pass an empty vector for a cold
// start). The returned kkt_residual is checked against
// kappa = 1e-6 max(1, ||X^T y||_inf); non-convergence is reported, not thrown.
LassoResult weighted_lasso(const RegressionProblem& problem, const Eigen::VectorXd& weights,
                           const Eigen::VectorXd& warm, double tol, int max_sweeps);

// Max KKT violation of `beta` for the weighted lasso.
double lasso_kkt_residual(const RegressionProblem& problem, const Eigen::VectorXd& weights,
                          const Eigen::VectorXd& beta);

// E-step weights: Alg1 w_j = t_j Psi'(|b_j|/sigma); Alg2 nu Psi'(|b_j|/sigma);
// Alg3 a uniform nu Psi'(||b||_1/sigma). LHALF floors its argument at 1e-8
// instead of erroring at 0.
Eigen::VectorXd e_step(const EcmeState& state, const EcmeConfig& config,
                       const RegressionProblem& problem);

struct CmResult {
  LassoResult lasso;
  double sigma = 0.0;
  bool sigma_floored = false;
  double rss = 0.0;
};

// CM-step: weighted lasso for b, then the closed-form
// sigma = (||y - X b||^2 + beta_sigma + 2 sum_j w_j |b_j|) / (n + alpha_sigma + 2p + 2),
// floored at sigma_floor.
CmResult cm_step(const RegressionProblem& problem, const EcmeConfig& config,
                 const Eigen::VectorXd& weights, const Eigen::VectorXd& warm,
                 double sigma_floor);

// CME-step. Alg1: t_j = (alpha_t - 1) / (beta_t + Psi(|b_j|/sigma)), with the
// (alpha_t + 1) numerator for LHALF; Alg2: nu = (alpha_t - 1) / (beta_t +
// sum_j Psi(|b_j|/sigma)); Alg3: nu = (alpha_t - 1) / (beta_t + Psi(||b||_1/sigma)).
Eigen::VectorXd cme_step(const Eigen::VectorXd& b, double sigma, const EcmeConfig& config);

// Log pseudo-posterior up to the y-only constant:
//   -((n + alpha_sigma + 2p)/2 + 1) log sigma - (||y - X b||^2 + beta_sigma)/(2 sigma)
//   - sum_j t_j Psi(|b_j|/sigma) + sum_j [(alpha_t - 1) log t_j - beta_t t_j],
// with the single-nu analogue for Alg2/Alg3. For Alg1 + LHALF the proper
// l_{1/2} prior contributes an extra 2 log t_j per coefficient, i.e. the
// exponent becomes (alpha_t + 1); this is what makes the printed
// (alpha_t + 1) CME update a maximizer and keeps the trace monotone.
double objective(const EcmeState& state, const EcmeConfig& config,
                 const RegressionProblem& problem);

// Full ECME loop: E -> CM -> CME, stopping when the relative objective
// change drops below tol or max_iter is hit. Deterministic given its inputs.
EcmeState run(const RegressionProblem& problem, const EcmeConfig& config);

double sigma_floor_for(const Eigen::VectorXd& y);

}  // namespace subpen
