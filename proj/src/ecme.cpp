#include "subpen/ecme.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subpen {

namespace {

constexpr double kLHalfFloor = 1e-8;  // floor on |b|/sigma inside LHALF weights

double population_variance(const Eigen::VectorXd& y) {
  const double mean = y.mean();
  return (y.array() - mean).square().mean();
}

double soft_threshold(double z, double w) {
  if (z > w) return z - w;
  if (z < -w) return z + w;
  return 0.0;
}

}  // namespace

void RegressionProblem::validate() const {
  if (X.rows() < 1 || X.cols() < 1)
    throw std::invalid_argument("RegressionProblem: need n >= 1 and p >= 1");
  if (y.size() != X.rows())
    throw std::invalid_argument("RegressionProblem: y length must match rows of X");
  if (!X.allFinite() || !y.allFinite())
    throw std::invalid_argument("RegressionProblem: X and y must be finite");
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Alg1: return "alg1";
    case Variant::Alg2: return "alg2";
    case Variant::Alg3: return "alg3";
  }
  throw std::invalid_argument("variant_name: unknown variant");
}

Variant variant_from_string(std::string_view name) {
  std::string low(name);
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (low == "alg1") return Variant::Alg1;
  if (low == "alg2") return Variant::Alg2;
  if (low == "alg3") return Variant::Alg3;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

void EcmeConfig::validate() const {
  penalty.validate();
  if (!(alpha_t > 1.0)) throw std::invalid_argument("EcmeConfig: alpha_t must exceed 1");
  if (!(beta_t > 0.0)) throw std::invalid_argument("EcmeConfig: beta_t must be positive");
  if (alpha_sigma < 0.0 || beta_sigma < 0.0)
    throw std::invalid_argument("EcmeConfig: alpha_sigma and beta_sigma must be nonnegative");
  if (max_iter < 1) throw std::invalid_argument("EcmeConfig: max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("EcmeConfig: tol must be positive");
  if (!(lasso_tol > 0.0) || lasso_max_sweeps < 1)
    throw std::invalid_argument("EcmeConfig: bad inner lasso settings");
}

double lasso_kkt_residual(const RegressionProblem& problem, const Eigen::VectorXd& weights,
                          const Eigen::VectorXd& beta) {
  const Eigen::VectorXd r = problem.y - problem.X * beta;
  const Eigen::VectorXd g = problem.X.transpose() * r;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) == 0.0)
      worst = std::max(worst, std::max(0.0, std::abs(g(j)) - weights(j)));
    else
      worst = std::max(worst, std::abs(g(j) - weights(j) * (beta(j) > 0 ? 1.0 : -1.0)));
  }
  return worst;
}

LassoResult weighted_lasso(const RegressionProblem& problem, const Eigen::VectorXd& weights,
                           const Eigen::VectorXd& warm, double tol, int max_sweeps) {
  problem.validate();
  const Eigen::Index p = problem.p();
  if (weights.size() != p) throw std::invalid_argument("weighted_lasso: weight size mismatch");
  for (Eigen::Index j = 0; j < p; ++j)
    if (std::isnan(weights(j)) || weights(j) < 0.0)
      throw std::invalid_argument("weighted_lasso: weights must be nonnegative");

  const Eigen::MatrixXd& X = problem.X;
  const Eigen::VectorXd& y = problem.y;
  Eigen::VectorXd beta = (warm.size() == p) ? warm : Eigen::VectorXd::Zero(p);
  const Eigen::VectorXd colsq = X.colwise().squaredNorm();
  Eigen::VectorXd r = y - X * beta;

  const double scale = std::max(1.0, (X.transpose() * y).lpNorm<Eigen::Infinity>());
  const double kappa = 1e-6 * scale;
  const double move_tol = std::max(tol, 1e-15) * scale;

  // One coordinate pass; returns the largest gradient-scale movement c_j |delta|.
  auto pass = [&](bool active_only) {
    double max_move = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (active_only && beta(j) == 0.0) continue;
      const double c = colsq(j);
      if (c <= 0.0) {
        if (beta(j) != 0.0) {  // all-zero column: coefficient pinned at 0
          r.noalias() += X.col(j) * beta(j);
          beta(j) = 0.0;
        }
        continue;
      }
      const double z = X.col(j).dot(r) + c * beta(j);
      const double nb = soft_threshold(z, weights(j)) / c;
      if (nb != beta(j)) {
        r.noalias() += X.col(j) * (beta(j) - nb);
        max_move = std::max(max_move, c * std::abs(nb - beta(j)));
        beta(j) = nb;
      }
    }
    return max_move;
  };

  LassoResult result;
  int sweeps = 0;
  bool converged = false;
  double kkt = std::numeric_limits<double>::infinity();
  while (sweeps < max_sweeps) {
    const double full_move = pass(false);
    ++sweeps;
    while (sweeps < max_sweeps) {
      const double active_move = pass(true);
      ++sweeps;
      if (active_move <= move_tol) break;
    }
    kkt = lasso_kkt_residual(problem, weights, beta);
    if (kkt <= kappa) {
      converged = true;
      break;
    }
    if (full_move <= move_tol) break;  // stalled below the movement floor
  }
  result.beta = std::move(beta);
  result.kkt_residual = kkt;
  result.sweeps = sweeps;
  result.converged = converged;
  return result;
}

Eigen::VectorXd e_step(const EcmeState& state, const EcmeConfig& config,
                       const RegressionProblem& problem) {
  config.validate();
  if (!(state.sigma > 0.0)) throw std::invalid_argument("e_step: sigma must be positive");
  const Eigen::Index p = problem.p();
  const bool lhalf = config.penalty.family == Family::LHalf;
  auto slope = [&](double s) {
    if (lhalf) s = std::max(s, kLHalfFloor);
    return psi_prime(config.penalty, s);
  };
  Eigen::VectorXd w(p);
  switch (config.variant) {
    case Variant::Alg1:
      for (Eigen::Index j = 0; j < p; ++j)
        w(j) = state.t(j) * slope(std::abs(state.b(j)) / state.sigma);
      break;
    case Variant::Alg2:
      for (Eigen::Index j = 0; j < p; ++j)
        w(j) = state.nu() * slope(std::abs(state.b(j)) / state.sigma);
      break;
    case Variant::Alg3: {
      const double s = state.b.lpNorm<1>() / state.sigma;
      w.setConstant(state.nu() * slope(s));
      break;
    }
  }
  return w;
}

CmResult cm_step(const RegressionProblem& problem, const EcmeConfig& config,
                 const Eigen::VectorXd& weights, const Eigen::VectorXd& warm,
                 double sigma_floor) {
  CmResult out;
  out.lasso = weighted_lasso(problem, weights, warm, config.lasso_tol, config.lasso_max_sweeps);
  const double n = static_cast<double>(problem.n());
  const double p = static_cast<double>(problem.p());
  out.rss = (problem.y - problem.X * out.lasso.beta).squaredNorm();
  const double pen = 2.0 * weights.dot(out.lasso.beta.cwiseAbs());
  out.sigma = (out.rss + config.beta_sigma + pen) / (n + config.alpha_sigma + 2.0 * p + 2.0);
  if (out.sigma < sigma_floor) {
    out.sigma = sigma_floor;
    out.sigma_floored = true;
  }
  return out;
}

Eigen::VectorXd cme_step(const Eigen::VectorXd& b, double sigma, const EcmeConfig& config) {
  config.validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("cme_step: sigma must be positive");
  const bool lhalf = config.penalty.family == Family::LHalf;
  switch (config.variant) {
    case Variant::Alg1: {
      Eigen::VectorXd t(b.size());
      for (Eigen::Index j = 0; j < b.size(); ++j) {
        const double s = std::abs(b(j)) / sigma;
        if (lhalf)
          t(j) = (config.alpha_t + 1.0) / (std::sqrt(s) + config.beta_t);
        else
          t(j) = (config.alpha_t - 1.0) / (psi(config.penalty, s) + config.beta_t);
      }
      return t;
    }
    case Variant::Alg2: {
      double total = 0.0;
      for (Eigen::Index j = 0; j < b.size(); ++j)
        total += psi(config.penalty, std::abs(b(j)) / sigma);
      Eigen::VectorXd nu(1);
      nu(0) = (config.alpha_t - 1.0) / (config.beta_t + total);
      return nu;
    }
    case Variant::Alg3: {
      Eigen::VectorXd nu(1);
      nu(0) = (config.alpha_t - 1.0) /
              (config.beta_t + psi(config.penalty, b.lpNorm<1>() / sigma));
      return nu;
    }
  }
  throw std::logic_error("cme_step: unreachable");
}

double objective(const EcmeState& state, const EcmeConfig& config,
                 const RegressionProblem& problem) {
  const double n = static_cast<double>(problem.n());
  const double p = static_cast<double>(problem.p());
  const double rss = (problem.y - problem.X * state.b).squaredNorm();
  double obj = -((n + config.alpha_sigma + 2.0 * p) / 2.0 + 1.0) * std::log(state.sigma) -
               (rss + config.beta_sigma) / (2.0 * state.sigma);
  const bool lhalf = config.penalty.family == Family::LHalf;
  switch (config.variant) {
    case Variant::Alg1: {
      const double t_exp = lhalf ? config.alpha_t + 1.0 : config.alpha_t - 1.0;
      for (Eigen::Index j = 0; j < state.b.size(); ++j) {
        const double s = std::abs(state.b(j)) / state.sigma;
        obj += -state.t(j) * psi(config.penalty, s) + t_exp * std::log(state.t(j)) -
               config.beta_t * state.t(j);
      }
      break;
    }
    case Variant::Alg2: {
      double total = 0.0;
      for (Eigen::Index j = 0; j < state.b.size(); ++j)
        total += psi(config.penalty, std::abs(state.b(j)) / state.sigma);
      obj += -state.nu() * total + (config.alpha_t - 1.0) * std::log(state.nu()) -
             config.beta_t * state.nu();
      break;
    }
    case Variant::Alg3: {
      const double s = state.b.lpNorm<1>() / state.sigma;
      obj += -state.nu() * psi(config.penalty, s) +
             (config.alpha_t - 1.0) * std::log(state.nu()) - config.beta_t * state.nu();
      break;
    }
  }
  return obj;
}

double sigma_floor_for(const Eigen::VectorXd& y) {
  return 1e-10 * population_variance(y) + 1e-300;
}

EcmeState run(const RegressionProblem& problem, const EcmeConfig& config) {
  problem.validate();
  config.validate();
  const Eigen::Index p = problem.p();

  const double floor = sigma_floor_for(problem.y);
  EcmeState state;
  state.b = Eigen::VectorXd::Zero(p);
  state.sigma = std::max(population_variance(problem.y), floor);
  const double t0 = (config.alpha_t - 1.0) / config.beta_t;
  state.t = Eigen::VectorXd::Constant(config.variant == Variant::Alg1 ? p : 1, t0);
  state.w = Eigen::VectorXd::Zero(p);

  double prev_obj = 0.0;
  for (int k = 0; k < config.max_iter; ++k) {
    const Eigen::VectorXd w = e_step(state, config, problem);
    const CmResult cm = cm_step(problem, config, w, state.b, floor);
    state.b = cm.lasso.beta;
    state.sigma = cm.sigma;
    state.kkt_residual = cm.lasso.kkt_residual;
    if (cm.sigma_floored) ++state.sigma_floor_hits;
    state.t = cme_step(state.b, state.sigma, config);
    state.w = w;

    const double obj = objective(state, config, problem);
    if (!std::isfinite(obj)) {
      state.status = EcmeStatus::AbortedNonFinite;
      state.message = "non-finite objective at iteration " + std::to_string(k);
      break;
    }
    state.objective_trace.push_back(obj);
    if (k >= 1 && std::abs(obj - prev_obj) < config.tol * std::max(1.0, std::abs(prev_obj))) {
      state.status = EcmeStatus::Converged;
      prev_obj = obj;
      break;
    }
    prev_obj = obj;
  }
  state.iter = static_cast<int>(state.objective_trace.size());
  return state;
}

}  // namespace subpen
