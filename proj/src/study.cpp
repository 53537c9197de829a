#include "subpen/study.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "subpen/rng.hpp"

namespace subpen {

namespace {

struct FoldSplit {
  RegressionProblem train;
  Eigen::MatrixXd x_val;
  Eigen::VectorXd y_val;
};

std::vector<FoldSplit> make_folds(const RegressionProblem& problem, int folds,
                                  std::uint64_t seed) {
  const Eigen::Index n = problem.n();
  if (folds < 2 || folds > n)
    throw std::invalid_argument("cross_validate: folds must lie in [2, n]");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = idx.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
    std::swap(idx[i], idx[std::min(j, i)]);
  }
  std::vector<FoldSplit> out(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    const Eigen::Index lo = n * f / folds;
    const Eigen::Index hi = n * (f + 1) / folds;
    const Eigen::Index n_val = hi - lo;
    const Eigen::Index n_tr = n - n_val;
    FoldSplit& split = out[static_cast<std::size_t>(f)];
    split.train.X.resize(n_tr, problem.p());
    split.train.y.resize(n_tr);
    split.x_val.resize(n_val, problem.p());
    split.y_val.resize(n_val);
    Eigen::Index tr = 0, va = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = idx[static_cast<std::size_t>(i)];
      if (i >= lo && i < hi) {
        split.x_val.row(va) = problem.X.row(row);
        split.y_val(va++) = problem.y(row);
      } else {
        split.train.X.row(tr) = problem.X.row(row);
        split.train.y(tr++) = problem.y(row);
      }
    }
  }
  return out;
}

EcmeConfig make_config(const ArmSpec& arm, double gamma, double beta_t, Eigen::Index p,
                       const StudyOptions& options) {
  EcmeConfig config;
  config.variant = arm.variant;
  config.penalty = arm_penalty(arm, gamma, p);
  config.alpha_t = options.alpha_t;
  config.beta_t = beta_t;
  config.tol = options.ecme_tol;
  config.max_iter = options.ecme_max_iter;
  return config;
}

double lasso_weight(double gamma, double beta_t, const StudyOptions& options) {
  // Uniform fixed weight; gamma scales the frozen t0 = (alpha_t - 1)/beta_t
  // so the default grid doubles as a lambda path.
  return gamma * (options.alpha_t - 1.0) / beta_t;
}

Eigen::VectorXd fit_coefficients(const RegressionProblem& problem, const ArmSpec& arm,
                                 double gamma, double beta_t, const StudyOptions& options,
                                 EcmeState* state_out) {
  if (arm.is_lasso) {
    const Eigen::VectorXd w =
        Eigen::VectorXd::Constant(problem.p(), lasso_weight(gamma, beta_t, options));
    LassoResult res = weighted_lasso(problem, w, Eigen::VectorXd(), 1e-8, 10000);
    return res.beta;
  }
  const EcmeConfig config = make_config(arm, gamma, beta_t, problem.p(), options);
  EcmeState state = run(problem, config);
  Eigen::VectorXd beta = state.b;
  if (state_out) *state_out = std::move(state);
  return beta;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

ArmSpec parse_arm(std::string_view token) {
  std::string low(token);
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  ArmSpec arm;
  arm.token = low;
  if (low == "lasso") {
    arm.is_lasso = true;
    return arm;
  }
  const auto plus = low.find('+');
  if (plus == std::string::npos)
    throw std::invalid_argument("bad algorithm token '" + std::string(token) +
                                "' (expected e.g. alg1+log or lasso)");
  arm.variant = variant_from_string(low.substr(0, plus));
  std::string fam = low.substr(plus + 1);
  const auto colon = fam.find(':');
  if (colon != std::string::npos) {
    arm.rho = std::stod(fam.substr(colon + 1));
    fam = fam.substr(0, colon);
    if (fam == "pg")
      arm.family = Family::Pg;
    else if (fam == "cel")
      arm.family = Family::Cel;
    else
      throw std::invalid_argument("rho suffix only applies to pg/cel arms");
  } else if (fam == "log") {
    arm.family = Family::Log;
  } else if (fam == "exp") {
    arm.family = Family::Exp;
  } else if (fam == "lfr") {
    arm.family = Family::Lfr;
  } else if (fam == "cel") {
    arm.family = Family::Cel1;  // the fixed table row
  } else if (fam == "lhalf") {
    arm.family = Family::LHalf;
  } else {
    throw std::invalid_argument("unknown penalty '" + fam + "' in arm token");
  }
  return arm;
}

PenaltySpec arm_penalty(const ArmSpec& arm, double gamma, Eigen::Index p) {
  if (arm.is_lasso) throw std::invalid_argument("arm_penalty: lasso arm has no penalty spec");
  const double xi =
      (arm.variant == Variant::Alg1) ? gamma : static_cast<double>(p) * gamma;
  if (arm.family == Family::Pg || arm.family == Family::Cel)
    return PenaltySpec(arm.family, xi, gamma, arm.rho);
  return PenaltySpec(arm.family, xi, gamma);
}

CvSelection cross_validate(const RegressionProblem& problem, const ArmSpec& arm,
                           const StudyOptions& options, std::uint64_t seed) {
  problem.validate();
  if (options.gamma_grid.empty() || options.beta_t_grid.empty())
    throw std::invalid_argument("cross_validate: grids must be nonempty");
  const auto folds = make_folds(problem, options.folds, seed);

  CvSelection best;
  bool have_best = false;
  for (double gamma : options.gamma_grid) {
    for (double beta_t : options.beta_t_grid) {
      double sse = 0.0;
      double n_val = 0.0;
      for (const FoldSplit& split : folds) {
        const Eigen::VectorXd beta =
            fit_coefficients(split.train, arm, gamma, beta_t, options, nullptr);
        sse += (split.y_val - split.x_val * beta).squaredNorm();
        n_val += static_cast<double>(split.y_val.size());
      }
      const double mse = sse / n_val;
      const bool better =
          !have_best || mse < best.mean_mse ||
          (mse == best.mean_mse &&
           (gamma > best.gamma || (gamma == best.gamma && beta_t < best.beta_t)));
      if (better) {
        best = {gamma, beta_t, mse};
        have_best = true;
      }
    }
  }
  return best;
}

StudyResult run_study(const DataModelSpec& spec, std::span<const ArmSpec> arms,
                      const StudyOptions& options, std::uint64_t seed) {
  spec.validate();
  if (arms.empty()) throw std::invalid_argument("run_study: no arms given");
  if (options.replications < 1)
    throw std::invalid_argument("run_study: replications must be >= 1");

  StudyResult result;
  result.arms.assign(arms.begin(), arms.end());
  result.records.resize(static_cast<std::size_t>(options.replications));
  result.first_fit.resize(arms.size());

  std::mutex first_fit_mutex;
  parallel_for(
      static_cast<std::size_t>(options.replications), options.threads,
      [&](std::size_t rep) {
        const std::uint64_t rep_seed = substream_seed(seed, rep);
        const GeneratedData data = generate(spec, options.snr, substream_seed(rep_seed, 0));
        RegressionProblem problem{data.X, data.y};
        auto& row = result.records[rep];
        row.resize(arms.size());
        for (std::size_t a = 0; a < arms.size(); ++a) {
          const ArmSpec& arm = arms[a];
          FitRecord& rec = row[a];
          rec.arm = arm.token;
          try {
            const CvSelection sel =
                cross_validate(problem, arm, options, substream_seed(rep_seed, 1 + a));
            rec.gamma = sel.gamma;
            rec.beta_t = sel.beta_t;
            EcmeState state;
            const Eigen::VectorXd beta = fit_coefficients(
                problem, arm, sel.gamma, sel.beta_t, options, arm.is_lasso ? nullptr : &state);
            rec.penalty =
                arm.is_lasso ? "l1" : arm_penalty(arm, sel.gamma, problem.p()).to_string();
            rec.spe = spe(beta, data.b_true, spec.covariance, data.sigma_true);
            rec.zero_recovery = zero_recovery(beta, data.b_true, options.zero_tol);
            rec.n_nonzero =
                static_cast<int>((beta.array().abs() > options.zero_tol).count());
            if (!arm.is_lasso) {
              rec.iterations = state.iter;
              rec.sigma_hat = state.sigma;
              rec.objective = state.objective_trace.empty() ? 0.0
                                                            : state.objective_trace.back();
              if (rep == 0) {
                std::lock_guard<std::mutex> lock(first_fit_mutex);
                result.first_fit[a] = std::move(state);
              }
            }
          } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
          }
        }
      });

  for (std::size_t a = 0; a < arms.size(); ++a) {
    ArmSummary summary;
    summary.arm = arms[a].token;
    std::vector<double> spes, zeros;
    for (const auto& row : result.records) {
      const FitRecord& rec = row[a];
      if (rec.failed) {
        ++summary.n_failed;
        continue;
      }
      spes.push_back(rec.spe);
      zeros.push_back(rec.zero_recovery);
      if (summary.penalty.empty()) summary.penalty = rec.penalty;
    }
    summary.n_reps = static_cast<int>(spes.size());
    if (!spes.empty()) {
      summary.mean_spe = mean_of(spes);
      summary.sd_spe = sd_of(spes);
      summary.mean_zero_recovery = mean_of(zeros);
    }
    result.table.push_back(std::move(summary));
  }
  return result;
}

std::vector<std::pair<double, double>> t_vs_b_profile(const EcmeState& state) {
  if (state.t.size() != state.b.size())
    throw std::invalid_argument(
        "t_vs_b_profile: requires an Alg1 fit with per-coefficient t");
  std::vector<std::pair<double, double>> rows;
  rows.reserve(static_cast<std::size_t>(state.t.size()));
  for (Eigen::Index j = 0; j < state.t.size(); ++j)
    rows.emplace_back(state.t(j), std::abs(state.b(j)));
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return rows;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman: need two equally sized samples of length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean_of(rx), my = mean_of(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;  // a constant sequence has no rank order
  return sxy / std::sqrt(sxx * syy);
}

std::string format_sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void write_study_table(const std::filesystem::path& path, const StudyResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "algorithm,penalty,mean_spe,sd_spe,zero_recovery_pct,n_reps\n";
  for (const ArmSummary& row : result.table) {
    out << row.arm << ',' << row.penalty << ',' << format_sig6(row.mean_spe) << ','
        << format_sig6(row.sd_spe) << ',' << format_sig6(row.mean_zero_recovery) << ','
        << row.n_reps << '\n';
  }
}

void write_replication_log(const std::filesystem::path& path, const StudyResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "replication,algorithm,penalty,gamma,beta_t,spe,zero_recovery_pct,"
         "iterations,sigma_hat,objective,n_nonzero,failed,error\n";
  for (std::size_t rep = 0; rep < result.records.size(); ++rep) {
    for (const FitRecord& rec : result.records[rep]) {
      out << rep << ',' << rec.arm << ',' << rec.penalty << ',' << format_sig6(rec.gamma)
          << ',' << format_sig6(rec.beta_t) << ',' << format_sig6(rec.spe) << ','
          << format_sig6(rec.zero_recovery) << ',' << rec.iterations << ','
          << format_sig6(rec.sigma_hat) << ',' << format_sig6(rec.objective) << ','
          << rec.n_nonzero << ',' << (rec.failed ? 1 : 0) << ',' << rec.error << '\n';
    }
  }
}

void write_profile(const std::filesystem::path& path,
                   std::span<const std::pair<double, double>> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t_hat,abs_b_hat\n";
  for (const auto& [t, b] : rows) out << format_sig6(t) << ',' << format_sig6(b) << '\n';
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const int workers = std::min<int>(std::max(threads, 1), static_cast<int>(n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace subpen
