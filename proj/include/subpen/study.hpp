#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subpen/ecme.hpp"
#include "subpen/simdata.hpp"

namespace subpen {

// One study arm: an ECME variant plus penalty family (tokens like
// "alg1+log", "alg2+cel", "alg3+lhalf", optionally "alg1+pg:2" to pin rho),
// or the plain lasso baseline ("lasso": uniform fixed weight, no CME).
struct ArmSpec {
  bool is_lasso = false;
  Variant variant = Variant::Alg1;
  Family family = Family::Log;
  double rho = 1.0;  // only for pg/cel arms
  std::string token;
};

ArmSpec parse_arm(std::string_view token);

// Penalty for an arm at global tuning gamma: Alg1 sets xi = gamma and
// Alg2/Alg3 set xi = p * gamma (the experimental protocol, applied here and
// not inside penalty_core).
PenaltySpec arm_penalty(const ArmSpec& arm, double gamma, Eigen::Index p);

struct StudyOptions {
  double snr = 3.0;
  int folds = 5;
  std::vector<double> gamma_grid{0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> beta_t_grid{0.1, 1.0, 10.0};
  int replications = 20;
  double alpha_t = 10.0;
  double zero_tol = 1e-8;
  double ecme_tol = 1e-7;
  int ecme_max_iter = 500;
  int threads = 1;
};

struct CvSelection {
  double gamma = 0.0;
  double beta_t = 0.0;
  double mean_mse = 0.0;
};

// K-fold CV over the (gamma, beta_t) grid, minimizing mean validation MSE;
// ties break toward larger gamma, then smaller beta_t (stronger shrinkage).
// The lasso arm scans the uniform weight gamma * (alpha_t - 1) / beta_t over
// the same grid.
CvSelection cross_validate(const RegressionProblem& problem, const ArmSpec& arm,
                           const StudyOptions& options, std::uint64_t seed);

struct FitRecord {
  std::string arm;
  std::string penalty;  // canonical spec text, or 'l1' for the lasso arm
  double gamma = 0.0;
  double beta_t = 0.0;
  double spe = 0.0;
  double zero_recovery = 0.0;
  int iterations = 0;
  double sigma_hat = 0.0;
  double objective = 0.0;
  int n_nonzero = 0;
  bool failed = false;
  std::string error;
};

struct ArmSummary {
  std::string arm;
  std::string penalty;
  double mean_spe = 0.0;
  double sd_spe = 0.0;
  double mean_zero_recovery = 0.0;
  int n_reps = 0;
  int n_failed = 0;
};

struct StudyResult {
  std::vector<ArmSummary> table;                  // one row per arm
  std::vector<std::vector<FitRecord>> records;    // [replication][arm]
  // Full ECME state of the replication-0 fit per arm (empty for lasso arms),
  // kept for the t-vs-b profile output.
  std::vector<std::optional<EcmeState>> first_fit;
  std::vector<ArmSpec> arms;
};

// Full replication study: per replication, generate data, cross-validate
// each arm, refit on the whole training set, score SPE / zero recovery.
// Replications run on split sub-seeds and may execute in parallel; results
// are identical for any thread count.
StudyResult run_study(const DataModelSpec& spec, std::span<const ArmSpec> arms,
                      const StudyOptions& options, std::uint64_t seed);

// (t_hat, |b_hat|) rows sorted by t_hat ascending; requires an Alg1 fit.
std::vector<std::pair<double, double>> t_vs_b_profile(const EcmeState& state);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// CSV helpers. Floats are printed with 6 significant digits; files are
// comma-separated, header first, newline-terminated.
std::string format_sig6(double v);
void write_study_table(const std::filesystem::path& path, const StudyResult& result);
void write_replication_log(const std::filesystem::path& path, const StudyResult& result);
void write_profile(const std::filesystem::path& path,
                   std::span<const std::pair<double, double>> rows);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions inside
// tasks are rethrown on the caller thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace subpen
