#pragma once

#include "tailest/adaptive_select.hpp"
#include "tailest/dist_models.hpp"
#include "tailest/tail_estimators.hpp"
#include "tailest/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tailest {

/// One estimator to run inside an experiment.
struct MethodSpec {
  enum class Kind {
    FixedK,        // alpha_hat(k) at a fixed k
    OracleK,       // k from oracle_k(truth.alpha, truth.beta, n)
    ConsistencyK,  // k = ceil(log log n)
    RoughPlugin,   // two-stage rough-then-plugin threshold
    Adaptive,      // data-driven selection
    Hill,          // ratio-of-logs Hill at fraction r
    Generalized,   // thresholds (u, v)
    QuantileDual,  // tail probabilities (q_u, q_v)
  };

  Kind kind = Kind::OracleK;
  int k = 0;                 // FixedK
  scalar_t r = 0.01;         // Hill
  scalar_t u = 0.0, v = 0.0; // Generalized
  scalar_t q_u = 0.0, q_v = 0.0;  // QuantileDual
  scalar_t beta = 1.0;       // RoughPlugin
  AdaptiveConfig adaptive;   // Adaptive
  std::string label;         // optional; distinguishes repeated kinds

  /// Stable method identifier used in CSV output.
  std::string id() const;
};

/// Seeded Monte Carlo experiment: one model, ground-truth class parameters,
/// a grid of sample sizes, and the estimators to compare on shared samples.
struct ExperimentConfig {
  DistributionModel model = DistributionModel::exact_pareto(1.0, 1.0);
  SecondOrderParams truth;
  std::vector<count_t> n_grid;
  int trials = 1;
  seed_t base_seed = 0;
  std::vector<MethodSpec> methods;

  void validate() const;
};

/// One (n, trial, method) outcome. Failed trials carry the error name in
/// `flags` and NaN estimates; they are excluded from medians but counted.
struct TrialRecord {
  count_t n = 0;
  int trial = 0;
  seed_t seed = 0;
  std::string method;
  scalar_t alpha_hat = 0.0;
  scalar_t abs_error = 0.0;
  std::string k_or_params;
  std::string flags;  // "ok" or the error name
  bool failed = false;
};

/// Runs |n_grid| x trials x |methods| estimations. Each (n, trial) pair draws
/// one dataset with seed trial_seed(base_seed, n, trial); all methods see the
/// same sample. Per-trial estimator failures are recorded, never fatal.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

/// Least-squares fit of log(median |error|) against log n.
struct RateFit {
  scalar_t slope = 0.0;
  scalar_t intercept = 0.0;
  scalar_t r_squared = 0.0;
  std::vector<std::pair<scalar_t, scalar_t>> points;  // (log n, log median-error)
};

/// Fits the convergence-rate exponent for one method. Requires >= 3 distinct
/// n with >= 30 successful trials each; throws InsufficientDataError.
RateFit fit_rate(const std::vector<TrialRecord>& records, const std::string& method);

/// Per-(n, method) error summary.
struct SummaryRow {
  count_t n = 0;
  std::string method;
  scalar_t median_error = 0.0;
  scalar_t q25 = 0.0;
  scalar_t q75 = 0.0;
  int fail_count = 0;
};

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

/// Median of the successful absolute errors for one (method, n) cell.
scalar_t median_abs_error(const std::vector<TrialRecord>& records, const std::string& method,
                          count_t n);

/// Which concentration inequality to check per trial.
struct CoverageSpec {
  enum class Kind {
    Bernstein,             // |p_hat_k - p_k| <= 2 sqrt(p_k log(2/delta)/n)
    LargeDeviationA,       // |alpha_hat(k) - (log p_k - log p_{k+1})| <= 6 sqrt(log(2/delta)/(n p_{k+1}))
    LargeDeviationB,       // |alpha_hat(k) - alpha| <= stochastic + bias (needs truth)
    StochasticDominance,   // p_hat_{K+1} <= 24 log(2/delta)/n at the count-floor index K
  };

  Kind kind = Kind::Bernstein;
  int k = 0;
  scalar_t delta = 0.05;
};

struct CoverageReport {
  scalar_t frequency = 0.0;
  int trials = 0;
  int successes = 0;
  scalar_t guaranteed = 0.0;  // 1 - delta or 1 - 2 delta, per inequality
};

/// Empirical frequency with which the named inequality holds over seeded
/// trials of size n from the model. `truth` is used by LargeDeviationB only.
CoverageReport coverage(const DistributionModel& model, const SecondOrderParams& truth,
                        count_t n, int trials, seed_t base_seed, const CoverageSpec& spec);

}  // namespace tailest
