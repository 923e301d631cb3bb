#pragma once

#include "tailest/dist_models.hpp"
#include "tailest/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace tailest {

/// Tail-event probabilities p_k = P(X > e^k) indexed by integer k >= 0.
/// Empirical tables hold exact multiples of 1/n; analytic tables hold model
/// survival values and borrow a nominal n for count-floor logic.
class TailProbTable {
 public:
  static TailProbTable from_dataset(const Dataset& data);
  static TailProbTable analytic(const DistributionModel& model, count_t n, int k_cap);

  /// p_k; zero beyond the stored range.
  scalar_t at(int k) const {
    return (k >= 0 && k < static_cast<int>(p_.size())) ? p_[static_cast<size_t>(k)] : 0.0;
  }

  /// Largest stored index.
  int k_max() const noexcept { return static_cast<int>(p_.size()) - 1; }
  count_t n() const noexcept { return n_; }
  bool empirical() const noexcept { return empirical_; }

 private:
  std::vector<scalar_t> p_;
  count_t n_ = 0;
  bool empirical_ = true;
};

enum class Method { TailEvent, Generalized, QuantileDual, Hill, OracleTailEvent, Adaptive };

const char* method_name(Method m);

/// Record of the inner comparisons run by the adaptive threshold selection.
struct ComparisonRecord {
  int k = 0;
  int k_prime = 0;
  scalar_t alpha_k = 0.0;
  scalar_t alpha_kprime = 0.0;
  scalar_t abs_diff = 0.0;
  scalar_t bound = 0.0;
  bool pass = false;
};

/// One estimate of the tail index together with its tuning and diagnostics.
struct EstimateReport {
  scalar_t alpha_hat = 0.0;
  Method method = Method::TailEvent;
  std::string k_or_params;                  // e.g. "k=3" or "u=...;v=..."
  count_t n = 0;
  std::string seed = "external";
  std::map<std::string, scalar_t> diagnostics;
  std::vector<ComparisonRecord> trace;      // filled by the adaptive method only

  void attach(const Dataset& data);
};

/// Fraction of sample values strictly greater than e^k.
scalar_t empirical_tail_prob(const Dataset& data, int k);

/// Tail-event estimator log(p_k) - log(p_{k+1}). Throws EmptyTailError when
/// the (k+1)-tail is empty.
EstimateReport alpha_hat_k(const Dataset& data, int k);
EstimateReport alpha_hat_k(const TailProbTable& table, int k);

/// Generalized tail-event estimator over thresholds u > v >= 1:
/// (log q_v - log q_u) / (log u - log v). Reduces to alpha_hat_k when
/// (v, u) = (e^k, e^{k+1}).
EstimateReport alpha_hat_uv(const Dataset& data, scalar_t u, scalar_t v);

/// Order-statistics dual: fixes tail probabilities (q_u, q_v) and reads the
/// realized quantiles X_(n - floor(q n)). Throws DegenerateSpacingError on
/// tied order statistics.
EstimateReport alpha_tilde_quantile(const Dataset& data, scalar_t q_u, scalar_t q_v);

/// Ratio-of-logs Hill-type estimator over the top floor(r n) order
/// statistics. Note: this divides logs of order statistics; it is not the
/// classical log-spacings Hill estimator and does not share its consistency
/// properties. Throws InvalidBaseError when the reference order statistic
/// is <= 1.
EstimateReport hill(const Dataset& data, scalar_t r);

/// Oracle threshold floor(log(n)/(alpha(2 beta + 1)) + 1).
int oracle_k(scalar_t alpha, scalar_t beta, count_t n);

struct RoughPluginResult {
  scalar_t alpha_rough = 0.0;
  int k_rough = 0;  // round((log log n)^2)
  int k1 = 0;       // floor(log(n)/(alpha_rough (2 beta + 1)) + 1)
};

/// Two-stage threshold choice: a rough estimate at k = round((log log n)^2)
/// plugged into the oracle formula. Requires n >= 16; propagates
/// EmptyTailError from the rough stage.
RoughPluginResult rough_then_plugin_k(const Dataset& data, scalar_t beta);

/// Large-deviation bound on |alpha_hat(k) - alpha| for a second-order Pareto
/// class, split into its stochastic and bias terms, with flags for the
/// conditions under which the bound is guaranteed.
struct DeviationBound {
  scalar_t value = 0.0;
  scalar_t stochastic = 0.0;           // 6 sqrt(log(2/delta) / (n p_{k+1}))-type term
  scalar_t bias = 0.0;                 // (3 C'/C) e^{-k alpha beta}
  bool count_condition_ok = false;     // p_{k+1} >= 16 log(2/delta) / n
  bool bias_condition_ok = false;      // e^{-k alpha beta} <= C / (2 C')
};

/// Empirical-probability form: stochastic term uses a supplied p_{k+1}.
DeviationBound deviation_bound_empirical(int k, count_t n, scalar_t delta,
                                         const SecondOrderParams& params, scalar_t p_k1);

/// Analytic form: stochastic term 6 sqrt(e^{(k+1)alpha + 1} log(2/delta) / (C n)).
/// The count flag uses the conservative class lower bound (C/2) e^{-(k+1)alpha}
/// for p_{k+1}.
DeviationBound deviation_bound_analytic(int k, count_t n, scalar_t delta,
                                        const SecondOrderParams& params);

}  // namespace tailest
