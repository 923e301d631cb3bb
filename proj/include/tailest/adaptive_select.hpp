#pragma once

#include "tailest/dist_models.hpp"
#include "tailest/tail_estimators.hpp"
#include "tailest/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tailest {

/// Tuning of the data-driven threshold selection.
struct AdaptiveConfig {
  scalar_t delta = 0.05;                    // must lie in (0, 1/4)
  scalar_t A = 1.0;                         // comparison constant, > 0
  scalar_t count_floor_multiplier = 24.0;   // floor is mult * log(2/delta) / n

  void validate() const;
};

/// Parameter ranges for tuning A without knowledge of the true constants.
struct RangeBounds {
  scalar_t alpha1 = 0.5;
  scalar_t alpha2 = 2.0;
  scalar_t beta1 = 1.0;
  scalar_t C1 = 0.5;
  scalar_t C2 = 2.0;
  scalar_t Cprime = 1.0;

  void validate() const;
};

/// Comparison constant meeting the known-constants admissibility condition
/// with equality: 6 sqrt(2 (C + C') log(2/delta)) (2 sqrt(e^{2 alpha + 1}/C) + C'/C).
scalar_t threshold_A(scalar_t delta, const SecondOrderParams& params);

/// Range-based comparison constant:
/// 6 sqrt(2 (C2 + C')) sqrt(log((2/eps)(1 + log((C2 + C') n)/alpha1)))
///   (2 sqrt(e^{2 alpha2 + 1}/C1) + C'/C1).
scalar_t threshold_A_eps(scalar_t eps, count_t n, const RangeBounds& bounds);

/// Outcome of the threshold scan: the selected k, the count floor, the last
/// admissible index, and every comparison that was evaluated.
struct SelectionResult {
  int k_hat = 0;
  scalar_t floor = 0.0;
  int k_admissible_max = 0;
  std::vector<ComparisonRecord> trace;
};

/// Picks the smallest k whose estimate is statistically indistinguishable
/// from every higher admissible estimate: the smallest k with
/// p_{k+1} > mult * log(2/delta)/n such that for all admissible k' > k,
/// |alpha_hat(k') - alpha_hat(k)| <= A sqrt(1/(n p_{k'+1})). Throws
/// NoAdmissibleKError when no index clears the floor.
SelectionResult select_k(const TailProbTable& table, const AdaptiveConfig& config);
SelectionResult select_k(const Dataset& data, const AdaptiveConfig& config);

/// Tail-index estimate at the adaptively selected threshold. Diagnostics
/// carry k_hat and the floor; the full comparison trace is attached.
EstimateReport adaptive_estimate(const Dataset& data, const AdaptiveConfig& config);

enum class SampleSizeMode { Oracle, Adaptive, RangeBased };

/// Evaluation of a printed max-of-terms sample-size condition.
struct SampleSizeReport {
  bool ok = false;
  scalar_t n = 0.0;
  scalar_t threshold = 0.0;  // n must exceed this
  std::vector<std::pair<std::string, scalar_t>> terms;
  std::string binding;       // name of the term realizing the max
};

/// Known-constants conditions (Oracle / Adaptive modes).
SampleSizeReport sample_size_ok(count_t n, const SecondOrderParams& params, scalar_t delta,
                                SampleSizeMode mode);

/// Range-based condition over (alpha, C) intervals and a beta floor.
SampleSizeReport sample_size_ok(count_t n, const RangeBounds& bounds, scalar_t eps);

/// B1 = 6 sqrt(e^{2 alpha + 1} log(2/delta) / C).
scalar_t constant_B1(const SecondOrderParams& params, scalar_t delta);

/// B2 = (B1 + 2 A sqrt(e^{2 alpha}/C)) / sqrt(log(2/delta)).
scalar_t constant_B2(const SecondOrderParams& params, scalar_t delta, scalar_t A);

/// Uniform range constant:
/// B3 = 6 sqrt(e^{2 alpha2 + 1}/C1) + 3 C'/C1
///      + 24 (e^{2 alpha2}/C1) sqrt(2 e (C2 + C'))
///      + 12 e^{alpha2} (C'/C1) sqrt(2 (C2 + C')/C1).
scalar_t constant_B3(const RangeBounds& bounds);

}  // namespace tailest
