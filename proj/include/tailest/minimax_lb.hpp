#pragma once

#include "tailest/dist_models.hpp"
#include "tailest/types.hpp"

#include <vector>

namespace tailest {

/// One member of the perturbed-family construction.
struct FamilyMember {
  int i = 0;
  scalar_t beta_i = 0.0;
  scalar_t gamma_i = 0.0;
  scalar_t K_i = 0.0;
  scalar_t t_i = 0.0;     // K_i^{-alpha beta_i}
  scalar_t alpha_i = 0.0; // alpha - t_i
};

/// Sufficient sample-size conditions, evaluated and reported but not fatal:
/// the constructor enforces the operative invariants directly.
struct SufficientConditions {
  bool nassumption = false;
  bool first_n = false;
  bool second_n = false;
};

/// The finite family {F_0, F_1, ..., F_M} driving the identification lower
/// bound: F_0 exact Pareto with unit scale, F_i a tilted piecewise version
/// with change point K_i and tilt t_i.
struct LowerBoundFamily {
  scalar_t alpha = 0.0;
  scalar_t beta = 0.0;
  count_t n = 0;
  int M = 0;
  scalar_t upsilon = 0.0;
  std::vector<FamilyMember> members;  // indices 1..M at positions 0..M-1
  DistributionModel F0 = DistributionModel::exact_pareto(1.0, 1.0);
  SufficientConditions conditions;

  const FamilyMember& member(int i) const { return members.at(static_cast<size_t>(i - 1)); }

  /// F_i realized as PiecewiseLB(alpha, t_i, K_i).
  DistributionModel member_model(int i) const;

  /// The second-order class F_i belongs to:
  /// (alpha - t_i, beta_i, K_i^{-t_i}, 1/(alpha (beta - 1))).
  SecondOrderParams member_class(int i) const;
};

/// Smallest integer M >= 2 with floor(log(n / log M)) + 1 == M. Throws
/// TooSmallNError("family_size_fixed_point") when no integer in
/// [2, ceil(4 log n)] satisfies it.
int find_family_size(count_t n);

/// Builds the family at (alpha, beta, n), beta > 1. All structural
/// invariants (K_i > 1, 0 < t_i < alpha, alpha_i >= alpha/2, gamma_i > 0,
/// t_i log K_i <= 1, pairwise separation) are verified at construction;
/// violations throw TooSmallNError naming the failed condition. The
/// sufficient largeness conditions are evaluated into `conditions`.
LowerBoundFamily build_family(scalar_t alpha, scalar_t beta, count_t n);

/// KL(F_0, F_i) in closed form: K^{-alpha} (log(alpha/(alpha - t)) - t/alpha).
scalar_t kl_f0_fi(scalar_t alpha, scalar_t t, scalar_t K);

/// KL(F_i, F_0) in closed form: K^{-alpha} (log((alpha - t)/alpha) + t/(alpha - t)).
scalar_t kl_fi_f0(scalar_t alpha, scalar_t t, scalar_t K);

/// Closed-form upper bound on KL(F_i, F_j), i != j:
/// (2 exp(1/(alpha (2 beta - 1))) / alpha^2) (t_i^2 K_i^{-alpha} + t_j^2 K_j^{-alpha}).
scalar_t kl_fi_fj_bound(const LowerBoundFamily& family, int i, int j);

/// Numeric KL divergence between two models by adaptive quadrature in
/// log space, with an analytic remainder beyond the point where both
/// densities are power laws. Requires support(p) within support(q); throws
/// SupportMismatchError otherwise.
scalar_t kl_numeric(const DistributionModel& p, const DistributionModel& q,
                    scalar_t abs_tol = 1e-10);

/// Identification error lower bound via the information inequality.
struct FanoReport {
  scalar_t prob_lower = 0.0;   // clipped to [0, 1]
  scalar_t avg_kl_term = 0.0;  // (1/M^2) sum_{j != j'} n KL(F_j, F_j')
  int M = 0;
  scalar_t upsilon = 0.0;
  bool budget_ok = false;      // avg_kl_term <= (1/2) log M
};

/// Computes 1 - (avg_kl_term + log 2)/log M, clipped to [0, 1]. By default
/// the pairwise terms use the closed-form upper bounds, which makes the
/// returned probability a conservative lower bound; audit mode swaps in
/// quadrature values.
FanoReport fano_bound(const LowerBoundFamily& family, bool audit_quadrature = false);

/// c(beta) = 1 - exp(-1/(2 (2 beta + 1)^2)), the pairwise separation factor.
scalar_t separation_constant(scalar_t beta);

/// B(alpha, beta, beta_j) =
/// (1/(4 (2 beta + 1)^2)) min(1, (alpha^2/(8 exp(1/(alpha (2 beta - 1)))))^(beta_j/(2 beta_j + 1))).
/// beta_j may be +infinity (exponent 1/2).
scalar_t rate_constant_B(scalar_t alpha, scalar_t beta, scalar_t beta_j);

/// The printed lower-bound constants evaluated at (alpha1, beta1, betaj):
/// c_beta = separation_constant(beta1), B = rate_constant_B(alpha1, beta1, betaj),
/// and via the reparametrization C1 = exp(-1/(2 alpha1 (2 beta1 + 1))),
/// B4 = rate_constant_B(2 alpha1, beta1 + 1, infinity).
struct LbConstants {
  scalar_t c_beta = 0.0;
  scalar_t B = 0.0;
  scalar_t C1 = 0.0;
  scalar_t B4 = 0.0;
};

LbConstants lb_constants(scalar_t alpha1, scalar_t beta1, scalar_t betaj);

}  // namespace tailest
