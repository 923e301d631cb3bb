#pragma once

#include "tailest/types.hpp"

#include <string>
#include <vector>

namespace tailest {

/// Parameters (alpha, beta, C, C') of a second-order Pareto class: the class
/// of distributions with |1 - F(x) - C x^-alpha| <= C' x^(-alpha(1+beta)) on
/// their support.
struct SecondOrderParams {
  scalar_t alpha = 1.0;
  scalar_t beta = 1.0;
  scalar_t C = 1.0;
  scalar_t Cprime = 1.0;

  /// Throws std::invalid_argument unless all four fields are positive.
  void validate() const;
};

/// A concrete sampleable heavy-tailed law. Three variants:
///  - ExactPareto(alpha, C):      1 - F(x) = C x^-alpha on [C^(1/alpha), inf)
///  - PerturbedPareto(a,b,C,c):   1 - F(x) = C x^-a (1 + c x^(-a b)) on
///                                [support_left, inf) with support_left the
///                                solution of 1 - F(x) = 1
///  - PiecewiseLB(alpha, t, K):   1 - F(x) = x^-alpha on [1, K],
///                                K^-t x^-(alpha-t) beyond K
/// Models are immutable after construction and safe to share across threads.
class DistributionModel {
 public:
  enum class Kind { ExactPareto, PerturbedPareto, PiecewiseLB };

  static DistributionModel exact_pareto(scalar_t alpha, scalar_t C);
  static DistributionModel perturbed_pareto(scalar_t alpha, scalar_t beta, scalar_t C,
                                            scalar_t c);
  static DistributionModel piecewise_lb(scalar_t alpha, scalar_t t, scalar_t K);

  Kind kind() const noexcept { return kind_; }
  scalar_t alpha() const noexcept { return alpha_; }
  scalar_t beta() const noexcept { return beta_; }
  scalar_t C() const noexcept { return C_; }
  scalar_t c() const noexcept { return c_; }
  scalar_t t() const noexcept { return t_; }
  scalar_t K() const noexcept { return K_; }

  /// Smallest x with survival(x) = 1.
  scalar_t support_left() const noexcept { return support_left_; }

  /// Round-trippable textual form, e.g. "pareto(alpha=1,C=1)".
  std::string canonical() const;
  static DistributionModel parse(const std::string& text);

 private:
  DistributionModel() = default;

  Kind kind_ = Kind::ExactPareto;
  scalar_t alpha_ = 1.0;
  scalar_t beta_ = 0.0;  // PerturbedPareto only
  scalar_t C_ = 1.0;     // ExactPareto / PerturbedPareto scale
  scalar_t c_ = 0.0;     // PerturbedPareto perturbation coefficient
  scalar_t t_ = 0.0;     // PiecewiseLB tail tilt
  scalar_t K_ = 0.0;     // PiecewiseLB change point
  scalar_t support_left_ = 1.0;
};

/// Survival function 1 - F(x). Total on x > 0: returns 1 at or below the
/// support start and decreases monotonically to 0.
scalar_t survival(const DistributionModel& model, scalar_t x);

/// Density f(x); at the PiecewiseLB change point the right-limit value is
/// used.
scalar_t density(const DistributionModel& model, scalar_t x);

/// Inverse of the survival function on p in (0, 1]. Closed form for
/// ExactPareto and PiecewiseLB; bisection at relative tolerance 1e-12 for
/// PerturbedPareto (throws std::runtime_error if the iteration cap is hit,
/// which signals a malformed model).
scalar_t quantile(const DistributionModel& model, scalar_t p);

/// An i.i.d. sample together with its seed provenance.
struct Dataset {
  array_t values;
  seed_t seed = 0;
  bool external = false;     // true when the data did not come from sample()
  std::string model;         // canonical model string; empty when external

  index_t n() const noexcept { return values.size(); }
};

/// Draws n values by inverse-transform sampling with a xoshiro256++ stream
/// seeded from `seed`. Identical arguments reproduce bit-identical datasets.
Dataset sample(const DistributionModel& model, index_t n, seed_t seed);

/// Result of checking the second-order Pareto deviation bound on a grid.
struct MembershipReport {
  scalar_t max_violation = 0.0;  // max over grid of |surv - C x^-a| - C' x^(-a(1+b))
  scalar_t worst_x = 0.0;
  bool ok() const noexcept { return max_violation <= 0.0; }
};

/// Evaluates max over the grid of |survival(x) - C x^-alpha| - C' x^(-alpha(1+beta)).
/// The model belongs to the class on the grid iff the maximum is <= 0.
/// Grid points must be >= support_left(model).
MembershipReport verify_membership(const DistributionModel& model,
                                   const SecondOrderParams& params,
                                   const std::vector<scalar_t>& grid);

/// Log-spaced grid of `points` values on [lo, hi], endpoints included.
std::vector<scalar_t> log_grid(scalar_t lo, scalar_t hi, int points);

/// Default membership grid: 200 log-spaced points on
/// [support_left, 1e6 * support_left].
std::vector<scalar_t> default_membership_grid(const DistributionModel& model);

}  // namespace tailest
