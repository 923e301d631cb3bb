#include "tailest/minimax_lb.hpp"

#include "tailest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tailest {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Parameters of the pure power-law regime f(x) = scale * x^(-index - 1) that
// every model variant settles into for large x, plus the x beyond which the
// regime holds (exactly for ExactPareto/PiecewiseLB; within relative 1e-14
// for PerturbedPareto).
struct PowerTail {
  scalar_t index = 0.0;
  scalar_t scale = 0.0;
  scalar_t from = 0.0;
};

PowerTail power_tail(const DistributionModel& m) {
  switch (m.kind()) {
    case DistributionModel::Kind::ExactPareto:
      return {m.alpha(), m.alpha() * m.C(), m.support_left()};
    case DistributionModel::Kind::PiecewiseLB:
      return {m.alpha() - m.t(), (m.alpha() - m.t()) * std::pow(m.K(), -m.t()), m.K()};
    case DistributionModel::Kind::PerturbedPareto: {
      scalar_t from = m.support_left();
      if (m.c() != 0.0) {
        from = std::max(from, std::pow(1e14 * std::fabs(m.c()), 1.0 / (m.alpha() * m.beta())));
      }
      return {m.alpha(), m.alpha() * m.C(), from};
    }
  }
  return {};
}

// Adaptive Simpson in u = log x of f_p(e^u) e^u log(f_p(e^u)/f_q(e^u)).
class KlIntegrand {
 public:
  KlIntegrand(const DistributionModel& p, const DistributionModel& q) : p_(p), q_(q) {}

  scalar_t operator()(scalar_t u) const {
    const scalar_t x = std::exp(u);
    const scalar_t fp = density(p_, x);
    if (fp <= 0.0) return 0.0;
    const scalar_t fq = density(q_, x);
    if (fq <= 0.0) return std::numeric_limits<scalar_t>::infinity();
    return fp * x * std::log(fp / fq);
  }

 private:
  const DistributionModel& p_;
  const DistributionModel& q_;
};

scalar_t simpson_step(scalar_t a, scalar_t b, scalar_t fa, scalar_t fm, scalar_t fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

scalar_t adaptive_simpson(const KlIntegrand& f, scalar_t a, scalar_t b, scalar_t fa, scalar_t fm,
                          scalar_t fb, scalar_t whole, scalar_t tol, int depth) {
  const scalar_t m = 0.5 * (a + b);
  const scalar_t lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const scalar_t flm = f(lm), frm = f(rm);
  const scalar_t left = simpson_step(a, m, fa, flm, fm);
  const scalar_t right = simpson_step(m, b, fm, frm, fb);
  const scalar_t delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

scalar_t integrate_segment(const KlIntegrand& f, scalar_t a, scalar_t b, scalar_t tol) {
  if (!(b > a)) return 0.0;
  const scalar_t m = 0.5 * (a + b);
  const scalar_t fa = f(a), fm = f(m), fb = f(b);
  const scalar_t whole = simpson_step(a, b, fa, fm, fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

int find_family_size(count_t n) {
  if (n < 2) throw TooSmallNError("family_size_fixed_point", "n must be >= 2");
  const scalar_t nn = static_cast<scalar_t>(n);
  const int cap = static_cast<int>(std::ceil(4.0 * std::log(nn))) + 1;
  for (int M = 2; M <= cap; ++M) {
    const scalar_t inner = nn / std::log(static_cast<scalar_t>(M));
    if (static_cast<int>(std::floor(std::log(inner))) + 1 == M) return M;
  }
  throw TooSmallNError("family_size_fixed_point",
                       "no integer M in [2, ceil(4 log n)] satisfies floor(log(n/log M)) + 1 == M");
}

LowerBoundFamily build_family(scalar_t alpha, scalar_t beta, count_t n) {
  require(alpha > 0.0 && std::isfinite(alpha), "build_family: alpha must be > 0");
  require(beta > 1.0 && std::isfinite(beta), "build_family: beta must be > 1");
  if (n < 2) throw TooSmallNError("family_size_fixed_point", "n must be >= 2");

  LowerBoundFamily fam;
  fam.alpha = alpha;
  fam.beta = beta;
  fam.n = n;
  fam.M = find_family_size(n);
  const scalar_t nn = static_cast<scalar_t>(n);
  const scalar_t logn = std::log(nn);

  if (!(logn / 2.0 < fam.M && fam.M < 2.0 * logn)) {
    throw TooSmallNError("family_size_range",
                         "M = " + std::to_string(fam.M) + " outside (log n / 2, 2 log n)");
  }
  if (fam.M < 3) {
    throw TooSmallNError("family_size_min", "M = " + std::to_string(fam.M) +
                                                " gives log log M <= 0");
  }

  fam.upsilon = std::min(1.0, alpha * alpha / (8.0 * std::exp(1.0 / (alpha * (2.0 * beta - 1.0)))));
  const scalar_t logM = std::log(static_cast<scalar_t>(fam.M));
  const scalar_t loglogM = std::log(logM);
  if (!(fam.upsilon * logM > 1.0)) {
    throw TooSmallNError("gamma_positive",
                         "upsilon * log M = " + std::to_string(fam.upsilon * logM) +
                             " <= 1, so the gamma_i exponents are not positive");
  }

  const scalar_t base = nn / (fam.upsilon * logM);
  fam.members.reserve(static_cast<size_t>(fam.M));
  for (int i = 1; i <= fam.M; ++i) {
    FamilyMember mem;
    mem.i = i;
    mem.beta_i = beta - static_cast<scalar_t>(i) / fam.M;
    const scalar_t s_i = mem.beta_i / (2.0 * mem.beta_i + 1.0);
    mem.gamma_i = s_i * (1.0 + std::log(fam.upsilon) / loglogM);
    mem.K_i = std::pow(base, 1.0 / (alpha * (2.0 * mem.beta_i + 1.0)));
    mem.t_i = std::pow(mem.K_i, -alpha * mem.beta_i);
    mem.alpha_i = alpha - mem.t_i;

    if (!(mem.K_i > 1.0)) {
      throw TooSmallNError("K_above_one", "K_" + std::to_string(i) + " <= 1");
    }
    if (!(mem.t_i > 0.0 && mem.t_i < alpha)) {
      throw TooSmallNError("t_in_range", "t_" + std::to_string(i) + " outside (0, alpha)");
    }
    if (!(mem.alpha_i >= alpha / 2.0)) {
      throw TooSmallNError("alpha_i_above_half",
                           "alpha_" + std::to_string(i) + " < alpha / 2");
    }
    if (!(mem.t_i * std::log(mem.K_i) <= 1.0)) {
      throw TooSmallNError("t_logK_small", "t_" + std::to_string(i) + " log K_" +
                                               std::to_string(i) + " > 1");
    }
    fam.members.push_back(mem);
  }

  const scalar_t c_beta = separation_constant(beta);
  for (int i = 0; i < fam.M; ++i) {
    for (int j = i + 1; j < fam.M; ++j) {
      const auto& a = fam.members[static_cast<size_t>(i)];
      const auto& b = fam.members[static_cast<size_t>(j)];
      const scalar_t gap = std::fabs(a.alpha_i - b.alpha_i);
      if (!(gap >= c_beta * std::max(a.t_i, b.t_i))) {
        throw TooSmallNError("separation", "indices " + std::to_string(a.i) + "," +
                                               std::to_string(b.i) +
                                               " violate the pairwise separation");
      }
    }
  }

  fam.F0 = DistributionModel::exact_pareto(alpha, 1.0);

  // Sufficient largeness conditions, evaluated for the record; the operative
  // invariants above are what construction enforces.
  fam.conditions.first_n =
      8.0 * std::exp(2.0 / (alpha * (2.0 * beta - 1.0) * (2.0 * beta - 1.0))) / (alpha * alpha) <=
      std::log(logn / 2.0);
  fam.conditions.second_n = true;
  for (const auto& mem : fam.members) {
    const scalar_t s_i = mem.beta_i / (2.0 * mem.beta_i + 1.0);
    if (!(std::min(alpha, 1.0 / alpha) / 2.0 * std::pow(nn, s_i) >
          std::pow(std::log(nn / fam.upsilon), s_i + 1.0))) {
      fam.conditions.second_n = false;
      break;
    }
  }
  {
    const scalar_t a1 = alpha / 2.0, b1 = beta - 1.0;
    const scalar_t lhs = std::pow(std::min(a1, 1.0 / a1) / 2.0, (2.0 * b1 + 1.0) / b1) * nn;
    const scalar_t inner =
        std::min(1.0, (a1 * a1 / 8.0) * std::exp(-2.0 / (a1 * (2.0 * b1 + 1.0) * (2.0 * b1 + 1.0))));
    fam.conditions.nassumption = lhs > std::log(nn / inner);
  }
  return fam;
}

DistributionModel LowerBoundFamily::member_model(int i) const {
  const auto& mem = member(i);
  return DistributionModel::piecewise_lb(alpha, mem.t_i, mem.K_i);
}

SecondOrderParams LowerBoundFamily::member_class(int i) const {
  const auto& mem = member(i);
  SecondOrderParams params;
  params.alpha = alpha - mem.t_i;
  params.beta = mem.beta_i;
  params.C = std::pow(mem.K_i, -mem.t_i);
  params.Cprime = 1.0 / (alpha * (beta - 1.0));
  return params;
}

scalar_t kl_f0_fi(scalar_t alpha, scalar_t t, scalar_t K) {
  require(t > 0.0 && t < alpha, "kl_f0_fi: need 0 < t < alpha");
  require(K > 1.0, "kl_f0_fi: need K > 1");
  return std::pow(K, -alpha) * (std::log(alpha / (alpha - t)) - t / alpha);
}

scalar_t kl_fi_f0(scalar_t alpha, scalar_t t, scalar_t K) {
  require(t > 0.0 && t < alpha, "kl_fi_f0: need 0 < t < alpha");
  require(K > 1.0, "kl_fi_f0: need K > 1");
  return std::pow(K, -alpha) * (std::log((alpha - t) / alpha) + t / (alpha - t));
}

scalar_t kl_fi_fj_bound(const LowerBoundFamily& family, int i, int j) {
  require(i != j, "kl_fi_fj_bound: indices must differ");
  const auto& mi = family.member(i);
  const auto& mj = family.member(j);
  const scalar_t factor =
      2.0 * std::exp(1.0 / (family.alpha * (2.0 * family.beta - 1.0))) /
      (family.alpha * family.alpha);
  return factor * (mi.t_i * mi.t_i * std::pow(mi.K_i, -family.alpha) +
                   mj.t_i * mj.t_i * std::pow(mj.K_i, -family.alpha));
}

scalar_t kl_numeric(const DistributionModel& p, const DistributionModel& q, scalar_t abs_tol) {
  require(abs_tol > 0.0, "kl_numeric: abs_tol must be > 0");
  if (p.support_left() < q.support_left() * (1.0 - 1e-12)) {
    throw SupportMismatchError("left model has mass below the right model's support start");
  }

  const PowerTail tail_p = power_tail(p);
  const PowerTail tail_q = power_tail(q);
  const scalar_t cutoff = 1e3 * std::max(tail_p.from, tail_q.from);

  // Segment boundaries in log space: support start, any density kinks, the
  // power-law cutoff.
  std::vector<scalar_t> knots{p.support_left(), q.support_left(), tail_p.from, tail_q.from,
                              cutoff};
  if (p.kind() == DistributionModel::Kind::PiecewiseLB) knots.push_back(p.K());
  if (q.kind() == DistributionModel::Kind::PiecewiseLB) knots.push_back(q.K());
  std::vector<scalar_t> us;
  for (const scalar_t x : knots) {
    if (x >= p.support_left() && x <= cutoff) us.push_back(std::log(x));
  }
  us.push_back(std::log(p.support_left()));
  us.push_back(std::log(cutoff));
  std::sort(us.begin(), us.end());
  us.erase(std::unique(us.begin(), us.end(),
                       [](scalar_t a, scalar_t b) { return std::fabs(a - b) < 1e-14; }),
           us.end());

  const KlIntegrand f(p, q);
  scalar_t total = 0.0;
  const scalar_t seg_tol = abs_tol / (2.0 * static_cast<scalar_t>(us.size()));
  for (size_t s = 0; s + 1 < us.size(); ++s) {
    // Nudge off exact kinks so each segment sees one smooth branch.
    const scalar_t a = us[s] + 1e-13;
    const scalar_t b = us[s + 1] - 1e-13;
    total += integrate_segment(f, a, b, seg_tol);
  }

  // Analytic remainder: beyond the cutoff both densities are power laws, so
  // f_p log(f_p/f_q) = scale_p x^(-i_p - 1) (L0 + L1 log x) with closed-form
  // integral.
  const scalar_t L0 = std::log(tail_p.scale / tail_q.scale);
  const scalar_t L1 = tail_q.index - tail_p.index;
  const scalar_t c = cutoff;
  total += tail_p.scale * std::pow(c, -tail_p.index) / tail_p.index *
           (L0 + L1 * std::log(c) + L1 / tail_p.index);
  return total;
}

FanoReport fano_bound(const LowerBoundFamily& family, bool audit_quadrature) {
  FanoReport report;
  report.M = family.M;
  report.upsilon = family.upsilon;
  const scalar_t nn = static_cast<scalar_t>(family.n);
  scalar_t sum = 0.0;
  for (int i = 1; i <= family.M; ++i) {
    for (int j = 1; j <= family.M; ++j) {
      if (i == j) continue;  // KL(F, F) = 0
      const scalar_t kl = audit_quadrature
                              ? kl_numeric(family.member_model(i), family.member_model(j))
                              : kl_fi_fj_bound(family, i, j);
      sum += nn * kl;
    }
  }
  const scalar_t logM = std::log(static_cast<scalar_t>(family.M));
  report.avg_kl_term = sum / (static_cast<scalar_t>(family.M) * family.M);
  report.budget_ok = report.avg_kl_term <= 0.5 * logM;
  report.prob_lower = std::clamp(1.0 - (report.avg_kl_term + std::log(2.0)) / logM, 0.0, 1.0);
  return report;
}

scalar_t separation_constant(scalar_t beta) {
  require(beta > 0.0, "separation_constant: beta must be > 0");
  const scalar_t d = 2.0 * beta + 1.0;
  return 1.0 - std::exp(-1.0 / (2.0 * d * d));
}

scalar_t rate_constant_B(scalar_t alpha, scalar_t beta, scalar_t beta_j) {
  require(alpha > 0.0, "rate_constant_B: alpha must be > 0");
  require(beta > 0.5, "rate_constant_B: beta must be > 1/2");
  require(beta_j > 0.0, "rate_constant_B: beta_j must be > 0");
  const scalar_t exponent =
      std::isinf(beta_j) ? 0.5 : beta_j / (2.0 * beta_j + 1.0);
  const scalar_t inner = alpha * alpha / (8.0 * std::exp(1.0 / (alpha * (2.0 * beta - 1.0))));
  const scalar_t d = 2.0 * beta + 1.0;
  return std::min(1.0, std::pow(inner, exponent)) / (4.0 * d * d);
}

LbConstants lb_constants(scalar_t alpha1, scalar_t beta1, scalar_t betaj) {
  LbConstants out;
  out.c_beta = separation_constant(beta1);
  out.B = rate_constant_B(alpha1, beta1, betaj);
  out.C1 = std::exp(-1.0 / (2.0 * alpha1 * (2.0 * beta1 + 1.0)));
  out.B4 = rate_constant_B(2.0 * alpha1, beta1 + 1.0,
                           std::numeric_limits<scalar_t>::infinity());
  return out;
}

}  // namespace tailest
