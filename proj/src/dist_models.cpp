#include "tailest/dist_models.hpp"

#include "tailest/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tailest {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Fast x^e with special cases for the exponents the samplers hit hardest.
scalar_t pow_fast(scalar_t x, scalar_t e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  if (e == 0.5) return std::sqrt(x);
  if (e == -1.0) return 1.0 / x;
  if (e == -0.5) return 1.0 / std::sqrt(x);
  return std::pow(x, e);
}

// Unclamped survival formula of a perturbed Pareto: C x^-a (1 + c x^(-a b)).
scalar_t perturbed_formula(scalar_t alpha, scalar_t beta, scalar_t C, scalar_t c, scalar_t x) {
  const scalar_t xa = std::pow(x, -alpha);
  return C * xa * (1.0 + c * std::pow(x, -alpha * beta));
}

}  // namespace

void SecondOrderParams::validate() const {
  require(alpha > 0.0, "SecondOrderParams: alpha must be > 0");
  require(beta > 0.0, "SecondOrderParams: beta must be > 0");
  require(C > 0.0, "SecondOrderParams: C must be > 0");
  require(Cprime > 0.0, "SecondOrderParams: Cprime must be > 0");
}

DistributionModel DistributionModel::exact_pareto(scalar_t alpha, scalar_t C) {
  require(alpha > 0.0 && std::isfinite(alpha), "exact_pareto: alpha must be > 0");
  require(C > 0.0 && std::isfinite(C), "exact_pareto: C must be > 0");
  DistributionModel m;
  m.kind_ = Kind::ExactPareto;
  m.alpha_ = alpha;
  m.C_ = C;
  m.support_left_ = std::pow(C, 1.0 / alpha);
  return m;
}

DistributionModel DistributionModel::perturbed_pareto(scalar_t alpha, scalar_t beta, scalar_t C,
                                                      scalar_t c) {
  require(alpha > 0.0 && std::isfinite(alpha), "perturbed_pareto: alpha must be > 0");
  require(beta > 0.0 && std::isfinite(beta), "perturbed_pareto: beta must be > 0");
  require(C > 0.0 && std::isfinite(C), "perturbed_pareto: C must be > 0");
  require(std::isfinite(c), "perturbed_pareto: c must be finite");

  DistributionModel m;
  m.kind_ = Kind::PerturbedPareto;
  m.alpha_ = alpha;
  m.beta_ = beta;
  m.C_ = C;
  m.c_ = c;

  // Locate the support start: the solution of the survival formula = 1 on
  // the branch where the formula is decreasing.
  scalar_t lo;
  if (c >= 0.0) {
    // Formula is strictly decreasing on (0, inf) and exceeds 1 at C^(1/a).
    lo = std::pow(C, 1.0 / alpha);
    if (perturbed_formula(alpha, beta, C, c, lo) < 1.0) lo *= 0.5;
  } else {
    // The formula peaks at x_m = ((1+b)|c|)^(1/(a b)); it must reach 1 there
    // and the support starts on the decreasing branch beyond the peak.
    const scalar_t x_m = std::pow((1.0 + beta) * std::fabs(c), 1.0 / (alpha * beta));
    if (perturbed_formula(alpha, beta, C, c, x_m) < 1.0) {
      throw std::invalid_argument(
          "perturbed_pareto: survival never reaches 1; no valid support start");
    }
    lo = x_m;
  }
  scalar_t hi = std::max(lo * 2.0, std::pow(2.0 * C, 1.0 / alpha));
  int guard = 0;
  while (perturbed_formula(alpha, beta, C, c, hi) > 1.0) {
    hi *= 2.0;
    if (++guard > 1100) throw std::invalid_argument("perturbed_pareto: support search diverged");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const scalar_t mid = 0.5 * (lo + hi);
    if (perturbed_formula(alpha, beta, C, c, mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  m.support_left_ = 0.5 * (lo + hi);

  if (c < 0.0) {
    const scalar_t sl_pert = std::fabs(c) * std::pow(m.support_left_, -alpha * beta);
    require(sl_pert < 1.0, "perturbed_pareto: survival not positive on the support");
    // Nonincreasing iff 1 + (1+b) c x^(-a b) >= 0 at the support start.
    const scalar_t slope_factor =
        1.0 + (1.0 + beta) * c * std::pow(m.support_left_, -alpha * beta);
    require(slope_factor >= -1e-12,
            "perturbed_pareto: survival not monotone nonincreasing on the support");
  }
  return m;
}

DistributionModel DistributionModel::piecewise_lb(scalar_t alpha, scalar_t t, scalar_t K) {
  require(alpha > 0.0 && std::isfinite(alpha), "piecewise_lb: alpha must be > 0");
  require(t > 0.0 && t < alpha, "piecewise_lb: t must lie in (0, alpha)");
  require(K > 1.0 && std::isfinite(K), "piecewise_lb: K must be > 1");
  DistributionModel m;
  m.kind_ = Kind::PiecewiseLB;
  m.alpha_ = alpha;
  m.t_ = t;
  m.K_ = K;
  m.support_left_ = 1.0;
  return m;
}

scalar_t survival(const DistributionModel& m, scalar_t x) {
  if (!(x > 0.0)) throw std::invalid_argument("survival: x must be > 0");
  if (x <= m.support_left()) return 1.0;
  switch (m.kind()) {
    case DistributionModel::Kind::ExactPareto:
      return m.C() * std::pow(x, -m.alpha());
    case DistributionModel::Kind::PerturbedPareto:
      return std::min(1.0, perturbed_formula(m.alpha(), m.beta(), m.C(), m.c(), x));
    case DistributionModel::Kind::PiecewiseLB:
      if (x <= m.K()) return std::pow(x, -m.alpha());
      return std::pow(m.K(), -m.t()) * std::pow(x, -(m.alpha() - m.t()));
  }
  return 0.0;
}

scalar_t density(const DistributionModel& m, scalar_t x) {
  if (!(x > 0.0)) throw std::invalid_argument("density: x must be > 0");
  if (x < m.support_left()) return 0.0;
  switch (m.kind()) {
    case DistributionModel::Kind::ExactPareto:
      return m.alpha() * m.C() * std::pow(x, -m.alpha() - 1.0);
    case DistributionModel::Kind::PerturbedPareto: {
      const scalar_t a = m.alpha(), b = m.beta();
      return a * m.C() * std::pow(x, -a - 1.0) +
             a * (1.0 + b) * m.c() * m.C() * std::pow(x, -a * (1.0 + b) - 1.0);
    }
    case DistributionModel::Kind::PiecewiseLB:
      // Right limit at the change point.
      if (x < m.K()) return m.alpha() * std::pow(x, -m.alpha() - 1.0);
      return (m.alpha() - m.t()) * std::pow(m.K(), -m.t()) *
             std::pow(x, -(m.alpha() - m.t()) - 1.0);
  }
  return 0.0;
}

scalar_t quantile(const DistributionModel& m, scalar_t p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must lie in (0, 1]");
  if (p == 1.0) return m.support_left();
  switch (m.kind()) {
    case DistributionModel::Kind::ExactPareto:
      return pow_fast(m.C() / p, 1.0 / m.alpha());
    case DistributionModel::Kind::PiecewiseLB: {
      const scalar_t pK = std::pow(m.K(), -m.alpha());
      if (p >= pK) return pow_fast(p, -1.0 / m.alpha());
      return std::pow(std::pow(m.K(), -m.t()) / p, 1.0 / (m.alpha() - m.t()));
    }
    case DistributionModel::Kind::PerturbedPareto: {
      // Bisection on g(y) = C y (1 + c y^b) = p with y = x^-a; g is strictly
      // increasing on (0, y0] by the construction-time monotonicity check.
      const scalar_t a = m.alpha(), b = m.beta(), C = m.C(), c = m.c();
      const scalar_t y0 = std::pow(m.support_left(), -a);
      const auto g = [&](scalar_t y) { return C * y * (1.0 + c * pow_fast(y, b)); };
      const scalar_t edge = c * pow_fast(y0, b);
      scalar_t lo = p / (C * (1.0 + std::max(0.0, edge)));
      scalar_t hi = std::min(y0, p / (C * (1.0 + std::min(0.0, edge))));
      while (g(lo) > p) lo *= 0.5;
      while (g(hi) < p && hi < y0) hi = std::min(y0, hi * 1.5);
      int it = 0;
      while ((hi - lo) > 0.25e-12 * std::min(1.0, a) * hi) {
        if (++it > 200) {
          throw std::runtime_error("quantile: bisection failed to converge (malformed model?)");
        }
        const scalar_t mid = 0.5 * (lo + hi);
        if (g(mid) < p) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return pow_fast(0.5 * (lo + hi), -1.0 / a);
    }
  }
  return m.support_left();
}

Dataset sample(const DistributionModel& model, index_t n, seed_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Dataset out;
  out.values.resize(n);
  out.seed = seed;
  out.external = false;
  out.model = model.canonical();
  Xoshiro256pp rng(seed);
  for (index_t i = 0; i < n; ++i) {
    out.values[i] = quantile(model, rng.uniform01());
  }
  return out;
}

MembershipReport verify_membership(const DistributionModel& model,
                                   const SecondOrderParams& params,
                                   const std::vector<scalar_t>& grid) {
  params.validate();
  require(!grid.empty(), "verify_membership: grid must be nonempty");
  MembershipReport report;
  report.max_violation = -std::numeric_limits<scalar_t>::infinity();
  for (const scalar_t x : grid) {
    require(x >= model.support_left() * (1.0 - 1e-12),
            "verify_membership: grid point below the support start");
    const scalar_t deviation = std::fabs(survival(model, x) - params.C * std::pow(x, -params.alpha));
    const scalar_t allowance = params.Cprime * std::pow(x, -params.alpha * (1.0 + params.beta));
    const scalar_t violation = deviation - allowance;
    if (violation > report.max_violation) {
      report.max_violation = violation;
      report.worst_x = x;
    }
  }
  return report;
}

std::vector<scalar_t> log_grid(scalar_t lo, scalar_t hi, int points) {
  require(lo > 0.0 && hi > lo && points >= 2, "log_grid: need 0 < lo < hi and points >= 2");
  std::vector<scalar_t> grid(static_cast<size_t>(points));
  const scalar_t llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < points; ++i) {
    grid[static_cast<size_t>(i)] = std::exp(llo + (lhi - llo) * i / (points - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<scalar_t> default_membership_grid(const DistributionModel& model) {
  return log_grid(model.support_left(), 1e6 * model.support_left(), 200);
}

std::string DistributionModel::canonical() const {
  char buf[160];
  switch (kind_) {
    case Kind::ExactPareto:
      std::snprintf(buf, sizeof buf, "pareto(alpha=%.17g,C=%.17g)", alpha_, C_);
      break;
    case Kind::PerturbedPareto:
      std::snprintf(buf, sizeof buf, "perturbed(alpha=%.17g,beta=%.17g,C=%.17g,c=%.17g)", alpha_,
                    beta_, C_, c_);
      break;
    case Kind::PiecewiseLB:
      std::snprintf(buf, sizeof buf, "piecewise(alpha=%.17g,t=%.17g,K=%.17g)", alpha_, t_, K_);
      break;
  }
  return buf;
}

DistributionModel DistributionModel::parse(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  require(open != std::string::npos && close != std::string::npos && close > open,
          "model parse: expected kind(key=value,...) in '" + text + "'");
  const std::string kind = text.substr(0, open);
  std::vector<std::pair<std::string, scalar_t>> kv;
  std::stringstream body(text.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(body, item, ',')) {
    const auto eq = item.find('=');
    require(eq != std::string::npos, "model parse: expected key=value, got '" + item + "'");
    kv.emplace_back(item.substr(0, eq), std::stod(item.substr(eq + 1)));
  }
  const auto get = [&](const std::string& key) {
    for (const auto& [k, v] : kv) {
      if (k == key) return v;
    }
    throw std::invalid_argument("model parse: missing key '" + key + "' in '" + text + "'");
  };
  if (kind == "pareto") return exact_pareto(get("alpha"), get("C"));
  if (kind == "perturbed") return perturbed_pareto(get("alpha"), get("beta"), get("C"), get("c"));
  if (kind == "piecewise") return piecewise_lb(get("alpha"), get("t"), get("K"));
  throw std::invalid_argument("model parse: unknown kind '" + kind + "'");
}

}  // namespace tailest
