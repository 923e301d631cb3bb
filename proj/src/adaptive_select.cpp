#include "tailest/adaptive_select.hpp"

#include "tailest/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace tailest {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void AdaptiveConfig::validate() const {
  require(delta > 0.0 && delta < 0.25, "AdaptiveConfig: delta must lie in (0, 1/4)");
  require(A > 0.0, "AdaptiveConfig: A must be > 0");
  require(count_floor_multiplier > 0.0, "AdaptiveConfig: count_floor_multiplier must be > 0");
}

void RangeBounds::validate() const {
  require(alpha1 > 0.0 && alpha2 > alpha1, "RangeBounds: need 0 < alpha1 < alpha2");
  require(beta1 > 0.0, "RangeBounds: beta1 must be > 0");
  require(C1 > 0.0 && C2 > C1, "RangeBounds: need 0 < C1 < C2");
  require(Cprime > 0.0, "RangeBounds: Cprime must be > 0");
}

scalar_t threshold_A(scalar_t delta, const SecondOrderParams& params) {
  params.validate();
  // The closed form is well-defined on (0, 1); the (0, 1/4) restriction
  // belongs to the selection rule, which AdaptiveConfig enforces.
  require(delta > 0.0 && delta < 1.0, "threshold_A: delta must lie in (0, 1)");
  const scalar_t log_term = std::log(2.0 / delta);
  return 6.0 * std::sqrt(2.0 * (params.C + params.Cprime) * log_term) *
         (2.0 * std::sqrt(std::exp(2.0 * params.alpha + 1.0) / params.C) +
          params.Cprime / params.C);
}

scalar_t threshold_A_eps(scalar_t eps, count_t n, const RangeBounds& bounds) {
  bounds.validate();
  require(eps > 0.0 && eps < 1.0, "threshold_A_eps: eps must lie in (0, 1)");
  require(n >= 2, "threshold_A_eps: n must be >= 2");
  const scalar_t nn = static_cast<scalar_t>(n);
  const scalar_t log_term =
      std::log((2.0 / eps) * (1.0 + std::log((bounds.C2 + bounds.Cprime) * nn) / bounds.alpha1));
  return 6.0 * std::sqrt(2.0 * (bounds.C2 + bounds.Cprime)) * std::sqrt(log_term) *
         (2.0 * std::sqrt(std::exp(2.0 * bounds.alpha2 + 1.0) / bounds.C1) +
          bounds.Cprime / bounds.C1);
}

SelectionResult select_k(const TailProbTable& table, const AdaptiveConfig& config) {
  config.validate();
  SelectionResult result;
  const scalar_t n = static_cast<scalar_t>(table.n());
  result.floor = config.count_floor_multiplier * std::log(2.0 / config.delta) / n;

  // p_k is nonincreasing, so the admissible indices form an initial segment.
  int k_top = -1;
  while (table.at(k_top + 2) > result.floor) ++k_top;
  if (k_top < 0) {
    throw NoAdmissibleKError("no threshold index clears the count floor " +
                             std::to_string(result.floor) + " (n too small for this delta)");
  }
  result.k_admissible_max = k_top;

  std::vector<scalar_t> alpha(static_cast<size_t>(k_top) + 1);
  for (int k = 0; k <= k_top; ++k) {
    alpha[static_cast<size_t>(k)] = std::log(table.at(k)) - std::log(table.at(k + 1));
  }

  for (int k = 0; k <= k_top; ++k) {
    bool all_pass = true;
    for (int kp = k + 1; kp <= k_top; ++kp) {
      ComparisonRecord rec;
      rec.k = k;
      rec.k_prime = kp;
      rec.alpha_k = alpha[static_cast<size_t>(k)];
      rec.alpha_kprime = alpha[static_cast<size_t>(kp)];
      rec.abs_diff = std::fabs(rec.alpha_kprime - rec.alpha_k);
      rec.bound = config.A * std::sqrt(1.0 / (n * table.at(kp + 1)));
      rec.pass = rec.abs_diff <= rec.bound;
      result.trace.push_back(rec);
      if (!rec.pass) all_pass = false;
    }
    if (all_pass) {
      result.k_hat = k;
      return result;
    }
  }
  // Unreachable: the largest admissible k has no higher comparisons and
  // therefore always passes.
  result.k_hat = k_top;
  return result;
}

SelectionResult select_k(const Dataset& data, const AdaptiveConfig& config) {
  return select_k(TailProbTable::from_dataset(data), config);
}

EstimateReport adaptive_estimate(const Dataset& data, const AdaptiveConfig& config) {
  const auto table = TailProbTable::from_dataset(data);
  auto selection = select_k(table, config);
  EstimateReport report = alpha_hat_k(table, selection.k_hat);
  report.method = Method::Adaptive;
  report.attach(data);
  report.k_or_params = "k=" + std::to_string(selection.k_hat);
  report.diagnostics["k_hat"] = static_cast<scalar_t>(selection.k_hat);
  report.diagnostics["floor"] = selection.floor;
  report.diagnostics["k_admissible_max"] = static_cast<scalar_t>(selection.k_admissible_max);
  report.diagnostics["comparisons"] = static_cast<scalar_t>(selection.trace.size());
  report.trace = std::move(selection.trace);
  return report;
}

namespace {

SampleSizeReport finish_report(count_t n, scalar_t outer_factor,
                               std::vector<std::pair<std::string, scalar_t>> terms) {
  SampleSizeReport report;
  report.n = static_cast<scalar_t>(n);
  report.terms = std::move(terms);
  scalar_t worst = -1.0;
  for (const auto& [name, value] : report.terms) {
    if (value > worst) {
      worst = value;
      report.binding = name;
    }
  }
  report.threshold = outer_factor * worst;
  report.ok = report.n > report.threshold;
  return report;
}

}  // namespace

SampleSizeReport sample_size_ok(count_t n, const SecondOrderParams& params, scalar_t delta,
                                SampleSizeMode mode) {
  params.validate();
  require(delta > 0.0 && delta < 1.0, "sample_size_ok: delta must lie in (0, 1)");
  require(n >= 1, "sample_size_ok: n must be >= 1");
  const scalar_t a = params.alpha, b = params.beta, C = params.C, Cp = params.Cprime;
  const scalar_t log_term = std::log(2.0 / delta);

  if (mode == SampleSizeMode::Oracle) {
    std::vector<std::pair<std::string, scalar_t>> terms{
        {"bias", std::pow(2.0 * Cp / C, (2.0 * b + 1.0) / b)},
        {"count", std::pow(32.0 * log_term * std::exp(2.0 * a) / C,
                           (2.0 * b + 1.0) / (2.0 * b))},
    };
    return finish_report(n, 1.0, std::move(terms));
  }
  if (mode == SampleSizeMode::Adaptive) {
    std::vector<std::pair<std::string, scalar_t>> terms{
        {"floor_reach", 32.0 * std::pow(2.0 * Cp / std::pow(C, 1.0 + b), 1.0 / b)},
        {"bias", std::pow(2.0 * Cp / C, (2.0 * b + 1.0) / b)},
        {"count", std::pow(32.0 * std::exp(2.0 * a) / C, (2.0 * b + 1.0) / (2.0 * b))},
        {"candidate_floor", std::pow(96.0 * std::exp(2.0 * a) / C, (2.0 * b + 1.0) / b)},
    };
    return finish_report(n, log_term, std::move(terms));
  }
  throw std::invalid_argument("sample_size_ok: RangeBased mode needs bounds and eps");
}

SampleSizeReport sample_size_ok(count_t n, const RangeBounds& bounds, scalar_t eps) {
  bounds.validate();
  require(eps > 0.0 && eps < 1.0, "sample_size_ok: eps must lie in (0, 1)");
  require(n >= 2, "sample_size_ok: n must be >= 2");
  const scalar_t nn = static_cast<scalar_t>(n);
  const scalar_t C1b = std::min(1.0, bounds.C1);
  const scalar_t Cpb = std::max(1.0, bounds.Cprime);
  const scalar_t a2 = bounds.alpha2, b1 = bounds.beta1;
  const scalar_t log_term = std::log(
      (2.0 / eps) * (1.0 + std::log((bounds.C2 + bounds.Cprime) * nn) / bounds.alpha1));
  std::vector<std::pair<std::string, scalar_t>> terms{
      {"floor_reach", 32.0 * std::pow(2.0 * Cpb / std::pow(C1b, 1.0 + b1), 1.0 / b1)},
      {"bias", std::pow(2.0 * Cpb / C1b, 2.0 + 1.0 / b1)},
      {"count", std::pow(32.0 * std::exp(2.0 * a2) / C1b, 1.0 + 1.0 / (2.0 * b1))},
      {"candidate_floor", std::pow(96.0 * std::exp(2.0 * a2) / C1b, 2.0 + 1.0 / b1)},
  };
  return finish_report(n, log_term, std::move(terms));
}

scalar_t constant_B1(const SecondOrderParams& params, scalar_t delta) {
  params.validate();
  require(delta > 0.0 && delta < 1.0, "constant_B1: delta must lie in (0, 1)");
  return 6.0 * std::sqrt(std::exp(2.0 * params.alpha + 1.0) * std::log(2.0 / delta) / params.C);
}

scalar_t constant_B2(const SecondOrderParams& params, scalar_t delta, scalar_t A) {
  require(A > 0.0, "constant_B2: A must be > 0");
  const scalar_t B1 = constant_B1(params, delta);
  return (B1 + 2.0 * A * std::sqrt(std::exp(2.0 * params.alpha) / params.C)) /
         std::sqrt(std::log(2.0 / delta));
}

scalar_t constant_B3(const RangeBounds& bounds) {
  bounds.validate();
  const scalar_t a2 = bounds.alpha2, C1 = bounds.C1, C2 = bounds.C2, Cp = bounds.Cprime;
  return 6.0 * std::sqrt(std::exp(2.0 * a2 + 1.0) / C1) + 3.0 * Cp / C1 +
         24.0 * (std::exp(2.0 * a2) / C1) * std::sqrt(2.0 * std::exp(1.0) * (C2 + Cp)) +
         12.0 * std::exp(a2) * (Cp / C1) * std::sqrt(2.0 * (C2 + Cp) / C1);
}

}  // namespace tailest
