#include "tailest/mc_harness.hpp"

#include "tailest/errors.hpp"
#include "tailest/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace tailest {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

scalar_t quantile_sorted(const std::vector<scalar_t>& sorted, scalar_t q) {
  if (sorted.empty()) return std::numeric_limits<scalar_t>::quiet_NaN();
  if (sorted.size() == 1) return sorted.front();
  const scalar_t pos = q * static_cast<scalar_t>(sorted.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const scalar_t frac = pos - static_cast<scalar_t>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string MethodSpec::id() const {
  if (!label.empty()) return label;
  char buf[96];
  switch (kind) {
    case Kind::FixedK:
      std::snprintf(buf, sizeof buf, "fixed_k%d", k);
      return buf;
    case Kind::OracleK:
      return "oracle";
    case Kind::ConsistencyK:
      return "consistency";
    case Kind::RoughPlugin:
      return "rough_plugin";
    case Kind::Adaptive:
      return "adaptive";
    case Kind::Hill:
      std::snprintf(buf, sizeof buf, "hill_r%g", r);
      return buf;
    case Kind::Generalized:
      std::snprintf(buf, sizeof buf, "generalized_u%g_v%g", u, v);
      return buf;
    case Kind::QuantileDual:
      std::snprintf(buf, sizeof buf, "quantile_dual_%g_%g", q_u, q_v);
      return buf;
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  truth.validate();
  require(!n_grid.empty(), "experiment: n_grid must be nonempty");
  for (size_t i = 0; i < n_grid.size(); ++i) {
    require(n_grid[i] >= 1, "experiment: sample sizes must be >= 1");
    if (i > 0) require(n_grid[i] > n_grid[i - 1], "experiment: n_grid must be strictly increasing");
  }
  require(trials >= 1, "experiment: trials must be >= 1");
  require(!methods.empty(), "experiment: at least one method is required");
  for (const auto& m : methods) {
    if (m.kind == MethodSpec::Kind::Adaptive) m.adaptive.validate();
    if (m.kind == MethodSpec::Kind::FixedK) require(m.k >= 0, "experiment: fixed k must be >= 0");
    if (m.kind == MethodSpec::Kind::Hill) require(m.r > 0.0 && m.r < 1.0, "experiment: hill r in (0,1)");
  }
}

namespace {

EstimateReport run_method(const MethodSpec& spec, const Dataset& data,
                          const TailProbTable& table, const SecondOrderParams& truth) {
  switch (spec.kind) {
    case MethodSpec::Kind::FixedK: {
      auto rep = alpha_hat_k(table, spec.k);
      rep.attach(data);
      return rep;
    }
    case MethodSpec::Kind::OracleK: {
      const int k = oracle_k(truth.alpha, truth.beta, data.n());
      auto rep = alpha_hat_k(table, k);
      rep.method = Method::OracleTailEvent;
      rep.attach(data);
      return rep;
    }
    case MethodSpec::Kind::ConsistencyK: {
      const int k = static_cast<int>(
          std::ceil(std::log(std::log(static_cast<scalar_t>(data.n())))));
      auto rep = alpha_hat_k(table, std::max(0, k));
      rep.attach(data);
      return rep;
    }
    case MethodSpec::Kind::RoughPlugin: {
      const auto stage = rough_then_plugin_k(data, spec.beta);
      auto rep = alpha_hat_k(table, stage.k1);
      rep.attach(data);
      rep.k_or_params = "k=" + std::to_string(stage.k1);
      rep.diagnostics["alpha_rough"] = stage.alpha_rough;
      rep.diagnostics["k_rough"] = static_cast<scalar_t>(stage.k_rough);
      return rep;
    }
    case MethodSpec::Kind::Adaptive:
      return adaptive_estimate(data, spec.adaptive);
    case MethodSpec::Kind::Hill:
      return hill(data, spec.r);
    case MethodSpec::Kind::Generalized:
      return alpha_hat_uv(data, spec.u, spec.v);
    case MethodSpec::Kind::QuantileDual:
      return alpha_tilde_quantile(data, spec.q_u, spec.q_v);
  }
  throw std::logic_error("run_method: unhandled method kind");
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<TrialRecord> records;
  records.reserve(config.n_grid.size() * static_cast<size_t>(config.trials) *
                  config.methods.size());
  for (const count_t n : config.n_grid) {
    for (int trial = 0; trial < config.trials; ++trial) {
      const seed_t seed = trial_seed(config.base_seed, static_cast<std::uint64_t>(n),
                                     static_cast<std::uint64_t>(trial));
      const Dataset data = sample(config.model, n, seed);
      const TailProbTable table = TailProbTable::from_dataset(data);
      for (const auto& spec : config.methods) {
        TrialRecord rec;
        rec.n = n;
        rec.trial = trial;
        rec.seed = seed;
        rec.method = spec.id();
        try {
          const EstimateReport rep = run_method(spec, data, table, config.truth);
          rec.alpha_hat = rep.alpha_hat;
          rec.abs_error = std::fabs(rep.alpha_hat - config.truth.alpha);
          rec.k_or_params = rep.k_or_params;
          rec.flags = "ok";
          rec.failed = false;
        } catch (const EstimationError& err) {
          rec.alpha_hat = std::numeric_limits<scalar_t>::quiet_NaN();
          rec.abs_error = std::numeric_limits<scalar_t>::quiet_NaN();
          rec.k_or_params = "";
          rec.flags = err.name();
          rec.failed = true;
        }
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

RateFit fit_rate(const std::vector<TrialRecord>& records, const std::string& method) {
  std::map<count_t, std::vector<scalar_t>> by_n;
  for (const auto& rec : records) {
    if (rec.method != method) continue;
    if (!rec.failed) by_n[rec.n].push_back(rec.abs_error);
  }
  RateFit fit;
  for (auto& [n, errs] : by_n) {
    if (errs.size() < 30) {
      throw InsufficientDataError("method '" + method + "' has only " +
                                  std::to_string(errs.size()) + " successful trials at n = " +
                                  std::to_string(n) + " (need >= 30)");
    }
    std::sort(errs.begin(), errs.end());
    const scalar_t median = quantile_sorted(errs, 0.5);
    fit.points.emplace_back(std::log(static_cast<scalar_t>(n)), std::log(median));
  }
  if (fit.points.size() < 3) {
    throw InsufficientDataError("method '" + method + "' has " +
                                std::to_string(fit.points.size()) +
                                " distinct sample sizes (need >= 3)");
  }

  const auto m = static_cast<index_t>(fit.points.size());
  matrix_t X(m, 2);
  vector_t y(m);
  for (index_t i = 0; i < m; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = fit.points[static_cast<size_t>(i)].first;
    y(i) = fit.points[static_cast<size_t>(i)].second;
  }
  const vector_t coef = X.colPivHouseholderQr().solve(y);
  fit.intercept = coef(0);
  fit.slope = coef(1);
  const vector_t resid = y - X * coef;
  const scalar_t ss_res = resid.squaredNorm();
  const scalar_t ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  std::map<std::pair<count_t, std::string>, std::pair<std::vector<scalar_t>, int>> cells;
  for (const auto& rec : records) {
    auto& cell = cells[{rec.n, rec.method}];
    if (rec.failed) {
      ++cell.second;
    } else {
      cell.first.push_back(rec.abs_error);
    }
  }
  std::vector<SummaryRow> rows;
  rows.reserve(cells.size());
  for (auto& [key, cell] : cells) {
    SummaryRow row;
    row.n = key.first;
    row.method = key.second;
    row.fail_count = cell.second;
    std::sort(cell.first.begin(), cell.first.end());
    row.median_error = quantile_sorted(cell.first, 0.5);
    row.q25 = quantile_sorted(cell.first, 0.25);
    row.q75 = quantile_sorted(cell.first, 0.75);
    rows.push_back(std::move(row));
  }
  return rows;
}

scalar_t median_abs_error(const std::vector<TrialRecord>& records, const std::string& method,
                          count_t n) {
  std::vector<scalar_t> errs;
  for (const auto& rec : records) {
    if (rec.method == method && rec.n == n && !rec.failed) errs.push_back(rec.abs_error);
  }
  require(!errs.empty(), "median_abs_error: no successful records for the requested cell");
  std::sort(errs.begin(), errs.end());
  return quantile_sorted(errs, 0.5);
}

CoverageReport coverage(const DistributionModel& model, const SecondOrderParams& truth,
                        count_t n, int trials, seed_t base_seed, const CoverageSpec& spec) {
  require(n >= 1 && trials >= 1, "coverage: need n >= 1 and trials >= 1");
  require(spec.delta > 0.0 && spec.delta < 1.0, "coverage: delta must lie in (0, 1)");
  require(spec.k >= 0, "coverage: k must be >= 0");

  const scalar_t nn = static_cast<scalar_t>(n);
  const scalar_t log_term = std::log(2.0 / spec.delta);
  const scalar_t p_k = survival(model, std::exp(static_cast<scalar_t>(spec.k)));
  const scalar_t p_k1 = survival(model, std::exp(static_cast<scalar_t>(spec.k) + 1.0));

  // Count-floor index K: the last k with p_k >= 16 log(2/delta) / n.
  int cap_k = 0;
  if (spec.kind == CoverageSpec::Kind::StochasticDominance) {
    const scalar_t floor16 = 16.0 * log_term / nn;
    while (survival(model, std::exp(static_cast<scalar_t>(cap_k) + 1.0)) >= floor16) ++cap_k;
    require(survival(model, std::exp(static_cast<scalar_t>(cap_k))) >= floor16,
            "coverage: no count-floor index exists for this (model, n, delta)");
  }

  CoverageReport report;
  report.trials = trials;
  report.guaranteed = (spec.kind == CoverageSpec::Kind::Bernstein ||
                       spec.kind == CoverageSpec::Kind::StochasticDominance)
                          ? 1.0 - spec.delta
                          : 1.0 - 2.0 * spec.delta;
  for (int trial = 0; trial < trials; ++trial) {
    const seed_t seed = trial_seed(base_seed, static_cast<std::uint64_t>(n),
                                   static_cast<std::uint64_t>(trial));
    const Dataset data = sample(model, n, seed);
    bool held = false;
    try {
      switch (spec.kind) {
        case CoverageSpec::Kind::Bernstein: {
          const scalar_t p_hat = empirical_tail_prob(data, spec.k);
          held = std::fabs(p_hat - p_k) <= 2.0 * std::sqrt(p_k * log_term / nn);
          break;
        }
        case CoverageSpec::Kind::LargeDeviationA: {
          const scalar_t a_hat = alpha_hat_k(data, spec.k).alpha_hat;
          const scalar_t centre = std::log(p_k) - std::log(p_k1);
          held = std::fabs(a_hat - centre) <= 6.0 * std::sqrt(log_term / (nn * p_k1));
          break;
        }
        case CoverageSpec::Kind::LargeDeviationB: {
          const scalar_t a_hat = alpha_hat_k(data, spec.k).alpha_hat;
          const auto bound = deviation_bound_empirical(spec.k, n, spec.delta, truth, p_k1);
          held = std::fabs(a_hat - truth.alpha) <= bound.value;
          break;
        }
        case CoverageSpec::Kind::StochasticDominance: {
          const scalar_t p_hat = empirical_tail_prob(data, cap_k + 1);
          held = p_hat <= 24.0 * log_term / nn;
          break;
        }
      }
    } catch (const EstimationError&) {
      held = false;  // an undefined estimate counts against coverage
    }
    if (held) ++report.successes;
  }
  report.frequency = static_cast<scalar_t>(report.successes) / static_cast<scalar_t>(trials);
  return report;
}

}  // namespace tailest
