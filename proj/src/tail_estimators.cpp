#include "tailest/tail_estimators.hpp"

#include "tailest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tailest {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Cached e^k for integer k.
scalar_t exp_int(int k) {
  static const std::vector<scalar_t> table = [] {
    std::vector<scalar_t> t(768);
    for (size_t i = 0; i < t.size(); ++i) t[i] = std::exp(static_cast<scalar_t>(i));
    return t;
  }();
  if (k < 0) return std::exp(static_cast<scalar_t>(k));
  if (k < static_cast<int>(table.size())) return table[static_cast<size_t>(k)];
  return std::numeric_limits<scalar_t>::infinity();
}

// Largest integer k >= 0 with x > e^k, or -1 when x <= 1. Exact at bucket
// boundaries: the decision is made by direct comparison, not by log alone.
// e^710 overflows, so 709 caps the index for any representable value.
int tail_bucket(scalar_t x) {
  if (!(x > 1.0)) return -1;
  if (std::isinf(x)) return 709;
  int m = static_cast<int>(std::floor(std::log(x)));
  if (m < 0) m = 0;
  if (m > 709) m = 709;
  while (m >= 0 && !(x > exp_int(m))) --m;
  while (x > exp_int(m + 1)) ++m;
  return m;
}

std::string k_param(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "k=%d", k);
  return buf;
}

// Ascending copy of the sample values.
std::vector<scalar_t> sorted_values(const Dataset& data) {
  std::vector<scalar_t> v(data.values.data(), data.values.data() + data.values.size());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::TailEvent: return "tail_event";
    case Method::Generalized: return "generalized";
    case Method::QuantileDual: return "quantile_dual";
    case Method::Hill: return "hill";
    case Method::OracleTailEvent: return "oracle_tail_event";
    case Method::Adaptive: return "adaptive";
  }
  return "unknown";
}

void EstimateReport::attach(const Dataset& data) {
  n = data.n();
  if (data.external) {
    seed = "external";
  } else {
    seed = std::to_string(data.seed);
  }
}

TailProbTable TailProbTable::from_dataset(const Dataset& data) {
  require(data.n() >= 1, "tail table: dataset must be nonempty");
  TailProbTable table;
  table.n_ = data.n();
  table.empirical_ = true;

  int k_top = -1;
  std::vector<count_t> bucket;
  for (index_t i = 0; i < data.values.size(); ++i) {
    const int m = tail_bucket(data.values[i]);
    if (m < 0) continue;
    if (m > k_top) {
      bucket.resize(static_cast<size_t>(m) + 1, 0);
      k_top = m;
    }
    ++bucket[static_cast<size_t>(m)];
  }
  // p_k = (# values with bucket >= k) / n; one trailing zero entry marks the
  // first empty tail.
  table.p_.assign(static_cast<size_t>(k_top + 2), 0.0);
  count_t acc = 0;
  for (int k = k_top; k >= 0; --k) {
    acc += bucket[static_cast<size_t>(k)];
    table.p_[static_cast<size_t>(k)] =
        static_cast<scalar_t>(acc) / static_cast<scalar_t>(table.n_);
  }
  return table;
}

TailProbTable TailProbTable::analytic(const DistributionModel& model, count_t n, int k_cap) {
  require(n >= 1, "tail table: n must be >= 1");
  require(k_cap >= 1, "tail table: k_cap must be >= 1");
  TailProbTable table;
  table.n_ = n;
  table.empirical_ = false;
  table.p_.resize(static_cast<size_t>(k_cap) + 1);
  for (int k = 0; k <= k_cap; ++k) {
    table.p_[static_cast<size_t>(k)] = survival(model, exp_int(k));
  }
  return table;
}

scalar_t empirical_tail_prob(const Dataset& data, int k) {
  require(data.n() >= 1, "empirical_tail_prob: dataset must be nonempty");
  require(k >= 0, "empirical_tail_prob: k must be >= 0");
  const scalar_t threshold = exp_int(k);
  const count_t count = (data.values > threshold).count();
  return static_cast<scalar_t>(count) / static_cast<scalar_t>(data.n());
}

EstimateReport alpha_hat_k(const TailProbTable& table, int k) {
  require(k >= 0, "alpha_hat_k: k must be >= 0");
  const scalar_t pk = table.at(k);
  const scalar_t pk1 = table.at(k + 1);
  if (pk1 <= 0.0) {
    throw EmptyTailError("no sample mass above e^" + std::to_string(k + 1) +
                         " (k too large for this sample)");
  }
  EstimateReport report;
  report.method = Method::TailEvent;
  report.alpha_hat = std::log(pk) - std::log(pk1);
  report.k_or_params = k_param(k);
  report.n = table.n();
  report.diagnostics["p_k"] = pk;
  report.diagnostics["p_k1"] = pk1;
  return report;
}

EstimateReport alpha_hat_k(const Dataset& data, int k) {
  auto report = alpha_hat_k(TailProbTable::from_dataset(data), k);
  report.attach(data);
  return report;
}

EstimateReport alpha_hat_uv(const Dataset& data, scalar_t u, scalar_t v) {
  require(data.n() >= 1, "alpha_hat_uv: dataset must be nonempty");
  require(v >= 1.0 && u > v, "alpha_hat_uv: need u > v >= 1");
  const scalar_t n = static_cast<scalar_t>(data.n());
  const scalar_t q_u = static_cast<scalar_t>((data.values > u).count()) / n;
  const scalar_t q_v = static_cast<scalar_t>((data.values > v).count()) / n;
  if (q_u <= 0.0) {
    throw EmptyTailError("no sample mass above u (threshold too large for this sample)");
  }
  EstimateReport report;
  report.method = Method::Generalized;
  report.alpha_hat = (std::log(q_v) - std::log(q_u)) / (std::log(u) - std::log(v));
  char buf[96];
  std::snprintf(buf, sizeof buf, "u=%.17g;v=%.17g", u, v);
  report.k_or_params = buf;
  report.attach(data);
  report.diagnostics["q_u"] = q_u;
  report.diagnostics["q_v"] = q_v;
  return report;
}

EstimateReport alpha_tilde_quantile(const Dataset& data, scalar_t q_u, scalar_t q_v) {
  const count_t n = data.n();
  require(n >= 1, "alpha_tilde_quantile: dataset must be nonempty");
  require(q_v > q_u && q_v <= 1.0 && q_u >= 1.0 / static_cast<scalar_t>(n),
          "alpha_tilde_quantile: need 1 >= q_v > q_u >= 1/n");
  const auto m_u = static_cast<count_t>(std::floor(q_u * static_cast<scalar_t>(n)));
  const auto m_v = static_cast<count_t>(std::floor(q_v * static_cast<scalar_t>(n)));
  require(m_v <= n - 1, "alpha_tilde_quantile: order statistic X_(n - floor(q_v n)) "
                        "does not exist (q_v too large)");
  const auto sorted = sorted_values(data);
  // X_(j) with 1-based j = n - floor(q n).
  const scalar_t u_hat = sorted[static_cast<size_t>(n - m_u - 1)];
  const scalar_t v_hat = sorted[static_cast<size_t>(n - m_v - 1)];
  if (u_hat == v_hat) {
    throw DegenerateSpacingError("tied order statistics (q_u, q_v too close for this sample)");
  }
  EstimateReport report;
  report.method = Method::QuantileDual;
  report.alpha_hat = (std::log(q_v) - std::log(q_u)) / (std::log(u_hat) - std::log(v_hat));
  char buf[96];
  std::snprintf(buf, sizeof buf, "q_u=%.17g;q_v=%.17g", q_u, q_v);
  report.k_or_params = buf;
  report.attach(data);
  report.diagnostics["u_hat"] = u_hat;
  report.diagnostics["v_hat"] = v_hat;
  return report;
}

EstimateReport hill(const Dataset& data, scalar_t r) {
  const count_t n = data.n();
  require(n >= 1, "hill: dataset must be nonempty");
  require(r > 0.0 && r < 1.0, "hill: r must lie in (0, 1)");
  const auto m = static_cast<count_t>(std::floor(r * static_cast<scalar_t>(n)));
  require(m >= 1, "hill: floor(r n) must be >= 1");
  const auto sorted = sorted_values(data);
  const scalar_t base = sorted[static_cast<size_t>(n - m)];  // X_(n - m + 1)
  if (base <= 1.0) {
    throw InvalidBaseError("reference order statistic <= 1; its log cannot normalize");
  }
  const scalar_t log_base = std::log(base);
  scalar_t acc = 0.0;
  for (count_t i = 1; i <= m; ++i) {
    acc += std::log(sorted[static_cast<size_t>(n - i)]) / log_base;
  }
  EstimateReport report;
  report.method = Method::Hill;
  report.alpha_hat = static_cast<scalar_t>(m) / acc;
  char buf[64];
  std::snprintf(buf, sizeof buf, "r=%.17g", r);
  report.k_or_params = buf;
  report.attach(data);
  report.diagnostics["m"] = static_cast<scalar_t>(m);
  report.diagnostics["base"] = base;
  return report;
}

int oracle_k(scalar_t alpha, scalar_t beta, count_t n) {
  require(alpha > 0.0 && beta > 0.0, "oracle_k: alpha and beta must be > 0");
  require(n >= 1, "oracle_k: n must be >= 1");
  return static_cast<int>(
      std::floor(std::log(static_cast<scalar_t>(n)) / (alpha * (2.0 * beta + 1.0)) + 1.0));
}

RoughPluginResult rough_then_plugin_k(const Dataset& data, scalar_t beta) {
  require(beta > 0.0, "rough_then_plugin_k: beta must be > 0");
  require(data.n() >= 16, "rough_then_plugin_k: n must be >= 16");
  const scalar_t n = static_cast<scalar_t>(data.n());
  RoughPluginResult result;
  const scalar_t ll = std::log(std::log(n));
  result.k_rough = static_cast<int>(std::llround(ll * ll));
  result.alpha_rough = alpha_hat_k(data, result.k_rough).alpha_hat;
  result.k1 = static_cast<int>(
      std::floor(std::log(n) / (result.alpha_rough * (2.0 * beta + 1.0)) + 1.0));
  return result;
}

namespace {

DeviationBound make_bound(int k, count_t n, scalar_t delta, const SecondOrderParams& params,
                          scalar_t stochastic, scalar_t p_k1_for_flag) {
  DeviationBound b;
  b.stochastic = stochastic;
  b.bias = 3.0 * params.Cprime / params.C * std::exp(-static_cast<scalar_t>(k) * params.alpha * params.beta);
  b.value = b.stochastic + b.bias;
  b.count_condition_ok =
      p_k1_for_flag >= 16.0 * std::log(2.0 / delta) / static_cast<scalar_t>(n);
  b.bias_condition_ok = std::exp(-static_cast<scalar_t>(k) * params.alpha * params.beta) <=
                        params.C / (2.0 * params.Cprime);
  return b;
}

}  // namespace

DeviationBound deviation_bound_empirical(int k, count_t n, scalar_t delta,
                                         const SecondOrderParams& params, scalar_t p_k1) {
  params.validate();
  require(delta > 0.0 && delta < 1.0, "deviation_bound: delta must lie in (0, 1)");
  require(p_k1 > 0.0, "deviation_bound: p must be > 0 in empirical mode");
  require(k >= 0 && n >= 1, "deviation_bound: need k >= 0 and n >= 1");
  const scalar_t stochastic =
      6.0 * std::sqrt(std::log(2.0 / delta) / (static_cast<scalar_t>(n) * p_k1));
  return make_bound(k, n, delta, params, stochastic, p_k1);
}

DeviationBound deviation_bound_analytic(int k, count_t n, scalar_t delta,
                                        const SecondOrderParams& params) {
  params.validate();
  require(delta > 0.0 && delta < 1.0, "deviation_bound: delta must lie in (0, 1)");
  require(k >= 0 && n >= 1, "deviation_bound: need k >= 0 and n >= 1");
  const scalar_t stochastic =
      6.0 * std::sqrt(std::exp((k + 1.0) * params.alpha + 1.0) * std::log(2.0 / delta) /
                      (params.C * static_cast<scalar_t>(n)));
  // Class lower bound for p_{k+1}, valid when the bias condition holds.
  const scalar_t p_lb = 0.5 * params.C * std::exp(-(k + 1.0) * params.alpha);
  return make_bound(k, n, delta, params, stochastic, p_lb);
}

}  // namespace tailest
