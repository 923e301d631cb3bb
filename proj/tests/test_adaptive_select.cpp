#include "tailest/adaptive_select.hpp"

#include "tailest/errors.hpp"
#include "tailest/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace tailest;

TEST_CASE("comparison constant closed form") {
  // unit constants at log(2/delta) = 1
  const SecondOrderParams params{1.0, 1.0, 1.0, 1.0};
  CHECK(threshold_A(2.0 / std::exp(1.0), params) ==
        doctest::Approx(119.56053768811356).epsilon(1e-12));

  // decreasing delta tightens the constant
  double prev = 0.0;
  for (double delta : {0.2, 0.1, 0.05, 0.01, 0.001}) {
    const double a = threshold_A(delta, params);
    CHECK(a > prev);
    prev = a;
  }

  // large C limit is finite: A -> 12 sqrt(2 log(2/delta) e^{2 alpha + 1})
  const SecondOrderParams big_c{1.0, 1.0, 1e6, 1.0};
  const double limit = 12.0 * std::sqrt(2.0 * std::exp(3.0));
  CHECK(threshold_A(2.0 / std::exp(1.0), big_c) == doctest::Approx(limit).epsilon(1e-3));
}

TEST_CASE("range-based comparison constant") {
  RangeBounds unit;
  unit.alpha1 = 1.0;
  unit.alpha2 = 1.0 + 1e-12;  // degenerate range pinned at 1
  unit.beta1 = 1.0;
  unit.C1 = 1.0;
  unit.C2 = 1.0 + 1e-12;
  unit.Cprime = 1.0;

  // A(eps) factors as sqrt(log term) times the boundary shape 119.5605...
  for (const count_t n : {100, 10000, 1000000}) {
    for (const double eps : {0.5, 0.1, 0.01}) {
      const double log_term =
          std::log((2.0 / eps) * (1.0 + std::log((unit.C2 + unit.Cprime) * static_cast<double>(n))));
      CHECK(threshold_A_eps(eps, n, unit) ==
            doctest::Approx(std::sqrt(log_term) * 119.56053768811356).epsilon(1e-9));
    }
  }

  // strictly increasing in n, decreasing in eps
  CHECK(threshold_A_eps(0.1, 1000, unit) < threshold_A_eps(0.1, 10000, unit));
  CHECK(threshold_A_eps(0.01, 1000, unit) > threshold_A_eps(0.5, 1000, unit));
}

TEST_CASE("selection picks the smallest index under a population plug-in") {
  // With analytic probabilities from an exact Pareto law every estimate
  // equals the tail index, so all comparisons pass at the first candidate.
  const auto model = DistributionModel::exact_pareto(1.0, 1.0);
  const auto table = TailProbTable::analytic(model, 100000, 20);
  AdaptiveConfig config{0.05, 1.0, 24.0};
  const auto sel = select_k(table, config);
  CHECK(sel.k_hat == 0);
  for (const auto& rec : sel.trace) CHECK(rec.pass);
}

TEST_CASE("selection fails when nothing clears the count floor") {
  Dataset tiny;
  tiny.external = true;
  tiny.values.resize(10);
  for (index_t i = 0; i < 10; ++i) tiny.values[i] = 0.2 + 0.08 * static_cast<double>(i);
  AdaptiveConfig config{0.05, 1.0, 24.0};
  CHECK_THROWS_AS(select_k(tiny, config), NoAdmissibleKError);
}

TEST_CASE("selected index stays below the bias-variance crossover on tilted data") {
  // Change point at e^3 with tail tilt 0.5: the effective tail index is 0.5
  // with second-order behaviour matching beta = 1, class scale K^-t and
  // class allowance 1 - K^{-1/2}. The crossover index for that class at
  // n = 1e5 is 7; the selected index should not exceed it.
  const double K = std::exp(3.0);
  const auto model = DistributionModel::piecewise_lb(1.0, 0.5, K);
  const SecondOrderParams cls{0.5, 1.0, std::pow(K, -0.5), 1.0 - std::pow(K, -0.5)};
  AdaptiveConfig config{0.05, threshold_A(0.05, cls), 24.0};
  const count_t n = 100000;
  const int k_bar = static_cast<int>(std::floor(
      std::log(std::pow(static_cast<double>(n) / std::log(40.0), 1.0 / (0.5 * 3.0))) + 1.0));
  CHECK(k_bar == 7);
  int within = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const auto data = sample(model, n, trial_seed(2024, 100000, static_cast<seed_t>(trial)));
    const auto sel = select_k(data, config);
    if (sel.k_hat <= k_bar) ++within;
  }
  CHECK(within >= static_cast<int>(0.95 * trials));
}

TEST_CASE("trace records every comparison for failed candidates") {
  // A tiny comparison constant forces every candidate below the top to fail,
  // so the trace must hold the full comparison triangle.
  const auto model = DistributionModel::perturbed_pareto(1.0, 1.0, 1.0, 0.5);
  const auto data = sample(model, 50000, 9);
  AdaptiveConfig config{0.05, 0.01, 24.0};
  const auto sel = select_k(data, config);
  const int top = sel.k_admissible_max;
  CHECK(sel.k_hat == top);
  CHECK(static_cast<int>(sel.trace.size()) == top * (top + 1) / 2);
  std::set<std::pair<int, int>> seen;
  for (const auto& rec : sel.trace) {
    CHECK(rec.k < rec.k_prime);
    CHECK(rec.k_prime <= top);
    CHECK(rec.abs_diff == doctest::Approx(std::fabs(rec.alpha_kprime - rec.alpha_k)));
    seen.insert({rec.k, rec.k_prime});
  }
  CHECK(static_cast<int>(seen.size()) == top * (top + 1) / 2);
}

TEST_CASE("weaker confidence enlarges the candidate set") {
  const auto model = DistributionModel::exact_pareto(1.0, 1.0);
  const auto data = sample(model, 5000, 21);
  AdaptiveConfig strict{0.01, 5.0, 24.0};
  AdaptiveConfig loose{0.2, 5.0, 24.0};
  const auto sel_strict = select_k(data, strict);
  const auto sel_loose = select_k(data, loose);
  CHECK(sel_loose.k_admissible_max >= sel_strict.k_admissible_max);
  CHECK(sel_loose.floor < sel_strict.floor);
}

TEST_CASE("adaptive estimate carries selection diagnostics and trace") {
  const auto model = DistributionModel::exact_pareto(2.0, 1.0);
  const auto data = sample(model, 20000, 4);
  AdaptiveConfig config{0.05, 5.0, 24.0};
  const auto rep = adaptive_estimate(data, config);
  CHECK(rep.diagnostics.count("k_hat") == 1);
  CHECK(rep.diagnostics.count("floor") == 1);
  CHECK(rep.diagnostics.at("floor") ==
        doctest::Approx(24.0 * std::log(40.0) / 20000.0).epsilon(1e-12));
  CHECK(rep.trace.size() == rep.diagnostics.at("comparisons"));
  CHECK(rep.k_or_params == "k=" + std::to_string(static_cast<int>(rep.diagnostics.at("k_hat"))));

  Dataset tiny;
  tiny.external = true;
  tiny.values = array_t::Constant(5, 0.5);
  CHECK_THROWS_AS(adaptive_estimate(tiny, config), NoAdmissibleKError);
}

TEST_CASE("adaptive estimate is accurate on exact pareto data") {
  // Exact Pareto has zero bias at every threshold, so even the conservative
  // admissibility constant keeps the estimate close to the truth.
  const auto model = DistributionModel::exact_pareto(2.0, 1.0);
  const SecondOrderParams params{2.0, 1.0, 1.0, 0.01};
  AdaptiveConfig config{0.05, threshold_A(0.05, params), 24.0};
  std::vector<double> errors;
  for (int trial = 0; trial < 200; ++trial) {
    const auto data = sample(model, 100000, trial_seed(5, 100000, static_cast<seed_t>(trial)));
    errors.push_back(std::fabs(adaptive_estimate(data, config).alpha_hat - 2.0));
  }
  std::sort(errors.begin(), errors.end());
  CHECK(errors[errors.size() / 2] <= 0.1);
}

TEST_CASE("reports from different seeds are independent and both carry traces") {
  const auto model = DistributionModel::perturbed_pareto(1.0, 1.0, 1.0, 0.5);
  AdaptiveConfig config{0.05, 2.0, 24.0};
  const auto rep_a = adaptive_estimate(sample(model, 30000, 1), config);
  const auto rep_b = adaptive_estimate(sample(model, 30000, 2), config);
  CHECK(rep_a.seed != rep_b.seed);
  CHECK(rep_a.alpha_hat != rep_b.alpha_hat);
  CHECK(rep_a.diagnostics.count("k_hat") == 1);
  CHECK(rep_b.diagnostics.count("k_hat") == 1);
}

TEST_CASE("adaptive selection with a practical constant stays within 5x of the oracle") {
  const auto model = DistributionModel::perturbed_pareto(1.0, 1.0, 1.0, 0.5);
  const count_t n = 100000;
  const int k_star = oracle_k(1.0, 1.0, n);
  AdaptiveConfig config{0.05, 2.0, 24.0};
  std::vector<double> err_adaptive, err_oracle;
  for (int trial = 0; trial < 200; ++trial) {
    const auto data = sample(model, n, trial_seed(314, 100000, static_cast<seed_t>(trial)));
    const auto table = TailProbTable::from_dataset(data);
    err_adaptive.push_back(
        std::fabs(alpha_hat_k(table, select_k(table, config).k_hat).alpha_hat - 1.0));
    err_oracle.push_back(std::fabs(alpha_hat_k(table, k_star).alpha_hat - 1.0));
  }
  std::sort(err_adaptive.begin(), err_adaptive.end());
  std::sort(err_oracle.begin(), err_oracle.end());
  CHECK(err_adaptive[100] <= 5.0 * err_oracle[100]);
}

TEST_CASE("sample size conditions: known-constants adaptive mode") {
  const SecondOrderParams params{1.0, 1.0, 1.0, 1.0};
  const auto report = sample_size_ok(1000000, params, 0.05, SampleSizeMode::Adaptive);
  REQUIRE(report.terms.size() == 4);
  CHECK(report.terms[0].second == doctest::Approx(64.0));
  CHECK(report.terms[1].second == doctest::Approx(8.0));
  CHECK(report.terms[2].second ==
        doctest::Approx(std::pow(32.0 * std::exp(2.0), 1.5)).epsilon(1e-12));
  CHECK(report.terms[3].second ==
        doctest::Approx(std::pow(96.0 * std::exp(2.0), 3.0)).epsilon(1e-12));
  CHECK(report.binding == "candidate_floor");
  CHECK(report.threshold == doctest::Approx(1316664281.0997887).epsilon(1e-10));
  CHECK_FALSE(report.ok);

  const auto big = sample_size_ok(2000000000, params, 0.05, SampleSizeMode::Adaptive);
  CHECK(big.ok);
}

TEST_CASE("sample size conditions: vanishing C' drops its terms from the binding set") {
  const SecondOrderParams params{1.0, 1.0, 1.0, 1e-12};
  const auto adaptive = sample_size_ok(1000, params, 0.05, SampleSizeMode::Adaptive);
  CHECK(adaptive.binding != "bias");
  CHECK(adaptive.binding != "floor_reach");
  const auto oracle = sample_size_ok(1000, params, 0.05, SampleSizeMode::Oracle);
  CHECK(oracle.binding == "count");
}

TEST_CASE("sample size conditions: oracle mode saturates for huge n") {
  const SecondOrderParams params{1.0, 1.0, 1.0, 1.0};
  CHECK(sample_size_ok(4000000000LL, params, 0.05, SampleSizeMode::Oracle).ok);
}

TEST_CASE("sample size conditions: range mode uses clamped range constants") {
  RangeBounds bounds;
  bounds.alpha1 = 0.5;
  bounds.alpha2 = 1.0;
  bounds.beta1 = 1.0;
  bounds.C1 = 0.5;
  bounds.C2 = 2.0;
  bounds.Cprime = 0.5;
  const auto report = sample_size_ok(100000, bounds, 0.05);
  // \bar C' = max(1, C') and \bar C_1 = min(1, C1) enter every term
  const double c1b = 0.5, cpb = 1.0;
  CHECK(report.terms[1].second == doctest::Approx(std::pow(2.0 * cpb / c1b, 3.0)).epsilon(1e-12));
  CHECK(report.terms[3].second ==
        doctest::Approx(std::pow(96.0 * std::exp(2.0) / c1b, 3.0)).epsilon(1e-12));
  CHECK_FALSE(report.ok);
}

TEST_CASE("theory constants B1, B2") {
  const SecondOrderParams params{1.0, 1.0, 1.0, 1.0};
  const double delta_unit = 2.0 / std::exp(1.0);  // log(2/delta) = 1
  CHECK(constant_B1(params, delta_unit) == doctest::Approx(26.890134422028386).epsilon(1e-12));
  // at unit log factor B2 collapses to B1 + 2 A e^alpha
  const double A = 3.0;
  CHECK(constant_B2(params, delta_unit, A) ==
        doctest::Approx(constant_B1(params, delta_unit) + 2.0 * A * std::exp(1.0))
            .epsilon(1e-12));
}

TEST_CASE("B3 dominates the range of adaptive constants") {
  RangeBounds bounds;
  bounds.alpha1 = 0.5;
  bounds.alpha2 = 2.0;
  bounds.beta1 = 1.0;
  bounds.C1 = 0.5;
  bounds.C2 = 2.0;
  bounds.Cprime = 1.0;
  const double B3 = constant_B3(bounds);
  const count_t n = 1000000;
  const double L = std::log((bounds.C2 + bounds.Cprime) * static_cast<double>(n));

  Xoshiro256pp rng(88);
  for (int rep = 0; rep < 100; ++rep) {
    const double alpha = bounds.alpha1 + (bounds.alpha2 - bounds.alpha1) * rng.uniform01();
    const double C = bounds.C1 + (bounds.C2 - bounds.C1) * rng.uniform01();
    const double delta = 0.001 + 0.009 * rng.uniform01();
    const double eps = (1.0 + L / bounds.alpha1) * delta;
    REQUIRE(eps < 1.0);
    const double A = threshold_A_eps(eps, n, bounds);
    const SecondOrderParams params{alpha, 1.0, C, bounds.Cprime};
    const double lhs = constant_B2(params, delta, A) + 3.0 * bounds.Cprime / C;
    CHECK(lhs <= B3 * (1.0 + 1e-12));
  }
}

TEST_CASE("config validation") {
  AdaptiveConfig bad_delta{0.3, 1.0, 24.0};
  CHECK_THROWS_AS(bad_delta.validate(), std::invalid_argument);
  AdaptiveConfig bad_a{0.05, -1.0, 24.0};
  CHECK_THROWS_AS(bad_a.validate(), std::invalid_argument);
  RangeBounds bad;
  bad.alpha1 = 2.0;
  bad.alpha2 = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
