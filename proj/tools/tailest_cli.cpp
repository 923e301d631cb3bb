// Command-line front end: estimate tail indices from data files, run seeded
// simulation sweeps, and compute identification lower bounds.

#include "tailest/config.hpp"
#include "tailest/errors.hpp"
#include "tailest/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace tailest;

constexpr int kExitUsage = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitIo = 4;

struct OutDir {
  std::string path;
  bool enabled() const { return !path.empty(); }
  std::string join(const std::string& name) const {
    return (std::filesystem::path(path) / name).string();
  }
};

void emit_report(const EstimateReport& report, const OutDir& out) {
  std::cout << report_csv_header() << "\n" << report_csv_row(report) << "\n";
  if (out.enabled()) {
    write_text_file(out.join("report.csv"),
                    report_csv_header() + "\n" + report_csv_row(report) + "\n");
  }
}

// Sidecar recording how a run was produced, in the same config grammar.
void emit_sidecar(const OutDir& out, const std::string& content) {
  if (out.enabled()) write_text_file(out.join("resolved_config.txt"), content);
}

int cmd_estimate(const std::string& input, const std::string& method, int k, scalar_t r,
                 scalar_t u, scalar_t v, scalar_t q_u, scalar_t q_v, const OutDir& out) {
  const Dataset data = read_dataset_file(input);
  EstimateReport report;
  if (method == "tail-event") {
    report = alpha_hat_k(data, k);
  } else if (method == "hill") {
    report = hill(data, r);
  } else if (method == "generalized") {
    report = alpha_hat_uv(data, u, v);
  } else if (method == "quantile-dual") {
    report = alpha_tilde_quantile(data, q_u, q_v);
  } else {
    std::cerr << "error: unknown method '" << method << "'\n";
    return kExitUsage;
  }
  emit_report(report, out);
  std::ostringstream sidecar;
  sidecar << "[estimate]\ninput = " << input << "\nmethod = " << method
          << "\nk = " << k << "\nr = " << fmt_g17(r) << "\nu = " << fmt_g17(u)
          << "\nv = " << fmt_g17(v) << "\nq_u = " << fmt_g17(q_u)
          << "\nq_v = " << fmt_g17(q_v) << "\n";
  emit_sidecar(out, sidecar.str());
  return 0;
}

int cmd_adaptive(const std::string& input, scalar_t delta, std::optional<scalar_t> A,
                 std::optional<std::vector<scalar_t>> params, const std::string& trace_path,
                 const OutDir& out) {
  const Dataset data = read_dataset_file(input);
  AdaptiveConfig config;
  config.delta = delta;
  SecondOrderParams truth;
  if (A) {
    config.A = *A;
  } else if (params && params->size() == 4) {
    truth = {(*params)[0], (*params)[1], (*params)[2], (*params)[3]};
    config.A = threshold_A(delta, truth);
  } else {
    std::cerr << "error: adaptive needs --A or --params alpha,beta,C,Cprime\n";
    return kExitUsage;
  }
  const EstimateReport report = adaptive_estimate(data, config);
  emit_report(report, out);
  if (!trace_path.empty()) {
    std::ostringstream os;
    write_trace_csv(os, report.trace);
    write_text_file(trace_path, os.str());
  }
  std::ostringstream sidecar;
  sidecar << "[adaptive]\ninput = " << input << "\ndelta = " << fmt_g17(delta)
          << "\nA = " << fmt_g17(config.A) << "\n";
  emit_sidecar(out, sidecar.str());
  return 0;
}

int cmd_oracle(const std::string& input, scalar_t alpha, scalar_t beta, const OutDir& out) {
  const Dataset data = read_dataset_file(input);
  const int k = oracle_k(alpha, beta, data.n());
  EstimateReport report = alpha_hat_k(data, k);
  report.method = Method::OracleTailEvent;
  report.diagnostics["oracle_alpha"] = alpha;
  report.diagnostics["oracle_beta"] = beta;
  emit_report(report, out);
  std::ostringstream sidecar;
  sidecar << "[oracle]\ninput = " << input << "\nalpha = " << fmt_g17(alpha)
          << "\nbeta = " << fmt_g17(beta) << "\n";
  emit_sidecar(out, sidecar.str());
  return 0;
}

int cmd_simulate(const std::string& config_path, std::optional<seed_t> seed_override,
                 const OutDir& out) {
  const RunConfig config = RunConfig::from_file(config_path, seed_override);
  const auto records = run_experiment(config.experiment);

  std::ostringstream trials_os;
  write_trials_csv(trials_os, records);
  write_text_file(out.join("trials.csv"), trials_os.str());

  std::ostringstream summary_os;
  write_summary_csv(summary_os, summarize(records));
  write_text_file(out.join("summary.csv"), summary_os.str());

  std::vector<std::pair<std::string, RateFit>> fits;
  for (const auto& spec : config.experiment.methods) {
    try {
      fits.emplace_back(spec.id(), fit_rate(records, spec.id()));
    } catch (const InsufficientDataError&) {
      // Methods without enough successful trials are simply absent from the
      // rate table.
    }
  }
  std::ostringstream rates_os;
  write_rates_csv(rates_os, fits);
  write_text_file(out.join("rates.csv"), rates_os.str());

  emit_sidecar(out, config.resolved().serialize());
  std::cout << "wrote " << out.join("trials.csv") << ", summary.csv, rates.csv\n";
  return 0;
}

int cmd_rates(const std::string& input, const OutDir& out) {
  const auto records = read_trials_csv_file(input);
  std::vector<std::string> methods;
  for (const auto& rec : records) {
    if (std::find(methods.begin(), methods.end(), rec.method) == methods.end()) {
      methods.push_back(rec.method);
    }
  }
  std::vector<std::pair<std::string, RateFit>> fits;
  for (const auto& method : methods) {
    try {
      fits.emplace_back(method, fit_rate(records, method));
    } catch (const InsufficientDataError&) {
    }
  }
  std::ostringstream os;
  write_rates_csv(os, fits);
  std::cout << os.str();
  if (out.enabled()) write_text_file(out.join("rates.csv"), os.str());
  return 0;
}

int cmd_lowerbound(scalar_t alpha, scalar_t beta, count_t n, bool audit_kl, const OutDir& out) {
  const LowerBoundFamily family = build_family(alpha, beta, n);
  const FanoReport fano = fano_bound(family, audit_kl);

  std::ostringstream family_os, fano_os;
  write_family_csv(family_os, family);
  write_fano_csv(fano_os, fano);
  std::cout << family_os.str() << fano_os.str();
  if (out.enabled()) {
    write_text_file(out.join("family.csv"), family_os.str());
    write_text_file(out.join("fano.csv"), fano_os.str());
    std::ostringstream sidecar;
    sidecar << "[lowerbound]\nalpha = " << fmt_g17(alpha) << "\nbeta = " << fmt_g17(beta)
            << "\nn = " << n << "\naudit_kl = " << (audit_kl ? 1 : 0) << "\n";
    emit_sidecar(out, sidecar.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail-index estimation for heavy-tailed samples: tail-event "
               "estimators, adaptive threshold selection, Monte Carlo sweeps, "
               "and identification lower bounds"};
  app.require_subcommand(1);

  std::string out_path;
  app.add_option("--out", out_path, "Output directory for CSV artifacts")->capture_default_str();

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate the tail index of a dataset file");
  std::string est_input, est_method = "tail-event";
  int est_k = 0;
  scalar_t est_r = 0.01, est_u = 0.0, est_v = 1.0, est_qu = 0.0, est_qv = 0.0;
  est->add_option("--input", est_input, "Dataset file (one value per line)")->required();
  est->add_option("--method", est_method,
                  "tail-event | hill | generalized | quantile-dual")->capture_default_str();
  est->add_option("--k", est_k, "Threshold index for tail-event");
  est->add_option("--r", est_r, "Order-statistics fraction for hill");
  est->add_option("--u", est_u, "Upper threshold for generalized");
  est->add_option("--v", est_v, "Lower threshold for generalized");
  est->add_option("--qu", est_qu, "Upper-tail probability for quantile-dual");
  est->add_option("--qv", est_qv, "Lower-tail probability for quantile-dual");

  // adaptive
  auto* ada = app.add_subcommand("adaptive", "Adaptive threshold selection and estimate");
  std::string ada_input, ada_trace;
  scalar_t ada_delta = 0.05;
  std::optional<scalar_t> ada_A;
  std::vector<scalar_t> ada_params;
  ada->add_option("--input", ada_input, "Dataset file")->required();
  ada->add_option("--delta", ada_delta, "Confidence parameter in (0, 1/4)")
      ->capture_default_str();
  ada->add_option("--A", ada_A, "Comparison constant");
  ada->add_option("--params", ada_params,
                  "alpha,beta,C,Cprime: derive A from the admissibility condition")
      ->delimiter(',')
      ->expected(4);
  ada->add_option("--trace", ada_trace, "Write the comparison trace CSV here");

  // oracle
  auto* ora = app.add_subcommand("oracle", "Estimate at the oracle threshold for known (alpha, beta)");
  std::string ora_input;
  scalar_t ora_alpha = 1.0, ora_beta = 1.0;
  ora->add_option("--input", ora_input, "Dataset file")->required();
  ora->add_option("--alpha", ora_alpha, "True tail index")->required();
  ora->add_option("--beta", ora_beta, "True second-order coefficient")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a seeded Monte Carlo sweep from a config file");
  std::string sim_config;
  std::optional<seed_t> sim_seed;
  sim->add_option("--config", sim_config, "Run configuration file")->required();
  sim->add_option("--seed", sim_seed, "Override base_seed from the config");

  // rates
  auto* rat = app.add_subcommand("rates", "Fit log-log convergence rates from a trials CSV");
  std::string rat_input;
  rat->add_option("--input", rat_input, "trials.csv produced by simulate")->required();

  // lowerbound
  auto* low = app.add_subcommand("lowerbound", "Build the identification lower-bound family");
  scalar_t low_alpha = 2.0, low_beta = 2.0;
  count_t low_n = 0;
  bool low_audit = false;
  low->add_option("--alpha", low_alpha, "Tail index of the base distribution")->required();
  low->add_option("--beta", low_beta, "Second-order coefficient, must be > 1")->required();
  low->add_option("--n", low_n, "Sample size the bound is computed for")->required();
  low->add_flag("--audit-kl", low_audit, "Use quadrature instead of closed-form KL bounds");

  CLI11_PARSE(app, argc, argv);

  const OutDir out{out_path};
  try {
    if (*est) return cmd_estimate(est_input, est_method, est_k, est_r, est_u, est_v, est_qu,
                                  est_qv, out);
    if (*ada) {
      std::optional<std::vector<scalar_t>> params;
      if (!ada_params.empty()) params = ada_params;
      return cmd_adaptive(ada_input, ada_delta, ada_A, params, ada_trace, out);
    }
    if (*ora) return cmd_oracle(ora_input, ora_alpha, ora_beta, out);
    if (*sim) {
      if (!out.enabled()) {
        std::cerr << "error: simulate requires --out <dir>\n";
        return kExitUsage;
      }
      return cmd_simulate(sim_config, sim_seed, out);
    }
    if (*rat) return cmd_rates(rat_input, out);
    if (*low) return cmd_lowerbound(low_alpha, low_beta, low_n, low_audit, out);
  } catch (const EstimationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitEstimation;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
