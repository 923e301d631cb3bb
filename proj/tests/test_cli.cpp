#include "tailest/dist_models.hpp"
#include "tailest/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace tailest;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

// Runs the CLI with the given arguments, capturing both streams.
RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_file = dir / "stdout.txt";
  const fs::path err_file = dir / "stderr.txt";
  const std::string cmd = std::string(TAILEST_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = read_text_file(out_file.string());
  result.err = read_text_file(err_file.string());
  return result;
}

fs::path make_workdir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("tailest_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("estimate: tail-event on a known file") {
  const auto dir = make_workdir("estimate");
  Dataset data;
  data.external = true;
  data.values.resize(4);
  data.values << std::exp(0.5), std::exp(1.5), std::exp(2.5), std::exp(3.5);
  write_dataset_file((dir / "data.txt").string(), data);

  const auto res =
      run_cli("estimate --input " + (dir / "data.txt").string() + " --method tail-event --k 1",
              dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("tail_event,k=1,0.4054651081") != std::string::npos);
}

TEST_CASE("estimate: missing file names the path and exits nonzero") {
  const auto dir = make_workdir("missing");
  const auto res = run_cli("estimate --input " + (dir / "nope.txt").string() + " --k 0", dir);
  CHECK(res.exit_code != 0);
  CHECK(res.err.find("nope.txt") != std::string::npos);
}

TEST_CASE("estimate: negative value reports the line number") {
  const auto dir = make_workdir("badvalue");
  write_text_file((dir / "data.txt").string(), "2.5\n3.5\n-1\n4.5\n");
  const auto res = run_cli("estimate --input " + (dir / "data.txt").string() + " --k 0", dir);
  CHECK(res.exit_code != 0);
  CHECK(res.err.find("line 3") != std::string::npos);
}

TEST_CASE("estimate: estimator failures exit with the error name") {
  const auto dir = make_workdir("emptytail");
  write_text_file((dir / "data.txt").string(), "1.5\n2.0\n2.5\n3.0\n");
  const auto res = run_cli("estimate --input " + (dir / "data.txt").string() + " --k 9", dir);
  CHECK(res.exit_code == 3);
  CHECK(res.err.find("EmptyTail") != std::string::npos);
}

TEST_CASE("adaptive and oracle subcommands run end to end") {
  const auto dir = make_workdir("adaptive");
  const auto model = DistributionModel::exact_pareto(1.0, 1.0);
  write_dataset_file((dir / "data.txt").string(), sample(model, 5000, 31));

  const auto ada = run_cli("adaptive --input " + (dir / "data.txt").string() +
                               " --delta 0.05 --A 2.0 --trace " + (dir / "trace.csv").string(),
                           dir);
  CHECK(ada.exit_code == 0);
  CHECK(ada.out.find("adaptive,k=") != std::string::npos);
  CHECK(fs::exists(dir / "trace.csv"));
  CHECK(read_text_file((dir / "trace.csv").string()).find("k,k_prime,") == 0);

  const auto ora = run_cli(
      "oracle --input " + (dir / "data.txt").string() + " --alpha 1 --beta 1", dir);
  CHECK(ora.exit_code == 0);
  CHECK(ora.out.find("oracle_tail_event,k=") != std::string::npos);

  // A derived from class constants instead of given directly
  const auto ada2 = run_cli("adaptive --input " + (dir / "data.txt").string() +
                                " --delta 0.05 --params 1,1,1,0.5",
                            dir);
  CHECK(ada2.exit_code == 0);
}

TEST_CASE("simulate: writes CSVs plus sidecar, reruns byte-identically, validates config") {
  const auto dir = make_workdir("simulate");
  const std::string config =
      "[experiment]\nbase_seed = 11\ntrials = 2\nn_grid = 200, 400\n\n"
      "[model]\nkind = pareto\nalpha = 1\nC = 1\n\n"
      "[truth]\nalpha = 1\nbeta = 1\nC = 1\nCprime = 0.5\n\n"
      "[method]\nkind = oracle\n";
  write_text_file((dir / "run.cfg").string(), config);

  const auto out1 = dir / "out1";
  const auto out2 = dir / "out2";
  const auto res1 = run_cli("--out " + out1.string() + " simulate --config " +
                                (dir / "run.cfg").string(),
                            dir);
  REQUIRE(res1.exit_code == 0);
  for (const char* name : {"trials.csv", "summary.csv", "rates.csv", "resolved_config.txt"}) {
    CHECK(fs::exists(out1 / name));
  }
  const auto res2 = run_cli("--out " + out2.string() + " simulate --config " +
                                (dir / "run.cfg").string(),
                            dir);
  REQUIRE(res2.exit_code == 0);
  CHECK(read_text_file((out1 / "trials.csv").string()) ==
        read_text_file((out2 / "trials.csv").string()));

  // a run is reproducible from the sidecar alone
  const auto out3 = dir / "out3";
  const auto res3 = run_cli("--out " + out3.string() + " simulate --config " +
                                (out1 / "resolved_config.txt").string(),
                            dir);
  REQUIRE(res3.exit_code == 0);
  CHECK(read_text_file((out1 / "trials.csv").string()) ==
        read_text_file((out3 / "trials.csv").string()));

  // validation failures happen before any compute.
  write_text_file((dir / "bad.cfg").string(),
                  std::string(config).replace(config.find("trials = 2"), 10, "trials = 0"));
  const auto bad = run_cli("--out " + (dir / "outbad").string() + " simulate --config " +
                               (dir / "bad.cfg").string(),
                           dir);
  CHECK(bad.exit_code != 0);
  CHECK_FALSE(fs::exists(dir / "outbad" / "trials.csv"));
}

TEST_CASE("rates: refits from a trials CSV") {
  const auto dir = make_workdir("rates");
  const std::string config =
      "[experiment]\nbase_seed = 5\ntrials = 40\nn_grid = 500, 1000, 2000\n\n"
      "[model]\nkind = pareto\nalpha = 1\nC = 1\n\n"
      "[truth]\nalpha = 1\nbeta = 1\nC = 1\nCprime = 0.5\n\n"
      "[method]\nkind = fixed_k\nk = 1\n";
  write_text_file((dir / "run.cfg").string(), config);
  const auto out = dir / "out";
  REQUIRE(run_cli("--out " + out.string() + " simulate --config " + (dir / "run.cfg").string(),
                  dir)
              .exit_code == 0);
  const auto res = run_cli("rates --input " + (out / "trials.csv").string(), dir);
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("method,slope,intercept,r_squared") == 0);
  CHECK(res.out.find("fixed_k1,") != std::string::npos);
}

TEST_CASE("lowerbound: family and bound on success, named condition on failure") {
  const auto dir = make_workdir("lowerbound");
  const auto out = dir / "out";
  const auto res = run_cli(
      "--out " + out.string() + " lowerbound --alpha 2 --beta 2 --n 100000000", dir);
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("i,beta_i,gamma_i,K_i,t_i,alpha_i") != std::string::npos);
  CHECK(res.out.find("M,upsilon,avg_kl_term,fano_lower_bound") != std::string::npos);
  CHECK(fs::exists(out / "family.csv"));
  CHECK(fs::exists(out / "fano.csv"));
  // the bound itself clears 1/4
  const std::string fano = read_text_file((out / "fano.csv").string());
  const auto last_comma = fano.rfind(',');
  CHECK(std::stod(fano.substr(last_comma + 1)) >= 0.25);

  const auto too_small = run_cli("lowerbound --alpha 2 --beta 2 --n 10", dir);
  CHECK(too_small.exit_code == 3);
  CHECK(too_small.err.find("TooSmallN") != std::string::npos);

  const auto bad_beta = run_cli("lowerbound --alpha 2 --beta 1 --n 100000000", dir);
  CHECK(bad_beta.exit_code == 2);
}

TEST_CASE("input files are never mutated") {
  const auto dir = make_workdir("immutability");
  Dataset data;
  data.external = true;
  data.values.resize(4);
  data.values << 2.0, 4.0, 8.0, 16.0;
  write_dataset_file((dir / "data.txt").string(), data);
  const std::string before = read_text_file((dir / "data.txt").string());
  run_cli("estimate --input " + (dir / "data.txt").string() + " --method hill --r 0.5", dir);
  run_cli("adaptive --input " + (dir / "data.txt").string() + " --delta 0.05 --A 2", dir);
  CHECK(read_text_file((dir / "data.txt").string()) == before);
}
