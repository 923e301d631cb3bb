#include "tailest/config.hpp"
#include "tailest/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>

using namespace tailest;

namespace {

const char* kMinimalConfig = R"(
# one model, one n, one trial
[experiment]
base_seed = 42
trials = 1
n_grid = 500

[model]
kind = pareto
alpha = 1
C = 1

[truth]
alpha = 1
beta = 1
C = 1
Cprime = 0.5

[method]
kind = oracle
)";

}  // namespace

TEST_CASE("g17 formatting round-trips doubles exactly") {
  for (const double v : {1.0 / 3.0, 1e-300, 12345.678901234567, std::exp(1.0), 0.1}) {
    const std::string s = fmt_g17(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(fmt_g17(std::nan("")) == "nan");
}

TEST_CASE("dataset files round-trip values and provenance") {
  const auto model = DistributionModel::piecewise_lb(1.0, 0.5, 2.0);
  const auto data = sample(model, 100, 4242);

  std::ostringstream os;
  write_dataset(os, data);
  std::istringstream is(os.str());
  const auto back = read_dataset(is);

  CHECK_FALSE(back.external);
  CHECK(back.seed == 4242);
  CHECK(back.model == model.canonical());
  REQUIRE(back.n() == data.n());
  for (index_t i = 0; i < data.n(); ++i) CHECK(back.values[i] == data.values[i]);
}

TEST_CASE("dataset parsing reports offending lines") {
  {
    std::istringstream is("2.5\n-1.0\n3.5\n");
    CHECK_THROWS_WITH_AS(read_dataset(is, "bad.txt"),
                         doctest::Contains("bad.txt: line 2"), std::runtime_error);
  }
  {
    std::istringstream is("2.5\nnot_a_number\n");
    CHECK_THROWS_WITH_AS(read_dataset(is, "bad.txt"),
                         doctest::Contains("line 2"), std::runtime_error);
  }
  {
    std::istringstream is("# seed=external model=unknown\n\n");
    CHECK_THROWS_AS(read_dataset(is, "empty.txt"), std::runtime_error);
  }
}

TEST_CASE("trials CSV round-trips") {
  ExperimentConfig config;
  config.model = DistributionModel::exact_pareto(1.0, 1.0);
  config.truth = {1.0, 1.0, 1.0, 0.5};
  config.n_grid = {100, 200};
  config.trials = 3;
  config.base_seed = 9;
  MethodSpec oracle;
  oracle.kind = MethodSpec::Kind::OracleK;
  MethodSpec hopeless;
  hopeless.kind = MethodSpec::Kind::FixedK;
  hopeless.k = 40;
  config.methods = {oracle, hopeless};

  const auto records = run_experiment(config);
  std::ostringstream os;
  write_trials_csv(os, records);
  std::istringstream is(os.str());
  const auto back = read_trials_csv(is);
  REQUIRE(back.size() == records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].n == records[i].n);
    CHECK(back[i].trial == records[i].trial);
    CHECK(back[i].seed == records[i].seed);
    CHECK(back[i].method == records[i].method);
    CHECK(back[i].failed == records[i].failed);
    if (!records[i].failed) {
      CHECK(back[i].alpha_hat == records[i].alpha_hat);
      CHECK(back[i].abs_error == records[i].abs_error);
    }
  }
}

TEST_CASE("config grammar: sections, comments, and failure modes") {
  const auto file = ConfigFile::parse("[a]\nx = 1 # trailing comment\n\n[b]\ny = two\n");
  REQUIRE(file.sections.size() == 2);
  CHECK(file.sections[0].name == "a");
  CHECK(*file.sections[0].find("x") == "1");
  CHECK(*file.sections[1].find("y") == "two");
  CHECK(file.sections[1].find("missing") == nullptr);

  CHECK_THROWS_AS(ConfigFile::parse("x = 1\n"), std::invalid_argument);      // key before section
  CHECK_THROWS_AS(ConfigFile::parse("[a\nx = 1\n"), std::invalid_argument);  // bad header
  CHECK_THROWS_AS(ConfigFile::parse("[a]\njust text\n"), std::invalid_argument);
}

TEST_CASE("run config: minimal file validates and resolves") {
  const auto run = RunConfig::from_config(ConfigFile::parse(kMinimalConfig));
  CHECK(run.experiment.base_seed == 42);
  CHECK(run.experiment.trials == 1);
  REQUIRE(run.experiment.n_grid.size() == 1);
  CHECK(run.experiment.n_grid[0] == 500);
  REQUIRE(run.experiment.methods.size() == 1);
  CHECK(run.experiment.methods[0].kind == MethodSpec::Kind::OracleK);

  // resolving and reparsing reproduces the same resolved text
  const std::string resolved = run.resolved().serialize();
  const auto again = RunConfig::from_config(ConfigFile::parse(resolved));
  CHECK(again.resolved().serialize() == resolved);
}

TEST_CASE("run config: base_seed is mandatory") {
  std::string text(kMinimalConfig);
  const auto pos = text.find("base_seed = 42\n");
  text.erase(pos, std::string("base_seed = 42\n").size());
  CHECK_THROWS_WITH_AS(RunConfig::from_config(ConfigFile::parse(text)),
                       doctest::Contains("base_seed"), std::invalid_argument);
  // but an explicit override substitutes for it
  const auto run = RunConfig::from_config(ConfigFile::parse(text), seed_t{7});
  CHECK(run.experiment.base_seed == 7);
}

TEST_CASE("run config: invariants are checked before any compute") {
  {
    std::string text(kMinimalConfig);
    const auto pos = text.find("trials = 1");
    text.replace(pos, std::string("trials = 1").size(), "trials = 0");
    CHECK_THROWS_AS(RunConfig::from_config(ConfigFile::parse(text)), std::invalid_argument);
  }
  {
    std::string text(kMinimalConfig);
    const auto pos = text.find("alpha = 1\nC = 1");
    text.replace(pos, std::string("alpha = 1\nC = 1").size(), "alpha = -1\nC = 1");
    CHECK_THROWS_AS(RunConfig::from_config(ConfigFile::parse(text)), std::invalid_argument);
  }
}

TEST_CASE("run config: adaptive method resolves A = auto from the truth section") {
  std::string text(kMinimalConfig);
  text += "\n[method]\nkind = adaptive\ndelta = 0.05\nA = auto\n";
  const auto run = RunConfig::from_config(ConfigFile::parse(text));
  REQUIRE(run.experiment.methods.size() == 2);
  const auto& adaptive = run.experiment.methods[1].adaptive;
  CHECK(adaptive.A ==
        doctest::Approx(threshold_A(0.05, run.experiment.truth)).epsilon(1e-12));
}

TEST_CASE("estimate report CSV row shape") {
  const auto model = DistributionModel::exact_pareto(1.0, 1.0);
  const auto data = sample(model, 100, 5);
  const auto rep = alpha_hat_k(data, 0);
  const std::string row = report_csv_row(rep);
  CHECK(row.find("tail_event,k=0,") == 0);
  CHECK(row.find(",100,5,") != std::string::npos);
  CHECK(row.find("p_k1=") != std::string::npos);
}
