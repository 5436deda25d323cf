#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gravicut/harness.hpp"
#include "gravicut/validate.hpp"

using namespace gravicut;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("gravicut_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// drop the wall_ms column (the one nondeterministic field)
std::string strip_wall_ms(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.rfind(',');
    out << line.substr(0, pos) << '\n';
  }
  return out.str();
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.budgets = {300};  // below the activation threshold: instant runs
  cfg.seeds = {0, 1, 2};
  cfg.out_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("median and iqr helpers") {
  CHECK(median_of({1.0, 3.0, 2.0}) == 2.0);
  CHECK(median_of({1.0, 2.0, 3.0, 4.0}) == 2.5);
  CHECK(iqr_of({1.0, 2.0, 3.0, 4.0, 5.0}) == 2.0);
}

TEST_CASE("config file parsing with overrides and errors") {
  fs::path dir = temp_dir("cfg");
  fs::path file = dir / "exp.cfg";
  {
    std::ofstream out(file);
    out << "# comment\n"
        << "objective = quadratic\n"
        << "noise=bernoulli\n"
        << "dim=2,3\n"
        << "budget = 1000, 2000\n"
        << "seeds=4\n"
        << "delta=0.05\n";
  }
  ExperimentConfig cfg;
  CHECK(load_config_file(file.string(), cfg).empty());
  CHECK(cfg.dims == std::vector<int>{2, 3});
  CHECK(cfg.budgets == std::vector<long>{1000, 2000});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{0, 1, 2, 3});  // count expands
  CHECK(cfg.delta == 0.05);

  {
    std::ofstream out(file);
    out << "nonsense_key=1\n";
  }
  ExperimentConfig cfg2;
  CHECK_FALSE(load_config_file(file.string(), cfg2).empty());

  {
    std::ofstream out(file);
    out << "seeds=1,2,3\n";
  }
  ExperimentConfig cfg3;
  CHECK(load_config_file(file.string(), cfg3).empty());
  CHECK(cfg3.seeds == std::vector<std::uint64_t>{1, 2, 3});  // list stays a list
}

TEST_CASE("config validation rejects structural problems") {
  ExperimentConfig cfg;
  CHECK(validate_config(cfg).empty());
  cfg.seeds = {};
  CHECK_FALSE(validate_config(cfg).empty());
  cfg.seeds = {1, 1};
  CHECK_FALSE(validate_config(cfg).empty());
  cfg = ExperimentConfig{};
  cfg.noise = "gaussian";
  CHECK_FALSE(validate_config(cfg).empty());
  cfg = ExperimentConfig{};
  cfg.budgets = {0};
  CHECK_FALSE(validate_config(cfg).empty());
}

TEST_CASE("default problems are valid across dimensions") {
  ExperimentConfig cfg;
  for (int d : {1, 2, 3, 5, 10}) {
    ProblemSpec s = make_default_problem(cfg, d);
    CHECK(s.interior_minimizer);
    CHECK(s.inner_radius > 0.0);
    CHECK(*s.evaluate(s.minimizer) == doctest::Approx(s.min_value));
  }
  cfg.objective = "max_affine";
  ProblemSpec m = make_default_problem(cfg, 3);
  CHECK(m.interior_minimizer);
}

TEST_CASE("cmd_run writes one row per (dim, budget, seed)") {
  fs::path dir = temp_dir("run");
  ExperimentConfig cfg = tiny_config(dir / "out");
  CHECK(cmd_run(cfg) == 0);
  std::string csv = slurp(dir / "out" / "runs.csv");
  std::stringstream ss(csv);
  std::string line;
  int lines = 0;
  while (std::getline(ss, line)) {
    if (lines > 0) {
      // ledger conservation surfaces in every row: q_init+q_fcp+q_grad <= budget
      std::stringstream row(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(row, field, ',')) fields.push_back(field);
      REQUIRE(fields.size() == 10);
      long budget = std::stol(fields[1]);
      long q = std::stol(fields[5]) + std::stol(fields[6]) + std::stol(fields[7]);
      CHECK(q <= budget);
    }
    ++lines;
  }
  CHECK(lines == 4);  // header + 3 runs
  CHECK(csv.rfind("dim,budget,seed,regret,iterations,q_init,q_fcp,q_grad,"
                  "anomalies,wall_ms\n", 0) == 0);
}

TEST_CASE("identical configs give identical bytes modulo wall_ms") {
  fs::path dir = temp_dir("det");
  ExperimentConfig a = tiny_config(dir / "a");
  ExperimentConfig b = tiny_config(dir / "b");
  CHECK(cmd_run(a) == 0);
  CHECK(cmd_run(b) == 0);
  CHECK(strip_wall_ms(slurp(dir / "a" / "runs.csv")) ==
        strip_wall_ms(slurp(dir / "b" / "runs.csv")));
}

TEST_CASE("worker pool does not change results") {
  ExperimentConfig cfg;
  cfg.budgets = {300, 600};
  cfg.seeds = {0, 1, 2, 3};
  setenv("GRAVICUT_THREADS", "1", 1);
  std::vector<RunReport> serial = run_experiments(cfg);
  setenv("GRAVICUT_THREADS", "4", 1);
  std::vector<RunReport> parallel = run_experiments(cfg);
  unsetenv("GRAVICUT_THREADS");
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].simple_regret == parallel[i].simple_regret);
    CHECK(serial[i].seed == parallel[i].seed);
  }
}

TEST_CASE("cmd_sweep writes summary rows and a well-formed SVG") {
  fs::path dir = temp_dir("sweep");
  ExperimentConfig cfg = tiny_config(dir / "out");
  cfg.budgets = {300, 600, 900};
  CHECK(cmd_sweep(cfg) == 0);

  std::string summary = slurp(dir / "out" / "summary.csv");
  std::stringstream ss(summary);
  std::string line;
  int lines = 0;
  while (std::getline(ss, line)) ++lines;
  CHECK(lines == 4);  // header + 3 budgets
  CHECK(summary.rfind("dim,budget,median_regret,iqr\n", 0) == 0);

  std::string svg = slurp(dir / "out" / "regret_vs_budget.svg");
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  // well-formedness: every '<' closes, quotes are balanced
  long depth = 0, quotes = 0;
  for (std::size_t i = 0; i < svg.size(); ++i) {
    if (svg[i] == '<') ++depth;
    if (svg[i] == '>') --depth;
    if (svg[i] == '"') ++quotes;
    CHECK(depth >= 0);
    CHECK(depth <= 1);
  }
  CHECK(depth == 0);
  CHECK(quotes % 2 == 0);
}

TEST_CASE("unwritable output directory fails with exit code 2") {
  fs::path dir = temp_dir("blocked");
  fs::path blocker = dir / "blocker";
  std::ofstream(blocker) << "あ";  // a regular file where a directory is needed
  ExperimentConfig cfg = tiny_config(blocker / "out");
  CHECK(cmd_run(cfg) == 2);
  CHECK_FALSE(fs::exists(blocker / "out" / "runs.csv"));
}

TEST_CASE("estimator-only objective is a config error for run") {
  fs::path dir = temp_dir("lin");
  ExperimentConfig cfg = tiny_config(dir / "out");
  cfg.objective = "linear";
  CHECK(cmd_run(cfg) == 2);
}

TEST_CASE("validation suite selector") {
  std::vector<PropertyResult> res = run_validation_suite("fcp", 1.0, 77);
  REQUIRE(res.size() == 1);
  CHECK(res[0].pass);
  CHECK_THROWS_AS(run_validation_suite("bogus", 1.0, 77), std::invalid_argument);
}

TEST_CASE("trace file is written when tracing is enabled") {
  fs::path dir = temp_dir("trace");
  ExperimentConfig cfg = tiny_config(dir / "out");
  cfg.trace = true;
  CHECK(cmd_run(cfg) == 0);
  CHECK(fs::exists(dir / "out" / "trace.txt"));  // degraded runs: file, no rows
}

TEST_CASE("a non-degraded traced run records per-round search records") {
  fs::path dir = temp_dir("trace_full");
  ExperimentConfig cfg;
  cfg.noise = "noiseless";
  cfg.budgets = {1'000'000};
  cfg.seeds = {0};
  cfg.trace = true;
  cfg.out_dir = (dir / "out").string();
  CHECK(cmd_run(cfg) == 0);
  std::string trace = slurp(dir / "out" / "trace.txt");
  CHECK(trace.find("fcp_call=1 round=0") != std::string::npos);
  CHECK(trace.find("g_hat=") != std::string::npos);
  CHECK(trace.find("passing=") != std::string::npos);
}
