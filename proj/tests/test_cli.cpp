#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(GIBBSLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0)
    result.output.append(buf, got);
  result.exit_code = WEXITSTATUS(pclose(pipe));
  return result;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/gibbslab_test_") + name;
}

}  // namespace

TEST_CASE("critical reports the known transition") {
  const RunResult res = run("critical --q 3 --r 2");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(std::abs(j["beta_c"].get<double>() - 4.0 * std::log(2.0)) < 1e-6);
  CHECK(j["order"] == "first");
  CHECK(j["config"]["q"] == 3);

  const RunResult second = run("critical --q 2 --r 2");
  const json j2 = json::parse(second.output);
  CHECK(j2["order"] == "second");
  CHECK(std::abs(j2["gap"].get<double>()) < 1e-6);

  const RunResult r5 = run("critical --q 2 --r 5");
  CHECK(json::parse(r5.output)["order"] == "first");
}

TEST_CASE("stochastic subcommands demand a seed and re-run byte-identically") {
  const RunResult missing = run("couple --q 3 --r 2 --beta 1.0 --n 30");
  CHECK(missing.exit_code != 0);

  const std::string prefix = tmp_path("couple");
  const std::string args = "couple --q 3 --r 2 --beta 1.0 --n 60 --trials 24 "
                           "--seed 7 --horizon 100 --out " + prefix;
  const RunResult first = run(args);
  REQUIRE(first.exit_code == 0);
  const std::string times1 = slurp(prefix + ".times.csv");
  const std::string dist1 = slurp(prefix + ".distance.csv");
  const std::string summary1 = slurp(prefix + ".summary.json");

  const RunResult second = run(args);
  REQUIRE(second.exit_code == 0);
  CHECK(slurp(prefix + ".times.csv") == times1);
  CHECK(slurp(prefix + ".distance.csv") == dist1);
  CHECK(slurp(prefix + ".summary.json") == summary1);
  CHECK(first.output == second.output);

  const json summary = json::parse(summary1);
  for (const char* key :
       {"median", "q90", "censored_fraction", "n", "beta", "q", "r", "seed"})
    CHECK(summary.contains(key));
}

TEST_CASE("emitted config JSON reproduces the run") {
  const RunResult direct =
      run("couple --q 3 --r 2 --beta 1.2 --n 40 --trials 16 --seed 21");
  REQUIRE(direct.exit_code == 0);
  const json summary = json::parse(direct.output);

  const std::string cfg_path = tmp_path("couple_config.json");
  {
    std::ofstream out(cfg_path, std::ios::binary);
    out << summary["config"].dump();
  }
  const RunResult replay = run("couple --config " + cfg_path);
  REQUIRE(replay.exit_code == 0);
  CHECK(replay.output == direct.output);

  // flags take precedence over the config file
  const RunResult override_run =
      run("couple --config " + cfg_path + " --seed 22");
  REQUIRE(override_run.exit_code == 0);
  CHECK(json::parse(override_run.output)["config"]["seed"] == 22);
}

TEST_CASE("simulate emits the documented trajectory format") {
  const RunResult res =
      run("simulate --q 3 --r 2 --beta 1.0 --n 12 --steps 20 --seed 5");
  REQUIRE(res.exit_code == 0);
  std::stringstream ss(res.output);
  std::string line;
  REQUIRE(std::getline(ss, line));
  CHECK(line.rfind("# {", 0) == 0);  // embedded config comment
  REQUIRE(std::getline(ss, line));
  CHECK(line == "t,count_1,count_2,count_3");
  int rows = 0;
  long long t, c1, c2, c3;
  while (std::getline(ss, line)) {
    REQUIRE(std::sscanf(line.c_str(), "%lld,%lld,%lld,%lld", &t, &c1, &c2, &c3) == 4);
    CHECK(c1 + c2 + c3 == 12);
    ++rows;
  }
  CHECK(rows == 21);  // t = 0..20
  CHECK(res.output.find('\r') == std::string::npos);  // LF endings only
}

TEST_CASE("mixing-exact reports curves and summary") {
  const std::string prefix = tmp_path("mixing");
  const RunResult res = run("mixing-exact --q 3 --r 2 --beta 1.0 --n 8:12:4 "
                            "--eps 0.25 --out " + prefix);
  REQUIRE(res.exit_code == 0);
  const json summary = json::parse(res.output);
  REQUIRE(summary["results"].size() == 2);
  CHECK(summary["results"][0]["n"] == 8);
  CHECK(summary["results"][1]["n"] == 12);
  CHECK(summary["results"][0]["t_mix"].get<long long>() > 0);

  const std::string curve = slurp(prefix + ".n8.csv");
  std::stringstream ss(curve);
  std::string line;
  std::getline(ss, line);
  CHECK(line.rfind("# {", 0) == 0);
  std::getline(ss, line);
  CHECK(line == "t,d_tv");
}

TEST_CASE("check bundles the three condition reports") {
  const RunResult res = run("check --q 3 --r 2 --beta 1.0 --grid 60");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.output);
  REQUIRE(j["reports"].size() == 3);
  CHECK(j["reports"][0]["condition"] == "contraction");
  CHECK(j["reports"][1]["condition"] == "riemann");
  CHECK(j["reports"][2]["condition"] == "local");
  for (const auto& report : j["reports"]) CHECK(report["holds"] == true);
  CHECK(j["all_hold"] == true);
  CHECK(std::abs(j["reports"][2]["analytic"].get<double>() - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("phase-diagram sweeps r") {
  const RunResult res = run("phase-diagram --q 3 --r 2:3:0.5 --format csv");
  REQUIRE(res.exit_code == 0);
  std::stringstream ss(res.output);
  std::string line;
  std::getline(ss, line);  // config comment
  std::getline(ss, line);
  CHECK(line == "q,r,beta_c,beta_s,gap,ratio,order");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("simulate re-runs byte-identically") {
  const std::string args =
      "simulate --q 3 --r 2 --beta 1.3 --n 50 --steps 200 --stride 10 --seed 9";
  const RunResult a = run(args);
  const RunResult b = run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.output == b.output);
}

TEST_CASE("mixing-exact sweeps n with a monotone mixing-time series") {
  const RunResult res =
      run("mixing-exact --q 3 --r 2 --beta 1.0 --n 10:40:10 --eps 0.25");
  REQUIRE(res.exit_code == 0);
  const json summary = json::parse(res.output);
  REQUIRE(summary["results"].size() == 4);
  long long prev = 0;
  double lo = 1e300, hi = 0.0;
  for (const auto& row : summary["results"]) {
    const long long t = row["t_mix"].get<long long>();
    CHECK(t > prev);
    prev = t;
    const double scaled = row["t_mix_over_nlogn"].get<double>();
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 2.0);  // near-linear in n log n
}

TEST_CASE("check flags the contraction failure between beta_s and beta_c") {
  // midpoint of (beta_s, beta_c) at (q, r) = (3, 2)
  const RunResult res = run("check --q 3 --r 2 --beta 2.7591 --grid 200");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j["all_hold"] == false);
  CHECK(j["reports"][0]["condition"] == "contraction");
  CHECK(j["reports"][0]["holds"] == false);
  CHECK(j["reports"][0]["sup_ratio"].get<double>() >= 1.0);
  // the local condition still holds there: beta (r-1)/q^(r-1) < 1
  CHECK(j["reports"][2]["holds"] == true);
}
