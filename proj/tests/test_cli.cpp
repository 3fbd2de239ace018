#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <string>

#include "rca/checks.hpp"
#include "rca/errors.hpp"
#include "rca/report.hpp"
#include "rca/scenario.hpp"

using namespace rca;

namespace {

const std::string kFixtures = RCA_FIXTURE_DIR;
const std::string kCli = RCA_CLI_PATH;

struct RunResult {
  int exitCode = -1;
  std::string out;
};

// Spawn the real binary; stderr is diagnostics only, so it is dropped.
RunResult runCli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>/dev/null";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, n);
  const int status = pclose(pipe);
  res.exitCode = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("command inventory") {
  const auto& names = commandNames();
  CHECK(names.size() == 11);
  CHECK(names.front() == "verify-axioms");
  CHECK(names.back() == "suite-all");
}

TEST_CASE("reports are deterministic and scheduling-independent") {
  const Scenario sc = loadScenario(kFixtures + "/full.json");
  const RunOptions opt;

  setenv("RCA_WORKERS", "1", 1);
  const std::string serial = toJson(runCommand("suite-all", sc, opt));
  setenv("RCA_WORKERS", "8", 1);
  const std::string parallel = toJson(runCommand("suite-all", sc, opt));
  unsetenv("RCA_WORKERS");
  const std::string again = toJson(runCommand("suite-all", sc, opt));

  CHECK(serial == parallel);
  CHECK(serial == again);
  CHECK(serial.find("\"rca-report/1\"") != std::string::npos);
}

TEST_CASE("records come back sorted by id") {
  const Scenario sc = loadScenario(kFixtures + "/full.json");
  const Report rep = runCommand("verify-axioms", sc, RunOptions{});
  REQUIRE(rep.records.size() > 1);
  for (std::size_t i = 1; i < rep.records.size(); ++i)
    CHECK(rep.records[i - 1].id <= rep.records[i].id);
}

TEST_CASE("seed override reaches the task contexts") {
  const Scenario sc = loadScenario(kFixtures + "/full.json");
  RunOptions opt;
  const Report base = runCommand("verify-axioms", sc, opt);
  opt.seed = 424242;
  const Report overridden = runCommand("verify-axioms", sc, opt);
  REQUIRE(base.records.size() == overridden.records.size());
  bool contextChanged = false;
  for (std::size_t i = 0; i < base.records.size(); ++i)
    if (base.records[i].context != overridden.records[i].context) contextChanged = true;
  CHECK(contextChanged);
}

TEST_CASE("commands with nothing to do refuse instead of passing silently") {
  const Scenario sc = loadScenario(kFixtures + "/minimal.json");
  CHECK_THROWS_WITH(runCommand("gauge", sc, RunOptions{}),
                    doctest::Contains("no applicable inputs"));
  CHECK_THROWS_WITH(runCommand("gexp", sc, RunOptions{}),
                    doctest::Contains("no applicable inputs"));
  CHECK_THROWS_WITH(runCommand("waltz", sc, RunOptions{}),
                    doctest::Contains("unknown command"));
  // The norm suite needs only the space, so verify-axioms still runs.
  const Report rep = runCommand("verify-axioms", sc, RunOptions{});
  CHECK(rep.allPass());
  CHECK(rep.records.size() >= 5);
}

TEST_CASE("csv serialization shape") {
  const Scenario sc = loadScenario(kFixtures + "/minimal.json");
  const std::string csv = toCsv(runCommand("verify-axioms", sc, RunOptions{}));
  CHECK(csv.rfind("atom,block,lhs,rhs,gap\n", 0) == 0);
  CHECK(csv.find("# rnm/definiteness | Def 2.1 | PASS") != std::string::npos);
}

TEST_CASE("binary: exit codes over the fixture set") {
  CHECK(runCli("verify-axioms --scenario " + kFixtures + "/minimal.json").exitCode == 0);
  CHECK(runCli("suite-all --scenario " + kFixtures + "/full.json").exitCode == 0);

  // Check failures exit 1 and the report carries the red record.
  const RunResult broken = runCli("verify-axioms --scenario " + kFixtures + "/broken_risk.json");
  CHECK(broken.exitCode == 1);
  CHECK(broken.out.find("\"pass\": false") != std::string::npos);
  CHECK(broken.out.find("neg_sq_cond_expect") != std::string::npos);

  CHECK(runCli("extend --scenario " + kFixtures + "/nonlocal_oracle.json").exitCode == 1);
  CHECK(runCli("gexp --scenario " + kFixtures + "/concave_driver.json").exitCode == 1);

  // Input problems exit 2, budget exhaustion exits 3.
  CHECK(runCli("verify-axioms --scenario " + kFixtures + "/absent.json").exitCode == 2);
  CHECK(runCli("verify-axioms --scenario " + kFixtures + "/minimal.json --tol -1").exitCode == 2);
  CHECK(runCli("gauge --scenario " + kFixtures + "/minimal.json").exitCode == 2);
  CHECK(runCli("biconjugate --scenario " + kFixtures + "/closed_tiny.json --budget 10")
            .exitCode == 3);
}

TEST_CASE("binary: format flag switches the body") {
  const RunResult json = runCli("verify-axioms --scenario " + kFixtures + "/minimal.json");
  CHECK(json.out.find("\"schema\": \"rca-report/1\"") != std::string::npos);
  const RunResult csv =
      runCli("verify-axioms --scenario " + kFixtures + "/minimal.json --format csv");
  CHECK(csv.out.rfind("atom,block,lhs,rhs,gap\n", 0) == 0);
}

}  // TEST_SUITE
