// End-to-end checks that drive the installed binary through a shell.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "torsim/results_io.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out_file =
      fs::temp_directory_path() / ("torsim_cli_" + std::to_string(++counter) + ".txt");
  const std::string cmd =
      std::string(TORSIM_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  fs::remove(out_file);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("cli: scenarios listing") {
  const auto r = run_cli("scenarios");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("250000") != std::string::npos);
  CHECK(r.output.find("50000") != std::string::npos);
}

TEST_CASE("cli: run produces a valid results file and sane summary") {
  const auto out = temp_file("torsim_e2e_results.json");
  const auto r = run_cli("run --scenario 1,2 --strategy random,geo_latency "
                         "--seed 7 --scale 0.02 --out " +
                         out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("ranking") != std::string::npos);
  const auto parsed = torsim::load_results_file(out.string());
  CHECK(parsed.seed == 7);
  CHECK(parsed.cells.size() == 4);
  CHECK(parsed.ranking.front().first == "geo_latency");
  fs::remove(out);
}

TEST_CASE("cli: full default matrix at desk scale ranks geo_latency first") {
  const auto out = temp_file("torsim_e2e_full.json");
  const auto r = run_cli("run --scale 0.02 --seed 42 --out " + out.string());
  CHECK(r.exit_code == 0);
  const auto parsed = torsim::load_results_file(out.string());
  CHECK(parsed.cells.size() == 25);
  REQUIRE_FALSE(parsed.ranking.empty());
  CHECK(parsed.ranking.front().first == "geo_latency");
  CHECK(r.output.find("1. geo_latency") != std::string::npos);
  for (const auto& cell : parsed.cells) CHECK(cell.metrics.success_rate == 1.0);
  fs::remove(out);
}

TEST_CASE("cli: invalid names are usage errors naming the offender") {
  SUBCASE("strategy") {
    const auto r = run_cli("run --strategy nosuch --scale 0.02");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("nosuch") != std::string::npos);
  }
  SUBCASE("scenario") {
    const auto r = run_cli("run --scenario 9 --scale 0.02");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("9") != std::string::npos);
  }
  SUBCASE("scale") {
    const auto r = run_cli("run --scale 2.0");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("scale") != std::string::npos);
  }
  SUBCASE("missing subcommand") {
    const auto r = run_cli("");
    CHECK(r.exit_code == 1);
  }
}

TEST_CASE("cli: determinism of the results file net of timestamp") {
  const auto out1 = temp_file("torsim_e2e_det1.json");
  const auto out2 = temp_file("torsim_e2e_det2.json");
  const std::string flags = "run --scenario 1 --strategy all --seed 11 --scale 0.02";
  CHECK(run_cli(flags + " --out " + out1.string()).exit_code == 0);
  CHECK(run_cli(flags + " --out " + out2.string()).exit_code == 0);
  CHECK(torsim::without_timestamp(slurp(out1)) ==
        torsim::without_timestamp(slurp(out2)));
  fs::remove(out1);
  fs::remove(out2);
}

TEST_CASE("cli: circuit sidecar logs") {
  const auto out = temp_file("torsim_e2e_log.json");
  SUBCASE("jsonl") {
    const auto r = run_cli("run --scenario 1 --strategy random --seed 3 "
                           "--scale 0.02 --log-circuits --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto log = temp_file("torsim_e2e_log.circuits.jsonl");
    const std::string text = slurp(log);
    std::size_t rows = 0;
    for (char ch : text)
      if (ch == '\n') ++rows;
    CHECK(rows == 100);  // scenario 1 at scale 0.02 floors at 100 circuits
    fs::remove(log);
  }
  SUBCASE("csv") {
    const auto r = run_cli("run --scenario 1 --strategy random --seed 3 "
                           "--scale 0.02 --log-circuits --log-format csv --out " +
                           out.string());
    CHECK(r.exit_code == 0);
    const auto log = temp_file("torsim_e2e_log.circuits.csv");
    const std::string text = slurp(log);
    CHECK(text.rfind("scenario_id,strategy,", 0) == 0);
    fs::remove(log);
  }
  fs::remove(out);
}

TEST_CASE("cli: report summary and csv from a results file") {
  const auto out = temp_file("torsim_e2e_report.json");
  REQUIRE(run_cli("run --scenario 1,3 --strategy all --seed 5 --scale 0.02 --out " +
                  out.string())
              .exit_code == 0);
  SUBCASE("summary table") {
    const auto r = run_cli("report " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("strategy") != std::string::npos);
    CHECK(r.output.find("geo_latency") != std::string::npos);
    CHECK(r.output.find("40.0") != std::string::npos);
  }
  SUBCASE("tidy csv row count") {
    const auto r = run_cli("report " + out.string() + " --format csv");
    CHECK(r.exit_code == 0);
    std::size_t rows = 0;
    for (char ch : r.output)
      if (ch == '\n') ++rows;
    CHECK(rows == 1 + 2 * 5 * 9);  // header + cells x metrics
  }
  fs::remove(out);
}

TEST_CASE("cli: report rejects broken inputs with exit 2") {
  SUBCASE("missing file") {
    const auto r = run_cli("report /nonexistent/results.json");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("schema violation names the field") {
    const auto out = temp_file("torsim_e2e_broken.json");
    const auto good = temp_file("torsim_e2e_good.json");
    REQUIRE(run_cli("run --scenario 1 --strategy random --scale 0.02 --out " +
                    good.string())
                .exit_code == 0);
    std::string text = slurp(good);
    const auto pos = text.find("\"ranking\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 9, "\"renamed\"");
    std::ofstream(out, std::ios::binary) << text;
    const auto r = run_cli("report " + out.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("ranking") != std::string::npos);
    fs::remove(out);
    fs::remove(good);
  }
}

TEST_CASE("cli: config file overrides are applied and echoed") {
  const auto cfg = temp_file("torsim_e2e_cfg.json");
  const auto out = temp_file("torsim_e2e_cfg_results.json");
  std::ofstream(cfg) << R"({"retry_budget": 9, "congestion": {"base": 0.25}})";
  const auto r = run_cli("run --scenario 1 --strategy random --scale 0.02 "
                         "--config " +
                         cfg.string() + " --out " + out.string());
  CHECK(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("\"retry_budget\": 9") != std::string::npos);
  CHECK(text.find("\"base\": 0.25") != std::string::npos);
  SUBCASE("bad config is a runtime failure") {
    std::ofstream(cfg) << R"({"bogus_key": 1})";
    const auto bad = run_cli("run --scenario 1 --strategy random --scale 0.02 "
                             "--config " +
                             cfg.string() + " --out " + out.string());
    CHECK(bad.exit_code == 2);
    CHECK(bad.output.find("bogus_key") != std::string::npos);
  }
  fs::remove(cfg);
  fs::remove(out);
}
