// End-to-end checks of the CLI binary, located via WARPDIFF_BIN (set by
// ctest). Subcommands run as real child processes through the same process
// layer the executor uses.
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "support.hpp"
#include "warpdiff/json_io.hpp"
#include "warpdiff/process.hpp"
#include "warpdiff/report.hpp"

using namespace warpdiff;
using testsupport::TempDir;

namespace {

std::string cli_binary() {
  const char* bin = std::getenv("WARPDIFF_BIN");
  const bool have_bin = bin != nullptr && *bin != '\0';
  REQUIRE_MESSAGE(have_bin,
                  "WARPDIFF_BIN must point at the warpdiff binary (ctest sets it)");
  return bin;
}

ProcessResult run_cli(std::vector<std::string> args, const std::string& stdin_data = {}) {
  ProcessRequest request;
  request.argv.push_back(cli_binary());
  request.argv.insert(request.argv.end(), args.begin(), args.end());
  if (!stdin_data.empty()) request.stdin_data = stdin_data;
  request.timeout_s = 120.0;
  return run_process(request);
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("simulate | analyze | report composes into a ten-row table") {
  ProcessResult sim = run_cli({"simulate", "--seed", "7", "--cases", "120",
                               "--runtimes", "7"});
  REQUIRE(sim.exit_code == 0);
  CHECK(sim.stdout_data.rfind("case_id,", 0) == 0);

  ProcessResult analyzed = run_cli({"analyze"}, sim.stdout_data);
  REQUIRE(analyzed.exit_code == 0);

  ProcessResult reported = run_cli({"report", "--top", "10", "--format", "md"},
                                   analyzed.stdout_data);
  REQUIRE(reported.exit_code == 0);

  int rows = 0;
  std::istringstream lines(reported.stdout_data);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("| `", 0) == 0) ++rows;
  }
  CHECK(rows == 10);
}

TEST_CASE("simulate is deterministic per seed") {
  ProcessResult a = run_cli({"simulate", "--seed", "9", "--cases", "10", "--runtimes", "4"});
  ProcessResult b = run_cli({"simulate", "--seed", "9", "--cases", "10", "--runtimes", "4"});
  ProcessResult c = run_cli({"simulate", "--seed", "10", "--cases", "10", "--runtimes", "4"});
  CHECK(a.stdout_data == b.stdout_data);
  CHECK(a.stdout_data != c.stdout_data);
}

TEST_CASE("analyze rejects a single-runtime matrix with exit 2") {
  ProcessResult r = run_cli({"analyze"}, "case_id,only\nc1,1.0\n");
  CHECK(r.exit_code == 2);
  CHECK(r.stderr_data.find("TooFewRuntimes") != std::string::npos);
}

TEST_CASE("analyze output does not depend on CSV row order") {
  ProcessResult sim = run_cli({"simulate", "--seed", "3", "--cases", "12",
                               "--runtimes", "5", "--inject", "4:2:3"});
  REQUIRE(sim.exit_code == 0);

  // Reverse the data rows.
  std::vector<std::string> lines;
  std::istringstream in(sim.stdout_data);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  std::string reversed = lines[0] + "\n";
  for (std::size_t i = lines.size(); i > 1; --i) reversed += lines[i - 1] + "\n";

  ProcessResult original = run_cli({"analyze"}, sim.stdout_data);
  ProcessResult shuffled = run_cli({"analyze"}, reversed);
  REQUIRE(original.exit_code == 0);
  REQUIRE(shuffled.exit_code == 0);

  // Timestamps may differ; every analytical field must not. The config
  // digest legitimately differs because the input bytes differ.
  nlohmann::json ja = nlohmann::json::parse(original.stdout_data);
  nlohmann::json jb = nlohmann::json::parse(shuffled.stdout_data);
  for (auto* j : {&ja, &jb}) {
    j->erase("generated_at_unix");
    j->erase("config_digest");
  }
  CHECK(ja == jb);
}

TEST_CASE("report JSON format re-renders byte-identically") {
  ProcessResult sim = run_cli({"simulate", "--seed", "5", "--cases", "15",
                               "--runtimes", "4"});
  ProcessResult analyzed = run_cli({"analyze"}, sim.stdout_data);
  REQUIRE(analyzed.exit_code == 0);

  ProcessResult reported = run_cli({"report", "--format", "json"}, analyzed.stdout_data);
  REQUIRE(reported.exit_code == 0);
  CHECK(reported.stdout_data == analyzed.stdout_data);

  ProcessResult txt_a = run_cli({"report", "--format", "txt"}, analyzed.stdout_data);
  ProcessResult txt_b = run_cli({"report", "--format", "txt"}, reported.stdout_data);
  CHECK(txt_a.stdout_data == txt_b.stdout_data);
}

TEST_CASE("analyze carries stage matrices into stage locations") {
  TempDir dir;
  ProcessResult sim = run_cli({"simulate", "--seed", "21", "--cases", "30", "--runtimes",
                               "5", "--inject", "11:3:4", "--out",
                               (dir.path() / "matrix.csv").string(), "--stages-out",
                               dir.path().string()});
  REQUIRE(sim.exit_code == 0);

  ProcessResult analyzed = run_cli(
      {"analyze", "--in", (dir.path() / "matrix.csv").string(), "--stage-init",
       (dir.path() / "matrix_init.csv").string(), "--stage-load",
       (dir.path() / "matrix_load.csv").string(), "--stage-exec",
       (dir.path() / "matrix_exec.csv").string(), "--stage-top", "3"});
  REQUIRE(analyzed.exit_code == 0);

  nlohmann::json j = nlohmann::json::parse(analyzed.stdout_data);
  REQUIRE(j.contains("stage_locations"));
  CHECK(j.at("stage_locations").size() <= 3);
  CHECK(j.at("stage_locations").size() >= 1);
}

TEST_CASE("bench-overhead reports timing and honors its budget") {
  ProcessResult r = run_cli({"bench-overhead", "--cases", "50", "--runtimes", "5",
                             "--repeat", "3", "--budget-s", "30", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  nlohmann::json j = nlohmann::json::parse(r.stdout_data);
  CHECK(j.at("runs").get<int>() == 3);
  CHECK(j.at("mean_s").get<double>() > 0.0);
  CHECK(j.at("mean_s").get<double>() < 30.0);
}

TEST_CASE("missing subcommand or unknown flags fail fast") {
  ProcessResult none = run_cli({});
  CHECK(none.exit_code != 0);
  ProcessResult unknown = run_cli({"analyze", "--no-such-flag"});
  CHECK(unknown.exit_code != 0);
}

TEST_SUITE_END();
