#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "foon/motion.hpp"
#include "foon/plan_io.hpp"
#include "foon/segmenter.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace foon;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path path = fs::temp_directory_path() / ("foonplan_cli_test_" +
                                                 std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
    return path;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path capture = scratch_dir() / ("out_" + std::to_string(counter++) + ".txt");
  const std::string command =
      std::string(CLI_BINARY) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream stream(capture);
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  result.output = buffer.str();
  return result;
}

std::string fx(const std::string& relative) { return testutil::fixture_path(relative); }

std::string write_scratch(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream stream(path);
  stream << content;
  return path.string();
}

std::string slurp(const fs::path& path) {
  std::ifstream stream(path);
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("segment writes thirteen gyudon scenes") {
  const std::string out = (scratch_dir() / "scenes.json").string();
  auto result = run_cli("segment --subtitles " + fx("recipes/gyudon/gyudon.srt") +
                        " --lexicon " + fx("lexicon.json") + " --out " + out);
  CHECK(result.exit_code == 0);
  auto scenes = parse_scenes(slurp(out));
  REQUIRE(scenes.ok());
  CHECK(scenes.value().size() == 13);
}

TEST_CASE("segment distinguishes missing files from parse errors") {
  auto missing = run_cli("segment --subtitles /nonexistent.srt --out /tmp/s.json");
  CHECK(missing.exit_code == 1);

  const std::string bad = write_scratch("bad.srt", "1\n00:00:09,000 --> 00:00:01,000\nx\n");
  auto malformed = run_cli("segment --subtitles " + bad + " --out /tmp/s.json");
  CHECK(malformed.exit_code == 2);
  CHECK(malformed.output.find("line") != std::string::npos);

  const std::string empty = write_scratch("empty.srt", "");
  const std::string out = (scratch_dir() / "empty_scenes.json").string();
  auto ok = run_cli("segment --subtitles " + empty + " --out " + out);
  CHECK(ok.exit_code == 0);
  auto scenes = parse_scenes(slurp(out));
  REQUIRE(scenes.ok());
  CHECK(scenes.value().empty());
}

TEST_CASE("validate accepts the golden gyudon plan") {
  auto result = run_cli("validate --env " + fx("recipes/gyudon/env.json") + " --plan " +
                        fx("recipes/gyudon/golden_plan.txt"));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("INVALID") == std::string::npos);
  CHECK(result.output.find("final environment:") != std::string::npos);
}

TEST_CASE("validate reports the grasp conflict with its line number") {
  auto result = run_cli("validate --env " + fx("recipes/gyudon/env.json") + " --plan " +
                        fx("recipes/gyudon/bad_plan.txt"));
  CHECK(result.exit_code == 3);
  CHECK(result.output.find("line 2 INVALID") != std::string::npos);
  CHECK(result.output.find("RightHand.holding") != std::string::npos);
}

TEST_CASE("validate accepts an empty plan file") {
  const std::string empty = write_scratch("empty_plan.txt", "# nothing yet\n\n");
  auto result =
      run_cli("validate --env " + fx("recipes/gyudon/env.json") + " --plan " + empty);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("final environment:") != std::string::npos);

  const std::string bad = write_scratch("bad_plan_syntax.txt", "Pick ||\n");
  auto parse_error =
      run_cli("validate --env " + fx("recipes/gyudon/env.json") + " --plan " + bad);
  CHECK(parse_error.exit_code == 2);
}

TEST_CASE("validate accepts a custom motion library") {
  const std::string library =
      write_scratch("library.json", std::string(builtin_library_document()));
  auto result = run_cli("validate --env " + fx("recipes/gyudon/env.json") + " --plan " +
                        fx("recipes/gyudon/golden_plan.txt") + " --library " + library);
  CHECK(result.exit_code == 0);
}

TEST_CASE("plan runs the correcting loop and writes its artifacts") {
  const std::string out = (scratch_dir() / "run_correcting").string();
  auto result = run_cli("plan --env " + fx("recipes/gyudon/env.json") + " --targets " +
                        fx("recipes/gyudon/targets.json") +
                        " --planner correcting --fixture " +
                        fx("recipes/gyudon/planner_faulted.json") + " --out " + out);
  CHECK(result.exit_code == 0);
  for (const char* name : {"graph.json", "report.json", "transcript.json", "manifest.json",
                           "final_env.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(fs::path(out) / name));
  }
  const auto report = nlohmann::json::parse(slurp(fs::path(out) / "report.json"));
  CHECK(report["success"] == true);
  CHECK(report["total_replans"] == 3);
}

TEST_CASE("identical manifests produce byte-identical outputs") {
  const std::string out_a = (scratch_dir() / "run_a").string();
  const std::string out_b = (scratch_dir() / "run_b").string();
  const std::string args = "plan --env " + fx("recipes/gyudon/env.json") + " --targets " +
                           fx("recipes/gyudon/targets.json") +
                           " --planner faulty --seed 7 --error-rate 0.3 --fixture " +
                           fx("recipes/gyudon/planner.json") + " --out ";
  auto first = run_cli(args + out_a);
  auto second = run_cli(args + out_b);
  CHECK(first.exit_code == second.exit_code);
  for (const char* name : {"graph.json", "report.json", "transcript.json"}) {
    CAPTURE(name);
    CHECK(slurp(fs::path(out_a) / name) == slurp(fs::path(out_b) / name));
  }
}

TEST_CASE("an always-faulty planner exhausts the budget with exit 3") {
  const std::string out = (scratch_dir() / "run_faulty").string();
  auto result = run_cli("plan --env " + fx("recipes/gyudon/env.json") + " --targets " +
                        fx("recipes/gyudon/targets.json") +
                        " --planner faulty --seed 1 --error-rate 1.0 --budget 3 --fixture " +
                        fx("recipes/gyudon/planner.json") + " --out " + out);
  CHECK(result.exit_code == 3);
  const auto report = nlohmann::json::parse(slurp(fs::path(out) / "report.json"));
  CHECK(report["success"] == false);
}

TEST_CASE("the baseline mode audits blind appends") {
  const std::string out = (scratch_dir() / "run_baseline").string();
  auto result = run_cli("plan --env " + fx("recipes/gyudon/env.json") + " --targets " +
                        fx("recipes/gyudon/targets.json") +
                        " --planner scripted --no-validate --fixture " +
                        fx("recipes/gyudon/planner_faulted.json") + " --out " + out);
  CHECK(result.exit_code == 3);
  const auto report = nlohmann::json::parse(slurp(fs::path(out) / "report.json"));
  CHECK(report["success"] == false);
  int invalid = 0;
  for (const auto& scene : report["scenes"]) {
    if (!scene.contains("audit")) continue;
    for (const auto& entry : scene["audit"]) {
      if (entry["valid"] == false) ++invalid;
    }
  }
  CHECK(invalid >= 1);
}

TEST_CASE("an empty target file is a trivial success") {
  const std::string targets = write_scratch("no_targets.json", "{\"scenes\": []}\n");
  const std::string out = (scratch_dir() / "run_empty").string();
  auto result = run_cli("plan --env " + fx("recipes/gyudon/env.json") + " --targets " +
                        targets + " --planner scripted --fixture " +
                        fx("recipes/gyudon/planner.json") + " --out " + out);
  CHECK(result.exit_code == 0);
  auto graph = parse_graph(slurp(fs::path(out) / "graph.json"));
  REQUIRE(graph.ok());
  CHECK(graph.value().empty());
}

TEST_CASE("a held lock refuses a second run") {
  const std::string out = (scratch_dir() / "run_locked").string();
  fs::create_directories(out);
  std::ofstream(fs::path(out) / ".lock") << "";
  auto result = run_cli("plan --env " + fx("recipes/gyudon/env.json") + " --targets " +
                        fx("recipes/gyudon/targets.json") + " --planner scripted --fixture " +
                        fx("recipes/gyudon/planner.json") + " --out " + out);
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("locked") != std::string::npos);
}

TEST_CASE("plan validates its inputs before running") {
  const std::string out = (scratch_dir() / "run_badinput").string();
  const std::string bad_env = write_scratch("bad_env.json", "{\"objects\": 3}");
  auto bad = run_cli("plan --env " + bad_env + " --targets " +
                     fx("recipes/gyudon/targets.json") + " --planner scripted --fixture " +
                     fx("recipes/gyudon/planner.json") + " --out " + out);
  CHECK(bad.exit_code == 2);
  CHECK_FALSE(fs::exists(fs::path(out) / "report.json"));
}

TEST_CASE("remote planner without configuration exits 4") {
  ::unsetenv("FOON_PLANNER_ENDPOINT");
  const std::string out = (scratch_dir() / "run_remote").string();
  auto result = run_cli("plan --env " + fx("recipes/gyudon/env.json") + " --targets " +
                        fx("recipes/gyudon/targets.json") + " --planner remote --out " + out);
  CHECK(result.exit_code == 4);
}

TEST_CASE("export renders DOT with one box per unit") {
  const std::string out = (scratch_dir() / "run_for_export").string();
  run_cli("plan --env " + fx("recipes/gyudon/env.json") + " --targets " +
          fx("recipes/gyudon/targets.json") + " --planner scripted --fixture " +
          fx("recipes/gyudon/planner.json") + " --out " + out);
  const std::string graph_file = (fs::path(out) / "graph.json").string();

  auto dot = run_cli("export --graph " + graph_file + " --format dot");
  CHECK(dot.exit_code == 0);
  size_t boxes = 0;
  for (size_t pos = 0; (pos = dot.output.find("shape=box", pos)) != std::string::npos; ++pos) {
    ++boxes;
  }
  auto graph = parse_graph(slurp(graph_file));
  REQUIRE(graph.ok());
  CHECK(boxes == graph.value().units.size());

  // canonical json -> json is byte-identical
  auto json_out = run_cli("export --graph " + graph_file + " --format json");
  CHECK(json_out.exit_code == 0);
  CHECK(json_out.output == slurp(graph_file));

  auto bad = run_cli("export --graph " + fx("lexicon.json") + " --format dot");
  CHECK(bad.exit_code == 2);
}
