// foonplan: validates cooking task plans against a tracked environment state,
// assembling them into a FOON task graph, with planner feedback loops for
// replanning. Stage boundaries are files so every stage can be re-run or
// swapped for hand-authored fixtures.

#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "foon/motion.hpp"
#include "foon/orchestrator.hpp"
#include "foon/plan_io.hpp"
#include "foon/segmenter.hpp"
#include "foon/validator.hpp"

namespace {

using namespace foon;
using ojson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitTransport = 4;

int fail(int code, const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return code;
}

int exit_code_for(const Error& error) {
  switch (error.code) {
    case ErrorCode::IoError: return kExitIo;
    case ErrorCode::PlannerTransport: return kExitTransport;
    default: return kExitParse;
  }
}

/// One run at a time per output directory.
class DirLock {
 public:
  bool acquire(const std::string& directory) {
    path_ = directory + "/.lock";
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) return false;
    ::close(fd);
    held_ = true;
    return true;
  }
  ~DirLock() {
    if (held_) std::remove(path_.c_str());
  }

 private:
  std::string path_;
  bool held_ = false;
};

Result<MotionLibrary> load_library_arg(const std::string& path) {
  if (path.empty()) return builtin_library();
  auto text = read_file(path);
  if (!text) return text.error();
  return load_library(text.value());
}

// ---------------------------------------------------------------------------
// segment
// ---------------------------------------------------------------------------

struct SegmentArgs {
  std::string subtitles;
  std::string lexicon;
  std::string library;
  std::string out;
  double threshold = 0.3;
};

int cmd_segment(const SegmentArgs& args) {
  auto srt_text = read_file(args.subtitles);
  if (!srt_text) return fail(kExitIo, srt_text.error().message);
  auto cues = parse_srt(srt_text.value());
  if (!cues) return fail(kExitParse, cues.error().message);

  auto library = load_library_arg(args.library);
  if (!library) return fail(kExitParse, library.error().message);

  ActionLexicon lexicon = builtin_lexicon();
  if (!args.lexicon.empty()) {
    auto text = read_file(args.lexicon);
    if (!text) return fail(kExitIo, text.error().message);
    auto loaded = load_lexicon(text.value(), library.value());
    if (!loaded) return fail(kExitParse, loaded.error().message);
    lexicon = std::move(loaded).value();
  }

  auto scenes = segment(cues.value(), lexicon, args.threshold);
  if (!scenes) return fail(kExitParse, scenes.error().message);
  auto written = write_file(args.out, serialize_scenes(scenes.value()));
  if (!written) return fail(kExitIo, written.error().message);
  std::cout << scenes.value().size() << " scenes -> " << args.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// plan
// ---------------------------------------------------------------------------

struct PlanArgs {
  std::string env;
  std::string targets;
  std::string planner;
  std::string fixture;
  std::string library;
  std::string out;
  std::uint64_t seed = 0;
  double error_rate = 0.3;
  int budget = 10;
  int depth = 8;
  std::size_t node_cap = kDefaultOracleNodeCap;
  bool no_validate = false;
};

ojson manifest_json(const PlanArgs& args) {
  ojson manifest;
  manifest["env"] = args.env;
  manifest["targets"] = args.targets;
  manifest["planner"] = args.planner;
  manifest["fixture"] = args.fixture;
  manifest["library"] = args.library.empty() ? "builtin" : args.library;
  manifest["seed"] = args.seed;
  manifest["error_rate"] = args.error_rate;
  manifest["budget"] = args.budget;
  manifest["depth"] = args.depth;
  manifest["validate"] = !args.no_validate;
  return manifest;
}

ojson scene_report_json(const SceneResult& scene) {
  ojson s;
  s["scene_id"] = scene.scene_id;
  s["outcome"] = scene.success ? "success" : (scene.audit.empty() ? "exhausted" : "invalid");
  s["rounds"] = scene.rounds_used;
  if (scene.last_diagnosis) s["diagnosis"] = render_feedback(*scene.last_diagnosis);
  if (scene.last_goal) s["goal_feedback"] = render_feedback(*scene.last_goal);
  if (!scene.audit.empty()) {
    s["audit"] = ojson::array();
    for (const StepAudit& entry : scene.audit) {
      ojson a;
      a["step"] = entry.step_index;
      a["text"] = entry.step_text;
      a["valid"] = entry.valid;
      if (!entry.feedback.empty()) a["feedback"] = entry.feedback;
      s["audit"].push_back(std::move(a));
    }
  }
  return s;
}

ojson transcript_json(const RecipeResult& result) {
  ojson doc;
  doc["scenes"] = ojson::array();
  for (const SceneResult& scene : result.scenes) {
    ojson s;
    s["scene_id"] = scene.scene_id;
    s["rounds"] = ojson::array();
    for (const RoundRecord& round : scene.transcript) {
      ojson r;
      r["prompt"] = ojson::array();
      for (const PromptMessage& message : round.prompt) {
        ojson m;
        m["role"] = message.role;
        m["content"] = message.content;
        if (!message.image_refs.empty()) m["images"] = message.image_refs;
        r["prompt"].push_back(std::move(m));
      }
      r["response"] = round.response;
      r["feedback"] = round.feedback;
      s["rounds"].push_back(std::move(r));
    }
    doc["scenes"].push_back(std::move(s));
  }
  return doc;
}

int cmd_plan(const PlanArgs& args) {
  // All inputs must exist and parse before any stage runs.
  auto env_text = read_file(args.env);
  if (!env_text) return fail(kExitIo, env_text.error().message);
  auto env = parse_environment(env_text.value());
  if (!env) return fail(kExitParse, env.error().message);

  auto targets_text = read_file(args.targets);
  if (!targets_text) return fail(kExitIo, targets_text.error().message);
  auto targets = parse_targets(targets_text.value());
  if (!targets) return fail(kExitParse, targets.error().message);

  auto library = load_library_arg(args.library);
  if (!library) return fail(kExitParse, library.error().message);

  std::unique_ptr<Planner> planner;
  if (args.planner == "scripted" || args.planner == "correcting" || args.planner == "faulty") {
    if (args.fixture.empty()) {
      return fail(kExitIo, "--fixture is required for planner kind '" + args.planner + "'");
    }
    auto fixture_text = read_file(args.fixture);
    if (!fixture_text) return fail(kExitIo, fixture_text.error().message);
    Result<std::unique_ptr<Planner>> made =
        args.planner == "scripted" ? make_scripted_planner(fixture_text.value())
        : args.planner == "correcting"
            ? make_correcting_planner(fixture_text.value())
            : make_faulty_planner(fixture_text.value(), args.error_rate, args.seed);
    if (!made) return fail(kExitParse, made.error().message);
    planner = std::move(made).value();
  } else if (args.planner == "oracle") {
    planner = make_oracle_planner(library.value(), args.depth, args.node_cap);
  } else if (args.planner == "remote") {
    auto config = remote_config_from_env();
    if (!config) return fail(kExitTransport, config.error().message);
    planner = make_remote_planner(std::move(config).value());
  } else {
    return fail(kExitIo, "unknown planner kind '" + args.planner + "'");
  }

  std::error_code fs_error;
  std::filesystem::create_directories(args.out, fs_error);
  if (fs_error) return fail(kExitIo, "cannot create '" + args.out + "'");
  DirLock lock;
  if (!lock.acquire(args.out)) {
    return fail(kExitIo, "output directory '" + args.out + "' is locked by another run");
  }

  RunConfig config;
  config.budget = args.budget;
  auto result = args.no_validate
                    ? run_recipe_unvalidated(env.value(), targets.value(), *planner,
                                             library.value(), config)
                    : run_recipe(env.value(), targets.value(), *planner, library.value(),
                                 config);
  if (!result) return fail(exit_code_for(result.error()), result.error().message);
  const RecipeResult& recipe = result.value();

  ojson report;
  report["success"] = recipe.success;
  report["total_replans"] = recipe.total_replans;
  report["scenes"] = ojson::array();
  for (const SceneResult& scene : recipe.scenes) {
    report["scenes"].push_back(scene_report_json(scene));
  }

  const std::string base = args.out + "/";
  for (const auto& [name, content] :
       std::vector<std::pair<std::string, std::string>>{
           {"graph.json", serialize_graph(recipe.graph)},
           {"report.json", report.dump(2) + "\n"},
           {"transcript.json", transcript_json(recipe).dump(2) + "\n"},
           {"manifest.json", manifest_json(args).dump(2) + "\n"},
           {"final_env.json", serialize_environment(recipe.final_env)},
       }) {
    auto written = write_file(base + name, content);
    if (!written) return fail(kExitIo, written.error().message);
  }

  const char* verdict = recipe.success          ? "recipe complete"
                        : args.no_validate      ? "replay audit found invalid steps"
                                                : "budget exhausted";
  std::cout << verdict << ": " << recipe.scenes.size() << "/" << targets.value().size()
            << " scenes, " << recipe.total_replans << " replanning rounds -> " << args.out
            << "\n";
  return recipe.success ? kExitOk : kExitInfeasible;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string env;
  std::string plan;
  std::string library;
};

int cmd_validate(const ValidateArgs& args) {
  auto env_text = read_file(args.env);
  if (!env_text) return fail(kExitIo, env_text.error().message);
  auto env = parse_environment(env_text.value());
  if (!env) return fail(kExitParse, env.error().message);

  auto library = load_library_arg(args.library);
  if (!library) return fail(kExitParse, library.error().message);

  auto plan_text = read_file(args.plan);
  if (!plan_text) return fail(kExitIo, plan_text.error().message);

  // Track source line numbers through comment/blank skipping.
  std::vector<std::pair<int, PlanStep>> steps;
  {
    std::istringstream stream(plan_text.value());
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string stripped = trim(line);
      if (stripped.empty() || stripped.front() == '#') continue;
      auto step = parse_plan_line(line);
      if (!step) {
        return fail(kExitParse,
                    "line " + std::to_string(line_no) + ": " + step.error().message);
      }
      steps.emplace_back(line_no, std::move(step).value());
    }
  }

  EnvironmentState current = env.value();
  for (size_t i = 0; i < steps.size(); ++i) {
    const auto& [line_no, step] = steps[i];
    std::vector<PlanStep> single = {step};
    PlanOutcome outcome = validate_plan(current, single, library.value());
    if (const auto* failure = std::get_if<PlanFailure>(&outcome)) {
      Diagnosis diagnosis = failure->diagnosis;
      diagnosis.step_index = static_cast<int>(i);
      std::cout << "line " << line_no << " INVALID: " << print_plan_line(step) << "\n";
      std::cout << render_feedback(diagnosis) << "\n";
      std::cout << "environment at failure:\n" << serialize_environment(current);
      return kExitInfeasible;
    }
    std::cout << "line " << line_no << " ok: " << print_plan_line(step) << "\n";
    current = std::get<PlanSuccess>(std::move(outcome)).final_env;
  }
  std::cout << "final environment:\n" << serialize_environment(current);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// export
// ---------------------------------------------------------------------------

struct ExportArgs {
  std::string graph;
  std::string format;
  std::string out;
};

int cmd_export(const ExportArgs& args) {
  auto text = read_file(args.graph);
  if (!text) return fail(kExitIo, text.error().message);
  auto graph = parse_graph(text.value());
  if (!graph) return fail(kExitParse, graph.error().message);

  const std::string rendered =
      args.format == "dot" ? export_dot(graph.value()) : serialize_graph(graph.value());
  if (args.out.empty()) {
    std::cout << rendered;
  } else {
    auto written = write_file(args.out, rendered);
    if (!written) return fail(kExitIo, written.error().message);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FOON task-plan validation and replanning engine"};
  app.require_subcommand(1);

  SegmentArgs segment_args;
  auto* segment_cmd =
      app.add_subcommand("segment", "Segment subtitle cues into cooking scenes");
  segment_cmd->add_option("--subtitles", segment_args.subtitles, "SRT file")->required();
  segment_cmd->add_option("--lexicon", segment_args.lexicon, "lexicon JSON file");
  segment_cmd->add_option("--library", segment_args.library, "motion library JSON file");
  segment_cmd->add_option("--threshold", segment_args.threshold, "similarity threshold")
      ->check(CLI::Range(0.0, 1.0));
  segment_cmd->add_option("--out", segment_args.out, "scenes JSON output")->required();

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand("plan", "Run the plan-validate-replan loop");
  plan_cmd->add_option("--env", plan_args.env, "environment JSON file")->required();
  plan_cmd->add_option("--targets", plan_args.targets, "target scenes JSON file")->required();
  plan_cmd
      ->add_option("--planner", plan_args.planner,
                   "planner kind: remote|scripted|correcting|faulty|oracle")
      ->required();
  plan_cmd->add_option("--fixture", plan_args.fixture, "scripted planner fixture JSON");
  plan_cmd->add_option("--library", plan_args.library, "motion library JSON file");
  plan_cmd->add_option("--seed", plan_args.seed, "random seed for the faulty planner");
  plan_cmd->add_option("--error-rate", plan_args.error_rate, "faulty planner corruption rate")
      ->check(CLI::Range(0.0, 1.0));
  plan_cmd->add_option("--budget", plan_args.budget, "planner rounds per scene")
      ->check(CLI::PositiveNumber);
  plan_cmd->add_option("--depth", plan_args.depth, "oracle search depth bound")
      ->check(CLI::PositiveNumber);
  plan_cmd->add_option("--node-cap", plan_args.node_cap, "oracle search node cap");
  plan_cmd->add_flag("--no-validate", plan_args.no_validate,
                     "few-shot baseline: append without validation, audit afterwards");
  plan_cmd->add_option("--out", plan_args.out, "output directory")->required();

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check a plan file step by step");
  validate_cmd->add_option("--env", validate_args.env, "environment JSON file")->required();
  validate_cmd->add_option("--plan", validate_args.plan, "plan text file")->required();
  validate_cmd->add_option("--library", validate_args.library, "motion library JSON file");

  ExportArgs export_args;
  auto* export_cmd = app.add_subcommand("export", "Render a graph file");
  export_cmd->add_option("--graph", export_args.graph, "graph JSON file")->required();
  export_cmd->add_option("--format", export_args.format, "dot or json")
      ->required()
      ->check(CLI::IsMember({"dot", "json"}));
  export_cmd->add_option("--out", export_args.out, "output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  if (segment_cmd->parsed()) return cmd_segment(segment_args);
  if (plan_cmd->parsed()) return cmd_plan(plan_args);
  if (validate_cmd->parsed()) return cmd_validate(validate_args);
  if (export_cmd->parsed()) return cmd_export(export_args);
  return kExitIo;
}
