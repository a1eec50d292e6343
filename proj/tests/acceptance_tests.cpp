// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its runtime. Run via ctest or directly:
//   ./acceptance_tests -s
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdio>

#include "foon/orchestrator.hpp"
#include "foon/plan_io.hpp"
#include "foon/segmenter.hpp"
#include "foon/validator.hpp"
#include "generators.hpp"
#include "sim_oracle.hpp"
#include "test_util.hpp"

using namespace foon;

namespace {

class Criterion {
 public:
  Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

  void check(bool condition) {
    ok_ = ok_ && condition;
    CHECK(condition);
  }

  double elapsed_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void check_runtime(double limit_seconds) {
    const double elapsed = elapsed_seconds();
    if (elapsed >= limit_seconds) {
      MESSAGE("criterion " << number_ << " took " << elapsed << "s, limit " << limit_seconds);
    }
    check(elapsed < limit_seconds);
  }

  ~Criterion() {
    std::printf("[%s] criterion %d: %s (%.2fs)\n", ok_ ? "PASS" : "FAIL", number_,
                title_.c_str(), elapsed_seconds());
    std::fflush(stdout);
  }

 private:
  int number_;
  std::string title_;
  bool ok_ = true;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct RecipeFixture {
  std::string name;
  EnvironmentState env;
  std::vector<TargetState> targets;
  std::string planner_fixture;
};

RecipeFixture load_recipe(const std::string& name) {
  RecipeFixture fixture;
  fixture.name = name;
  auto env = parse_environment(testutil::read_fixture("recipes/" + name + "/env.json"));
  REQUIRE(env.ok());
  fixture.env = std::move(env).value();
  auto targets = parse_targets(testutil::read_fixture("recipes/" + name + "/targets.json"));
  REQUIRE(targets.ok());
  fixture.targets = std::move(targets).value();
  fixture.planner_fixture = testutil::read_fixture("recipes/" + name + "/planner.json");
  return fixture;
}

const std::vector<std::string> kRecipeNames = {"gyudon", "salad", "soup", "omelet", "stirfry"};

}  // namespace

TEST_CASE("criterion 1: validator soundness over simulated plans") {
  Criterion criterion(1, "validator soundness, 1000 simulated plans accepted exactly");
  testgen::Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const EnvironmentState env = testgen::random_environment(rng, 6);
    const auto plan = testgen::random_valid_plan(rng, env, 12);
    PlanOutcome outcome = validate_plan(env, plan.steps, builtin_library());
    const bool accepted = std::holds_alternative<PlanSuccess>(outcome);
    criterion.check(accepted);
    if (accepted) {
      criterion.check(std::get<PlanSuccess>(outcome).final_env == plan.final_env);
    }
  }
  criterion.check_runtime(10.0);
}

TEST_CASE("criterion 2: corruption detection at the corrupted step") {
  Criterion criterion(2, "1000 single-token corruptions rejected at their step");
  testgen::Rng rng(202);
  int produced = 0;
  while (produced < 1000) {
    const EnvironmentState env = testgen::random_environment(rng, 6);
    const auto plan = testgen::random_valid_plan(rng, env, 12);
    auto corruption = testgen::corrupt_plan(rng, env, plan.steps);
    if (!corruption) continue;
    ++produced;

    std::vector<PlanStep> corrupted = plan.steps;
    corrupted[static_cast<size_t>(corruption->step_index)] = corruption->corrupted;
    PlanOutcome outcome = validate_plan(env, corrupted, builtin_library());
    const bool rejected = std::holds_alternative<PlanFailure>(outcome);
    criterion.check(rejected);
    if (!rejected) continue;

    const Diagnosis& diagnosis = std::get<PlanFailure>(outcome).diagnosis;
    criterion.check(diagnosis.step_index == corruption->step_index);
    bool named = false;
    for (const Mismatch& m : diagnosis.mismatches) {
      switch (corruption->kind) {
        case testgen::CorruptionKind::HandToken:
          named = named || m.subject == hand_id(*parse_hand_token(corruption->new_token));
          break;
        case testgen::CorruptionKind::PlaceToken:
          named = named || m.attribute == "place" || m.attribute == "category";
          break;
        case testgen::CorruptionKind::ObjectToken:
          named = named || m.subject == corruption->new_token ||
                  m.required == corruption->new_token;
          break;
      }
    }
    criterion.check(named);
  }
  criterion.check_runtime(10.0);
}

TEST_CASE("criterion 3: the gyudon golden fixture with the omitted cut") {
  Criterion criterion(3, "gyudon fixture: inferred Cut and 3 replanning rounds");
  const RecipeFixture gyudon = load_recipe("gyudon");

  // Fig-9 layout: utensils right, ingredients left, the stove in the workspace.
  for (const char* utensil : {"Knife", "Cutting board", "Frying pan", "Spoon", "Bowl"}) {
    criterion.check(gyudon.env.find(utensil) != nullptr &&
                    gyudon.env.find(utensil)->place == Location::right_storage());
  }
  for (const char* ingredient : {"Onion", "Pork", "Rice"}) {
    criterion.check(gyudon.env.find(ingredient) != nullptr &&
                    gyudon.env.find(ingredient)->place == Location::left_storage());
  }
  criterion.check(gyudon.env.find("Stove") != nullptr &&
                  gyudon.env.find("Stove")->place == Location::workspace());

  // Eight target scenes, one of which demands a chopped onion.
  criterion.check(gyudon.targets.size() == 8);
  const TargetState* chopped_scene = nullptr;
  for (const TargetState& scene : gyudon.targets) {
    for (const TargetObjectNode& node : scene.targets) {
      if (node.name == "Onion" && node.status && node.status->count("chopped") != 0) {
        chopped_scene = &scene;
      }
    }
  }
  criterion.check(chopped_scene != nullptr);

  // No scene subtitle mentions any Cut keyword.
  auto cues = parse_srt(testutil::read_fixture("recipes/gyudon/gyudon.srt"));
  REQUIRE(cues.ok());
  const LexiconEntry* cut_entry = nullptr;
  for (const LexiconEntry& entry : builtin_lexicon().entries()) {
    if (entry.motion == "Cut") cut_entry = &entry;
  }
  REQUIRE(cut_entry != nullptr);
  for (const SubtitleCue& cue : cues.value()) {
    for (const std::string& phrase : cut_entry->phrases) {
      criterion.check(to_lower(cue.text).find(phrase) == std::string::npos);
    }
  }

  // The oracle infers the omitted Cut from the chopped-onion scene's entry
  // environment (the state after the scenes before it).
  REQUIRE(chopped_scene != nullptr);
  EnvironmentState entry_env = gyudon.env;
  {
    auto planner = make_scripted_planner(gyudon.planner_fixture);
    REQUIRE(planner.ok());
    RunConfig config;
    for (const TargetState& scene : gyudon.targets) {
      if (scene.scene_id == chopped_scene->scene_id) break;
      auto outcome = run_scene(entry_env, scene, *planner.value(), builtin_library(), config);
      REQUIRE(outcome.ok());
      criterion.check(outcome.value().result.success);
      entry_env = outcome.value().env;
    }
  }
  auto inferred = oracle_plan(entry_env, *chopped_scene, builtin_library(), /*depth_bound=*/8);
  REQUIRE(inferred.ok());
  criterion.check(inferred.value().has_value());
  if (inferred.value()) {
    bool has_cut = false;
    for (const PlanStep& step : *inferred.value()) {
      if (iequals(step.motion, "Cut")) has_cut = true;
    }
    criterion.check(has_cut);
    PlanOutcome outcome = validate_plan(entry_env, *inferred.value(), builtin_library());
    criterion.check(std::holds_alternative<PlanSuccess>(outcome));
    if (auto* success = std::get_if<PlanSuccess>(&outcome)) {
      criterion.check(check_goal(success->final_env, *chopped_scene).satisfied);
    }
  }

  // The correcting planner clears the three injected faults.
  auto faulted = make_correcting_planner(
      testutil::read_fixture("recipes/gyudon/planner_faulted.json"));
  REQUIRE(faulted.ok());
  RunConfig config;
  auto result =
      run_recipe(gyudon.env, gyudon.targets, *faulted.value(), builtin_library(), config);
  REQUIRE(result.ok());
  criterion.check(result.value().success);
  criterion.check(result.value().total_replans >= 3);

  criterion.check_runtime(60.0);
}

TEST_CASE("criterion 4: validated mode dominates the few-shot baseline") {
  Criterion criterion(4, "paired-seed dominance over 5 recipes x 20 seeds");
  std::vector<RecipeFixture> recipes;
  for (const std::string& name : kRecipeNames) recipes.push_back(load_recipe(name));

  RunConfig config;  // budget 10
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    int validated_successes = 0;
    int baseline_successes = 0;
    int correcting_successes = 0;

    for (size_t r = 0; r < recipes.size(); ++r) {
      const RecipeFixture& recipe = recipes[r];
      const std::uint64_t paired_seed = seed * 100 + r;

      auto validated_planner = make_faulty_planner(recipe.planner_fixture, 0.3, paired_seed);
      REQUIRE(validated_planner.ok());
      auto validated = run_recipe(recipe.env, recipe.targets, *validated_planner.value(),
                                  builtin_library(), config);
      REQUIRE(validated.ok());
      if (validated.value().success) ++validated_successes;

      auto baseline_planner = make_faulty_planner(recipe.planner_fixture, 0.3, paired_seed);
      REQUIRE(baseline_planner.ok());
      auto baseline = run_recipe_unvalidated(recipe.env, recipe.targets,
                                             *baseline_planner.value(), builtin_library(),
                                             config);
      REQUIRE(baseline.ok());
      if (baseline.value().success) ++baseline_successes;

      auto correcting_planner = make_correcting_planner(
          recipe.name == "gyudon"
              ? testutil::read_fixture("recipes/gyudon/planner_faulted.json")
              : recipe.planner_fixture);
      REQUIRE(correcting_planner.ok());
      auto corrected = run_recipe(recipe.env, recipe.targets, *correcting_planner.value(),
                                  builtin_library(), config);
      REQUIRE(corrected.ok());
      if (corrected.value().success) ++correcting_successes;
    }

    criterion.check(validated_successes >= baseline_successes);
    criterion.check(correcting_successes == 5);
  }
  criterion.check_runtime(300.0);
}

TEST_CASE("criterion 5: gyudon segmentation and the partition property") {
  Criterion criterion(5, "13 gyudon scenes; scene spans partition 1000 cue streams");
  auto cues = parse_srt(testutil::read_fixture("recipes/gyudon/gyudon.srt"));
  REQUIRE(cues.ok());
  auto scenes = segment(cues.value(), builtin_lexicon(), 0.3);
  REQUIRE(scenes.ok());
  criterion.check(scenes.value().size() == 13);
  criterion.check(!scenes.value().empty() && !scenes.value().front().cooking &&
                  scenes.value().front().first_cue == 0 &&
                  scenes.value().front().last_cue == 1);

  testgen::Rng rng(505);
  const std::vector<std::string> words = {"cut",  "mix",  "pour", "cook",  "take", "put",
                                          "the",  "pan",  "now",  "hello", "stir", "bowl",
                                          "wait", "chop", "fry",  "video", "well", "place"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<SubtitleCue> stream;
    const size_t count = rng() % 30;
    std::int64_t t = 0;
    for (size_t i = 0; i < count; ++i) {
      SubtitleCue cue;
      cue.index = static_cast<int>(i) + 1;
      cue.start_ms = t;
      cue.end_ms = t + 900;
      t += 1000;
      const size_t len = 1 + rng() % 5;
      for (size_t w = 0; w < len; ++w) {
        if (!cue.text.empty()) cue.text += " ";
        cue.text += words[rng() % words.size()];
      }
      stream.push_back(std::move(cue));
    }
    const double threshold = static_cast<double>(rng() % 101) / 100.0;
    auto segmented = segment(stream, builtin_lexicon(), threshold);
    REQUIRE(segmented.ok());

    int next = 0;
    bool partition = true;
    for (const SceneRecord& scene : segmented.value()) {
      partition = partition && scene.first_cue == next && scene.last_cue >= scene.first_cue;
      next = scene.last_cue + 1;
    }
    partition = partition && next == static_cast<int>(stream.size());
    criterion.check(partition);
  }
  criterion.check_runtime(60.0);
}

TEST_CASE("criterion 6: round trips and the response-parser fuzz") {
  Criterion criterion(6, "lossless round trips; 100k fuzz inputs without a crash");

  // plan lines
  testgen::Rng rng(606);
  const std::vector<std::string> motions = {"Pick", "Place", "Pour", "Cut", "Mix", "Cook"};
  const std::vector<std::string> tokens = {"Knife", "Right hand", "Left storage",
                                           "On(Stove)", "Frying pan", "In(Bowl)"};
  for (int trial = 0; trial < 1000; ++trial) {
    PlanStep step;
    step.motion = motions[rng() % motions.size()];
    const size_t arity = 1 + rng() % 4;
    for (size_t i = 0; i < arity; ++i) step.args.push_back(tokens[rng() % tokens.size()]);
    auto reparsed = parse_plan_line(print_plan_line(step));
    criterion.check(reparsed.ok() && reparsed.value() == step);
  }

  // environment and target documents for all five recipes
  for (const std::string& name : kRecipeNames) {
    const std::string env_text = testutil::read_fixture("recipes/" + name + "/env.json");
    auto env = parse_environment(env_text);
    REQUIRE(env.ok());
    auto env_again = parse_environment(serialize_environment(env.value()));
    criterion.check(env_again.ok() && env_again.value() == env.value());

    const std::string targets_text =
        testutil::read_fixture("recipes/" + name + "/targets.json");
    auto targets = parse_targets(targets_text);
    REQUIRE(targets.ok());
    auto targets_again = parse_targets(serialize_targets(targets.value()));
    criterion.check(targets_again.ok() && targets_again.value() == targets.value());
  }

  // the full gyudon graph survives a byte-identical round trip
  {
    const RecipeFixture gyudon = load_recipe("gyudon");
    auto planner = make_scripted_planner(gyudon.planner_fixture);
    REQUIRE(planner.ok());
    RunConfig config;
    auto result =
        run_recipe(gyudon.env, gyudon.targets, *planner.value(), builtin_library(), config);
    REQUIRE(result.ok());
    const std::string first = serialize_graph(result.value().graph);
    auto reparsed = parse_graph(first);
    criterion.check(reparsed.ok());
    if (reparsed.ok()) {
      criterion.check(reparsed.value() == result.value().graph);
      criterion.check(serialize_graph(reparsed.value()) == first);
    }
  }

  // fuzz: arbitrary byte strings produce typed errors or valid responses
  testgen::Rng fuzz_rng(4242);
  for (int trial = 0; trial < 100000; ++trial) {
    const size_t length = fuzz_rng() % 120;
    std::string text;
    text.reserve(length);
    for (size_t i = 0; i < length; ++i) text += static_cast<char>(fuzz_rng() % 256);
    (void)parse_planner_response(text, ResponseKind::TargetEstimate);
    (void)parse_planner_response(text, ResponseKind::ActionPlan);
  }
  criterion.check(true);  // surviving the fuzz loop is the assertion

  criterion.check_runtime(120.0);
}

TEST_CASE("criterion 7: oracle and validator agree on reachable targets") {
  Criterion criterion(7, "200 oracle plans validate and reach their goals");
  testgen::Rng rng(707);
  int produced = 0;
  while (produced < 200) {
    const EnvironmentState env = testgen::random_environment(rng, 6, 2);
    const auto walk = testgen::random_valid_plan(rng, env, 6);
    if (walk.steps.empty()) continue;

    TargetState target;
    target.scene_id = produced;
    for (const auto& [name, obj] : walk.final_env.objects) {
      const ObjectState* before = env.find(name);
      if (before == nullptr || *before == obj) continue;
      TargetObjectNode node;
      node.name = name;
      if (!(before->place == obj.place)) node.place = obj.place;
      if (before->status != obj.status) node.status = obj.status;
      target.targets.push_back(std::move(node));
      if (target.targets.size() == 3) break;
    }
    if (target.targets.empty()) continue;
    ++produced;

    auto plan = oracle_plan(env, target, builtin_library(), 6);
    REQUIRE(plan.ok());
    criterion.check(plan.value().has_value());
    if (!plan.value()) continue;

    PlanOutcome outcome = validate_plan(env, *plan.value(), builtin_library());
    const bool valid = std::holds_alternative<PlanSuccess>(outcome);
    criterion.check(valid);
    if (valid) {
      criterion.check(
          check_goal(std::get<PlanSuccess>(outcome).final_env, target).satisfied);
    }
  }
  criterion.check_runtime(120.0);
}
