#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "foon/core.hpp"
#include "foon/graph.hpp"
#include "foon/motion.hpp"
#include "foon/plan_io.hpp"
#include "foon/segmenter.hpp"
#include "foon/validator.hpp"

namespace foon {

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

struct PromptMessage {
  std::string role;  // "system" | "user"
  std::string content;
  std::vector<std::string> image_refs;  // passed through opaquely

  friend bool operator==(const PromptMessage&, const PromptMessage&) = default;
};

using PromptMessages = std::vector<PromptMessage>;

/// Prompt asking the planner to estimate the target object node for a scene
/// (Fig. 7a style: system role carries background, task, thought process and
/// constraints; user role carries actions, schema, subtitles and images).
PromptMessages build_target_prompt(const SceneRecord& scene, const MotionLibrary& library);

/// Prompt asking the planner for an action plan reaching `target` from `env`
/// (Fig. 7b style). `feedback`, when present, is appended as an
/// error-correction block.
PromptMessages build_action_prompt(const EnvironmentState& env, const TargetState& target,
                                   const std::optional<std::string>& feedback,
                                   const MotionLibrary& library);

/// Deterministic one-line-per-mismatch rendering of a diagnosis.
std::string render_feedback(const Diagnosis& diagnosis);
std::string render_feedback(const GoalReport& report);

// Markers used to delimit machine-readable blocks inside prompts. The fixture
// planners parse these.
inline constexpr std::string_view kScenePrefix = "Scene: ";
inline constexpr std::string_view kEnvironmentMarker = "Environment object node:";
inline constexpr std::string_view kTargetMarker = "Target object node:";
inline constexpr std::string_view kFeedbackMarker =
    "The previous plan failed validation. Correct these errors:";

// ---------------------------------------------------------------------------
// Planners
// ---------------------------------------------------------------------------

class Planner {
 public:
  virtual ~Planner() = default;
  virtual Result<std::string> complete(const PromptMessages& prompt) = 0;
};

/// Replays fixture responses round by round:
///   {"scenes": {"<scene-id>": ["response text", ...]}}
/// Rounds past the end of a scene's list repeat its last entry.
Result<std::unique_ptr<Planner>> make_scripted_planner(std::string_view fixture_json);

/// Scripted planner that, on feedback, rewrites its previous plan by applying
/// the first reported (subject, attribute, required/actual) mismatch.
Result<std::unique_ptr<Planner>> make_correcting_planner(std::string_view fixture_json);

/// Scripted planner that corrupts one token of its response with probability
/// `error_rate` per call. Deterministic for a fixed seed.
Result<std::unique_ptr<Planner>> make_faulty_planner(std::string_view fixture_json,
                                                     double error_rate, std::uint64_t seed);

/// Planner that extracts the environment/target blocks from the prompt and
/// answers with a breadth-first-search plan.
std::unique_ptr<Planner> make_oracle_planner(const MotionLibrary& library, int depth_bound,
                                             std::size_t node_cap);

struct RemoteConfig {
  std::string endpoint;  // full URL of a chat-completion style endpoint
  std::string model;
  std::string api_key;
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{250};
};

/// JSON-over-HTTP chat-completion client with exponential-backoff retries.
std::unique_ptr<Planner> make_remote_planner(RemoteConfig config);

/// Reads FOON_PLANNER_ENDPOINT / FOON_PLANNER_MODEL / FOON_PLANNER_API_KEY.
Result<RemoteConfig> remote_config_from_env();

// ---------------------------------------------------------------------------
// The replanning loop
// ---------------------------------------------------------------------------

struct RunConfig {
  int budget = 10;  // max planner rounds per scene
};

struct RoundRecord {
  PromptMessages prompt;
  std::string response;
  std::string feedback;  // empty when the round succeeded

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct StepAudit {
  int step_index = 0;
  std::string step_text;
  bool valid = true;
  std::string feedback;  // rendered diagnosis for invalid steps
};

struct SceneResult {
  int scene_id = 0;
  bool success = false;
  int rounds_used = 0;
  TaskGraph fragment;
  std::optional<Diagnosis> last_diagnosis;
  std::optional<GoalReport> last_goal;
  std::vector<RoundRecord> transcript;
  std::vector<StepAudit> audit;  // filled by the unvalidated (baseline) mode
};

struct RecipeResult {
  std::vector<SceneResult> scenes;
  TaskGraph graph;
  EnvironmentState final_env;
  bool success = false;
  int total_replans = 0;  // rounds beyond the first, summed over scenes
};

struct SceneOutcome {
  SceneResult result;
  EnvironmentState env;
};

/// Runs one scene: up to `config.budget` rounds of prompt -> plan -> validate
/// -> goal check, feeding diagnoses back and retrying the whole scene plan
/// from the scene's entry environment.
Result<SceneOutcome> run_scene(const EnvironmentState& env, const TargetState& target,
                               Planner& planner, const MotionLibrary& library,
                               const RunConfig& config);

/// Folds run_scene over the scenes, threading the environment. Stops at the
/// first exhausted scene.
Result<RecipeResult> run_recipe(const EnvironmentState& env,
                                const std::vector<TargetState>& targets, Planner& planner,
                                const MotionLibrary& library, const RunConfig& config);

/// Few-shot baseline: one round per scene, responses converted and appended
/// without check_action gating, then a post-hoc replay audit annotates
/// invalid steps.
Result<RecipeResult> run_recipe_unvalidated(const EnvironmentState& env,
                                            const std::vector<TargetState>& targets,
                                            Planner& planner, const MotionLibrary& library,
                                            const RunConfig& config);

/// Asks the planner for a target object node estimate per scene; scenes the
/// planner marks unnecessary are skipped.
Result<std::vector<TargetState>> estimate_targets(const std::vector<SceneRecord>& scenes,
                                                  Planner& planner, const MotionLibrary& library,
                                                  const RunConfig& config);

// ---------------------------------------------------------------------------
// Search oracle
// ---------------------------------------------------------------------------

inline constexpr std::size_t kDefaultOracleNodeCap = 2'000'000;

/// Breadth-first search over all ground instantiations of the library
/// templates, returning a shortest plan satisfying check_goal, nullopt when
/// no plan exists within `depth_bound`. Ties break by lexicographic step
/// text. Errors with SearchSpaceTooLarge when `node_cap` states are generated.
Result<std::optional<std::vector<PlanStep>>> oracle_plan(
    const EnvironmentState& env, const TargetState& target, const MotionLibrary& library,
    int depth_bound, std::size_t node_cap = kDefaultOracleNodeCap);

}  // namespace foon
