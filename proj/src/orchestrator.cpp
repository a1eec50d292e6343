#include "foon/orchestrator.hpp"

#include <algorithm>
#include <sstream>

namespace foon {

// ---------------------------------------------------------------------------
// Prompt assembly
// ---------------------------------------------------------------------------

namespace {

std::string allowed_actions_line(const MotionLibrary& library) {
  std::string out = "Allowed actions:";
  bool first = true;
  for (const auto& tmpl : library.templates()) {
    out += first ? " " : ", ";
    out += tmpl.motion;
    first = false;
  }
  return out;
}

std::string action_signatures(const MotionLibrary& library) {
  std::string out;
  for (const auto& tmpl : library.templates()) {
    out += "  " + tmpl.motion;
    for (const auto& slot : tmpl.signature) out += " | ?" + slot.name;
    out += "\n";
  }
  return out;
}

constexpr std::string_view kAttributeSchema =
    "Object node attributes: category (ingredient | container | tool | machine), "
    "place (Right storage | Left storage | Workspace | In(object) | On(object)), "
    "status (tokens such as raw, chopped, mixed, cooked, empty, on, off), "
    "contents (names of the objects inside a container).";

std::string fenced_json(std::string_view body) {
  std::string out = "```json\n";
  out += body;
  if (out.back() != '\n') out += "\n";
  out += "```\n";
  return out;
}

}  // namespace

PromptMessages build_target_prompt(const SceneRecord& scene, const MotionLibrary& library) {
  PromptMessage system;
  system.role = "system";
  system.content =
      "You are the task planner of a dual-arm cooking robot. You watch one scene of a "
      "cooking video and estimate the target object node: the state every affected object "
      "must reach by the end of the scene.\n"
      "\n"
      "Task: decide whether the scene shows a cooking action, and if so, estimate the "
      "target object node states.\n"
      "\n"
      "Think step by step:\n"
      "1. Read the subtitles and look at the images.\n"
      "2. Decide whether a cooking action happens in this scene.\n"
      "3. Identify the objects the action affects.\n"
      "4. For each object, determine the attributes the scene fixes: category, place, "
      "status, contents. Leave unknown attributes out.\n"
      "\n"
      "Constraints:\n"
      "- Respond with a single JSON object and nothing else.\n"
      "- Cooking scene: {\"targets\": [{\"name\": \"...\", \"category\": \"...\", "
      "\"place\": \"...\", \"status\": [\"...\"], \"contents\": [\"...\"]}]}. Omit "
      "attributes you cannot infer.\n"
      "- Categories are exactly: ingredient, container, tool, machine.\n"
      "- Scene with no cooking action (title card, commentary, tasting): "
      "{\"unnecessary\": true}.\n";

  PromptMessage user;
  user.role = "user";
  std::string content;
  content += std::string(kScenePrefix) + std::to_string(scene.scene_id) + "\n";
  content += allowed_actions_line(library) + "\n";
  content += std::string(kAttributeSchema) + "\n";
  content += "\n";
  content +=
      "Example (scene showing onions being diced):\n"
      "{\"targets\": [{\"name\": \"Onion\", \"category\": \"ingredient\", "
      "\"status\": [\"chopped\"]}]}\n"
      "Example (channel introduction):\n"
      "{\"unnecessary\": true}\n";
  content += "\n";
  content += "Subtitles:\n" + scene.text + "\n";
  if (!scene.image_refs.empty()) {
    content += "\nScene images are attached.\n";
    user.image_refs = scene.image_refs;
  }
  user.content = std::move(content);
  return {std::move(system), std::move(user)};
}

PromptMessages build_action_prompt(const EnvironmentState& env, const TargetState& target,
                                   const std::optional<std::string>& feedback,
                                   const MotionLibrary& library) {
  PromptMessage system;
  system.role = "system";
  system.content =
      "You are the task planner of a dual-arm cooking robot. You turn a target object "
      "node into a sequence of robot actions that is executable in the local "
      "environment.\n"
      "\n"
      "Task: produce an action sequence that transitions the environment object node "
      "states to the target object node states.\n"
      "\n"
      "Think step by step:\n"
      "1. Compare every target attribute with the current environment.\n"
      "2. Choose allowed actions that close each difference, in executable order.\n"
      "3. Re-check each action's preconditions against the environment as it evolves; "
      "insert any preparatory actions the video omitted.\n"
      "\n"
      "Constraints:\n"
      "- Respond with a single JSON object and nothing else: "
      "{\"plan\": [\"Motion | arg | arg | arg\", ...]}.\n"
      "- Use only the allowed actions, with their exact argument order:\n" +
      action_signatures(library) +
      "- Hands are \"Right hand\" and \"Left hand\". Locations are \"Right storage\", "
      "\"Left storage\", \"Workspace\", \"In(object)\" or \"On(object)\".\n";

  PromptMessage user;
  user.role = "user";
  std::string content;
  content += std::string(kScenePrefix) + std::to_string(target.scene_id) + "\n";
  content += std::string(kEnvironmentMarker) + "\n";
  content += fenced_json(serialize_environment(env));
  content += std::string(kTargetMarker) + "\n";
  content += fenced_json(serialize_targets({target}));
  if (feedback && !feedback->empty()) {
    content += "\n" + std::string(kFeedbackMarker) + "\n" + *feedback + "\n";
  }
  user.content = std::move(content);
  return {std::move(system), std::move(user)};
}

// ---------------------------------------------------------------------------
// Feedback rendering
// ---------------------------------------------------------------------------

std::string render_feedback(const Diagnosis& diagnosis) {
  std::ostringstream out;
  if (diagnosis.kind == DiagnosisKind::Infeasible) {
    bool first = true;
    for (const Mismatch& m : diagnosis.mismatches) {
      if (!first) out << "\n";
      out << "Action " << diagnosis.step_index << " '" << diagnosis.step_text
          << "' infeasible: required " << m.subject << "." << m.attribute << " = " << m.required
          << ", but actual = " << m.actual << ".";
      first = false;
    }
  } else {
    out << "Action " << diagnosis.step_index << " '" << diagnosis.step_text
        << "' invalid: " << diagnosis.detail << ".";
  }
  return out.str();
}

std::string render_feedback(const GoalReport& report) {
  std::ostringstream out;
  bool first = true;
  for (const Mismatch& m : report.unmet) {
    if (!first) out << "\n";
    const char* relation = m.attribute == "status" ? " \xE2\x8A\x87 " : " = ";
    out << "Target not reached: required " << m.subject << "." << m.attribute << relation
        << m.required << ", but actual = " << m.actual << ".";
    first = false;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Replanning loop
// ---------------------------------------------------------------------------

Result<SceneOutcome> run_scene(const EnvironmentState& env, const TargetState& target,
                               Planner& planner, const MotionLibrary& library,
                               const RunConfig& config) {
  SceneResult result;
  result.scene_id = target.scene_id;

  std::optional<std::string> feedback;
  for (int round = 1; round <= config.budget; ++round) {
    RoundRecord record;
    record.prompt = build_action_prompt(env, target, feedback, library);

    auto response = planner.complete(record.prompt);
    if (!response) return response.error();
    record.response = response.value();
    ++result.rounds_used;

    auto parsed = parse_planner_response(record.response, ResponseKind::ActionPlan);
    if (!parsed) {
      feedback = "The response could not be parsed: " + parsed.error().message +
                 ". Respond with a single JSON object of the form {\"plan\": [...]}.";
      record.feedback = *feedback;
      result.transcript.push_back(std::move(record));
      continue;
    }
    const auto& steps = std::get<ActionPlanResponse>(parsed.value()).steps;

    PlanOutcome outcome = validate_plan(env, steps, library);
    if (const auto* failure = std::get_if<PlanFailure>(&outcome)) {
      result.last_diagnosis = failure->diagnosis;
      feedback = render_feedback(failure->diagnosis);
      record.feedback = *feedback;
      result.transcript.push_back(std::move(record));
      continue;
    }
    auto& success = std::get<PlanSuccess>(outcome);

    GoalReport goal = check_goal(success.final_env, target);
    if (!goal.satisfied) {
      result.last_goal = goal;
      feedback = render_feedback(goal);
      record.feedback = *feedback;
      result.transcript.push_back(std::move(record));
      continue;
    }

    result.transcript.push_back(std::move(record));
    result.success = true;
    result.fragment = std::move(success.fragment);
    result.last_diagnosis.reset();
    result.last_goal.reset();
    return SceneOutcome{std::move(result), std::move(success.final_env)};
  }
  return SceneOutcome{std::move(result), env};
}

Result<RecipeResult> run_recipe(const EnvironmentState& env,
                                const std::vector<TargetState>& targets, Planner& planner,
                                const MotionLibrary& library, const RunConfig& config) {
  RecipeResult result;
  result.success = true;
  EnvironmentState current = env;

  for (const TargetState& target : targets) {
    auto outcome = run_scene(current, target, planner, library, config);
    if (!outcome) return outcome.error();
    SceneOutcome scene = std::move(outcome).value();
    result.total_replans += scene.result.rounds_used - 1;
    const bool scene_ok = scene.result.success;
    if (scene_ok) {
      result.graph = concat_graphs(result.graph, scene.result.fragment);
      current = std::move(scene.env);
    }
    result.scenes.push_back(std::move(scene.result));
    if (!scene_ok) {
      result.success = false;
      break;
    }
  }
  result.final_env = std::move(current);
  return result;
}

Result<RecipeResult> run_recipe_unvalidated(const EnvironmentState& env,
                                            const std::vector<TargetState>& targets,
                                            Planner& planner, const MotionLibrary& library,
                                            const RunConfig& config) {
  (void)config;  // the baseline never retries
  RecipeResult result;
  result.success = true;
  EnvironmentState current = env;

  for (const TargetState& target : targets) {
    SceneResult scene;
    scene.scene_id = target.scene_id;

    RoundRecord record;
    record.prompt = build_action_prompt(current, target, std::nullopt, library);
    auto response = planner.complete(record.prompt);
    if (!response) return response.error();
    record.response = response.value();
    scene.rounds_used = 1;

    bool all_steps_valid = true;
    auto parsed = parse_planner_response(record.response, ResponseKind::ActionPlan);
    if (!parsed) {
      record.feedback = "The response could not be parsed: " + parsed.error().message;
      all_steps_valid = false;
    } else {
      const auto& steps = std::get<ActionPlanResponse>(parsed.value()).steps;
      // Convert and append without gating; the audit records each verdict.
      for (size_t i = 0; i < steps.size(); ++i) {
        StepAudit audit;
        audit.step_index = static_cast<int>(i);
        audit.step_text = print_plan_line(steps[i]);

        auto unit = instantiate(library, steps[i]);
        if (!unit) {
          audit.valid = false;
          audit.feedback = unit.error().message;
          all_steps_valid = false;
          scene.audit.push_back(std::move(audit));
          continue;
        }
        auto diagnosis = check_action(current, unit.value());
        if (diagnosis) {
          diagnosis->step_index = static_cast<int>(i);
          audit.valid = false;
          audit.feedback = render_feedback(*diagnosis);
          all_steps_valid = false;
        }
        auto next = apply_action(current, unit.value());
        if (next) {
          scene.fragment = append_unit(scene.fragment, unit.value(), current, next.value());
          current = std::move(next).value();
        } else {
          // Effects cannot produce a consistent state; skip them.
          audit.valid = false;
          if (audit.feedback.empty()) audit.feedback = next.error().message;
          all_steps_valid = false;
        }
        scene.audit.push_back(std::move(audit));
      }
    }

    GoalReport goal = check_goal(current, target);
    scene.success = all_steps_valid && goal.satisfied;
    if (!goal.satisfied) scene.last_goal = goal;
    if (!scene.success) result.success = false;
    scene.transcript.push_back(std::move(record));
    result.graph = concat_graphs(result.graph, scene.fragment);
    result.scenes.push_back(std::move(scene));
  }
  result.final_env = std::move(current);
  return result;
}

Result<std::vector<TargetState>> estimate_targets(const std::vector<SceneRecord>& scenes,
                                                  Planner& planner, const MotionLibrary& library,
                                                  const RunConfig& config) {
  std::vector<TargetState> targets;
  for (const SceneRecord& scene : scenes) {
    PromptMessages prompt = build_target_prompt(scene, library);
    Result<PlannerResponse> parsed =
        Error{ErrorCode::NoJsonFound, "planner produced no response"};
    for (int round = 1; round <= config.budget; ++round) {
      auto response = planner.complete(prompt);
      if (!response) return response.error();
      parsed = parse_planner_response(response.value(), ResponseKind::TargetEstimate);
      if (parsed) break;
      PromptMessage retry;
      retry.role = "user";
      retry.content = "Your previous response could not be parsed: " + parsed.error().message +
                      ". Respond with a single JSON object only.";
      prompt.push_back(std::move(retry));
    }
    if (!parsed) return parsed.error();
    const auto& estimate = std::get<TargetEstimateResponse>(parsed.value());
    if (estimate.unnecessary) continue;
    TargetState target;
    target.scene_id = scene.scene_id;
    target.targets = estimate.targets;
    targets.push_back(std::move(target));
  }
  return targets;
}

}  // namespace foon
