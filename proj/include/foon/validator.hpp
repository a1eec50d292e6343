#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "foon/core.hpp"
#include "foon/graph.hpp"
#include "foon/motion.hpp"

namespace foon {

/// One attribute-level disagreement between a required condition and the
/// environment object node.
struct Mismatch {
  std::string subject;    // object name or hand id
  std::string attribute;  // place | holding | status | category | contents | existence
  std::string required;
  std::string actual;

  friend bool operator==(const Mismatch&, const Mismatch&) = default;
};

enum class DiagnosisKind { Infeasible, UnknownObject, UnknownMotion, BindingError };

std::string_view diagnosis_kind_name(DiagnosisKind kind);

/// Why a plan step was rejected. Infeasible diagnoses carry every mismatched
/// attribute; the other kinds carry a detail message instead.
struct Diagnosis {
  int step_index = 0;
  std::string step_text;
  DiagnosisKind kind = DiagnosisKind::Infeasible;
  std::vector<Mismatch> mismatches;
  std::string detail;

  friend bool operator==(const Diagnosis&, const Diagnosis&) = default;
};

struct GoalReport {
  bool satisfied = true;
  std::vector<Mismatch> unmet;

  friend bool operator==(const GoalReport&, const GoalReport&) = default;
};

/// Compares the unit's input conditions against the environment. Returns
/// nullopt when every specified attribute matches (unspecified attributes are
/// wildcards); otherwise a diagnosis listing all mismatches.
std::optional<Diagnosis> check_action(const EnvironmentState& env, const FunctionalUnit& unit);

/// Applies the unit's output effects, producing a new state. Container
/// contents and hand-object duality are re-established; a state that cannot
/// be made consistent signals a broken template via InvariantViolation.
Result<EnvironmentState> apply_action(const EnvironmentState& env, const FunctionalUnit& unit);

struct PlanSuccess {
  TaskGraph fragment;
  EnvironmentState final_env;
};

struct PlanFailure {
  Diagnosis diagnosis;
  EnvironmentState env_at_failure;
  TaskGraph validated_prefix;
};

using PlanOutcome = std::variant<PlanSuccess, PlanFailure>;

/// Folds instantiate -> check_action -> apply_action over the steps in order,
/// building the graph fragment. Stops at the first failure, keeping the
/// validated prefix.
PlanOutcome validate_plan(const EnvironmentState& env, const std::vector<PlanStep>& steps,
                          const MotionLibrary& library);

/// Checks every target node against the environment. Specified attributes
/// must match exactly; status uses subset semantics; target names absent from
/// the environment surface as unmet entries.
GoalReport check_goal(const EnvironmentState& env, const TargetState& target);

/// Re-applies the graph's units from `initial`, re-checking each step.
Result<EnvironmentState> replay(const TaskGraph& graph, const EnvironmentState& initial);

}  // namespace foon
