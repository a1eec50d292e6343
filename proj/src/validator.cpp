#include "foon/validator.hpp"

#include <algorithm>

namespace foon {

std::string_view diagnosis_kind_name(DiagnosisKind kind) {
  switch (kind) {
    case DiagnosisKind::Infeasible: return "infeasible";
    case DiagnosisKind::UnknownObject: return "unknown-object";
    case DiagnosisKind::UnknownMotion: return "unknown-motion";
    case DiagnosisKind::BindingError: return "binding-error";
  }
  return "infeasible";
}

namespace {

std::string display_status(const std::set<std::string>& status) {
  if (status.empty()) return "none";
  std::string out;
  for (const auto& token : status) {
    if (!out.empty()) out += ", ";
    out += token;
  }
  return out;
}

std::string display_contents(const std::vector<std::string>& contents) {
  if (contents.empty()) return "empty";
  std::vector<std::string> sorted(contents);
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& name : sorted) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

std::string display_holding(const std::optional<std::string>& holding) {
  return holding ? *holding : "none";
}

// True when placing `moved` at a location anchored on `anchor` would close a
// containment/support cycle (anchor is, or sits transitively inside/on, moved).
bool creates_cycle(const EnvironmentState& env, const std::string& moved,
                   const std::string& anchor) {
  if (moved == anchor) return true;
  std::set<std::string> seen;
  const ObjectState* cur = env.find(anchor);
  while (cur != nullptr && cur->place.has_referent()) {
    if (!seen.insert(cur->name).second) break;
    if (cur->place.referent() == moved) return true;
    cur = env.find(cur->place.referent());
  }
  return false;
}

class ActionChecker {
 public:
  ActionChecker(const EnvironmentState& env, const FunctionalUnit& unit)
      : env_(env), unit_(unit) {}

  std::optional<Diagnosis> run() {
    check_bound_objects();
    for (const GroundAttr& condition : unit_.inputs) check_condition(condition);
    for (const GroundAttr& effect : unit_.outputs) check_effect_structure(effect);

    if (!unknowns_.empty()) {
      Diagnosis diag;
      diag.step_text = unit_.step_text;
      diag.kind = DiagnosisKind::UnknownObject;
      diag.detail = "unknown object '" + unknowns_.front() + "'";
      return diag;
    }
    if (!mismatches_.empty()) {
      Diagnosis diag;
      diag.step_text = unit_.step_text;
      diag.kind = DiagnosisKind::Infeasible;
      diag.mismatches = std::move(mismatches_);
      return diag;
    }
    return std::nullopt;
  }

 private:
  void note_unknown(const std::string& name) {
    if (std::find(unknowns_.begin(), unknowns_.end(), name) == unknowns_.end()) {
      unknowns_.push_back(name);
    }
  }

  void note_mismatch(Mismatch m) {
    if (std::find(mismatches_.begin(), mismatches_.end(), m) == mismatches_.end()) {
      mismatches_.push_back(std::move(m));
    }
  }

  // Every object-kind binding must name an object present in the environment.
  void check_bound_objects() {
    for (const auto& [slot, token] : unit_.bindings) {
      if (parse_hand_token(token) || parse_location(token)) continue;
      if (env_.find(token) == nullptr) note_unknown(token);
    }
  }

  void check_condition(const GroundAttr& condition) {
    std::vector<const ObjectState*> subjects;
    if (condition.subject.kind == SubjectRef::Kind::HandRef) {
      check_hand_condition(condition);
      return;
    }
    if (condition.subject.kind == SubjectRef::Kind::ContentsOf) {
      const ObjectState* container = env_.find(condition.subject.name);
      if (container == nullptr) {
        note_unknown(condition.subject.name);
        return;
      }
      for (const std::string& content : container->contents) {
        if (const ObjectState* obj = env_.find(content)) subjects.push_back(obj);
      }
    } else {
      const ObjectState* obj = env_.find(condition.subject.name);
      if (obj == nullptr) {
        note_unknown(condition.subject.name);
        return;
      }
      subjects.push_back(obj);
    }

    for (const ObjectState* obj : subjects) {
      if (condition.key == "place") {
        const auto& alts = condition.value.locations;
        if (std::find(alts.begin(), alts.end(), obj->place) == alts.end()) {
          note_mismatch({obj->name, "place", condition.value.display(), to_string(obj->place)});
        }
      } else if (condition.key == "category") {
        bool matched = false;
        for (const auto& token : condition.value.tokens) {
          if (iequals(token, category_name(obj->category))) matched = true;
        }
        if (!matched) {
          note_mismatch({obj->name, "category", condition.value.display(),
                         std::string(category_name(obj->category))});
        }
      } else if (condition.key == "status") {
        bool matched = false;
        for (const auto& token : condition.value.tokens) {
          if (obj->status.count(token) != 0) matched = true;
        }
        if (!matched) {
          note_mismatch(
              {obj->name, "status", condition.value.display(), display_status(obj->status)});
        }
      } else if (condition.key == "contents") {
        const bool want_nonempty = condition.value.kind == ValueExpr::Kind::NonEmpty;
        const bool is_nonempty = !obj->contents.empty();
        if (want_nonempty != is_nonempty) {
          note_mismatch({obj->name, "contents", want_nonempty ? "nonempty" : "empty",
                         is_nonempty ? "nonempty" : "empty"});
        }
      }
    }
  }

  void check_hand_condition(const GroundAttr& condition) {
    const HandState& hand = env_.hand(condition.subject.hand);
    if (condition.key != "holding") return;
    if (condition.value.kind == ValueExpr::Kind::None) {
      if (hand.holding) {
        note_mismatch({hand_id(hand.hand), "holding", "none", *hand.holding});
      }
      return;
    }
    bool matched = false;
    for (const auto& token : condition.value.tokens) {
      if (hand.holding && *hand.holding == token) matched = true;
    }
    if (!matched) {
      note_mismatch({hand_id(hand.hand), "holding", condition.value.display(),
                     display_holding(hand.holding)});
    }
  }

  // Structural feasibility of the effects: location referents must exist,
  // In() targets must be containers or machines, and no move may create a
  // containment cycle or pour a container into itself.
  void check_effect_structure(const GroundAttr& effect) {
    if (effect.key == "holding") {
      if (effect.value.kind == ValueExpr::Kind::Tokens) {
        for (const auto& token : effect.value.tokens) {
          if (env_.find(token) == nullptr) note_unknown(token);
        }
      }
      return;
    }
    if (effect.key != "place" || effect.value.locations.empty()) return;
    const Location& dest = effect.value.locations.front();
    if (!dest.has_referent()) return;

    const ObjectState* ref = env_.find(dest.referent());
    if (ref == nullptr) {
      note_unknown(dest.referent());
      return;
    }
    if (dest.kind() == Location::Kind::In && ref->category != Category::Container &&
        ref->category != Category::Machine) {
      note_mismatch({ref->name, "category", "container|machine",
                     std::string(category_name(ref->category))});
    }

    std::vector<std::string> moved;
    if (effect.subject.kind == SubjectRef::Kind::ContentsOf) {
      if (dest.referent() == effect.subject.name) {
        note_mismatch({effect.subject.name, "place",
                       "a destination other than " + effect.subject.name,
                       to_string(dest)});
        return;
      }
      if (const ObjectState* container = env_.find(effect.subject.name)) {
        moved = container->contents;
      }
    } else if (effect.subject.kind == SubjectRef::Kind::Object) {
      moved.push_back(effect.subject.name);
    }
    for (const std::string& name : moved) {
      if (creates_cycle(env_, name, dest.referent())) {
        const ObjectState* obj = env_.find(name);
        note_mismatch({name, "place", to_string(dest) + " without a containment cycle",
                       obj != nullptr ? to_string(obj->place) : "unknown"});
      }
    }
  }

  const EnvironmentState& env_;
  const FunctionalUnit& unit_;
  std::vector<std::string> unknowns_;
  std::vector<Mismatch> mismatches_;
};

Result<bool> move_object(EnvironmentState& env, const std::string& name,
                         const Location& destination) {
  auto it = env.objects.find(name);
  if (it == env.objects.end()) {
    return Error{ErrorCode::InvariantViolation, "effect moves missing object '" + name + "'"};
  }
  ObjectState& obj = it->second;

  if (obj.place.kind() == Location::Kind::In) {
    auto old_it = env.objects.find(obj.place.referent());
    if (old_it != env.objects.end() && old_it->second.category == Category::Container) {
      auto& contents = old_it->second.contents;
      contents.erase(std::remove(contents.begin(), contents.end(), name), contents.end());
    }
  }

  obj.place = destination;

  if (destination.kind() == Location::Kind::In) {
    auto dest_it = env.objects.find(destination.referent());
    if (dest_it == env.objects.end()) {
      return Error{ErrorCode::InvariantViolation,
                   "effect places '" + name + "' in missing object '" + destination.referent() +
                       "'"};
    }
    if (dest_it->second.category == Category::Container) {
      auto& contents = dest_it->second.contents;
      if (std::find(contents.begin(), contents.end(), name) == contents.end()) {
        contents.push_back(name);
      }
    }
  }
  return true;
}

std::string join_step_text(const PlanStep& step) {
  std::string out = trim(step.motion);
  for (const auto& arg : step.args) out += " | " + trim(arg);
  return out;
}

}  // namespace

std::optional<Diagnosis> check_action(const EnvironmentState& env, const FunctionalUnit& unit) {
  return ActionChecker(env, unit).run();
}

Result<EnvironmentState> apply_action(const EnvironmentState& env, const FunctionalUnit& unit) {
  EnvironmentState out = env;
  for (const GroundAttr& effect : unit.outputs) {
    std::vector<std::string> subjects;
    if (effect.subject.kind == SubjectRef::Kind::HandRef) {
      if (effect.key == "holding") {
        HandState& hand = out.hand(effect.subject.hand);
        if (effect.value.kind == ValueExpr::Kind::None) {
          hand.holding.reset();
        } else if (!effect.value.tokens.empty()) {
          hand.holding = effect.value.tokens.front();
        }
      }
      continue;
    }
    if (effect.subject.kind == SubjectRef::Kind::ContentsOf) {
      const ObjectState* container = out.find(effect.subject.name);
      if (container == nullptr) {
        return Error{ErrorCode::InvariantViolation,
                     "effect expands contents of missing object '" + effect.subject.name + "'"};
      }
      subjects = container->contents;  // snapshot before mutation
    } else {
      subjects.push_back(effect.subject.name);
    }

    for (const std::string& name : subjects) {
      if (effect.key == "place") {
        if (effect.value.locations.empty()) {
          return Error{ErrorCode::InvariantViolation, "place effect without a location"};
        }
        auto moved = move_object(out, name, effect.value.locations.front());
        if (!moved) return moved.error();
      } else if (effect.key == "status") {
        auto it = out.objects.find(name);
        if (it == out.objects.end()) {
          return Error{ErrorCode::InvariantViolation,
                       "effect touches missing object '" + name + "'"};
        }
        for (const auto& token : effect.value.tokens) it->second.status.insert(token);
      }
    }
  }

  if (auto err = audit_environment(out)) {
    return Error{ErrorCode::InvariantViolation, "effects broke state invariants: " + err->message};
  }
  return out;
}

PlanOutcome validate_plan(const EnvironmentState& env, const std::vector<PlanStep>& steps,
                          const MotionLibrary& library) {
  TaskGraph fragment;
  EnvironmentState current = env;

  for (size_t i = 0; i < steps.size(); ++i) {
    auto unit = instantiate(library, steps[i]);
    if (!unit) {
      Diagnosis diag;
      diag.step_index = static_cast<int>(i);
      diag.step_text = join_step_text(steps[i]);
      diag.kind = unit.error().code == ErrorCode::UnknownMotion ? DiagnosisKind::UnknownMotion
                                                                : DiagnosisKind::BindingError;
      diag.detail = unit.error().message;
      return PlanFailure{std::move(diag), std::move(current), std::move(fragment)};
    }

    if (auto diag = check_action(current, unit.value())) {
      diag->step_index = static_cast<int>(i);
      return PlanFailure{std::move(*diag), std::move(current), std::move(fragment)};
    }

    auto next = apply_action(current, unit.value());
    if (!next) {
      Diagnosis diag;
      diag.step_index = static_cast<int>(i);
      diag.step_text = unit.value().step_text;
      diag.kind = DiagnosisKind::BindingError;
      diag.detail = next.error().message;
      return PlanFailure{std::move(diag), std::move(current), std::move(fragment)};
    }

    fragment = append_unit(fragment, unit.value(), current, next.value());
    current = std::move(next).value();
  }
  return PlanSuccess{std::move(fragment), std::move(current)};
}

GoalReport check_goal(const EnvironmentState& env, const TargetState& target) {
  GoalReport report;
  for (const TargetObjectNode& node : target.targets) {
    const ObjectState* obj = env.find(node.name);
    if (obj == nullptr) {
      report.unmet.push_back({node.name, "existence", "present", "absent"});
      continue;
    }
    if (node.category && *node.category != obj->category) {
      report.unmet.push_back({node.name, "category", std::string(category_name(*node.category)),
                              std::string(category_name(obj->category))});
    }
    if (node.place && *node.place != obj->place) {
      report.unmet.push_back({node.name, "place", to_string(*node.place), to_string(obj->place)});
    }
    if (node.status) {
      for (const std::string& token : *node.status) {
        if (obj->status.count(token) == 0) {
          report.unmet.push_back({node.name, "status", token, display_status(obj->status)});
        }
      }
    }
    if (node.contents) {
      std::vector<std::string> required(*node.contents);
      std::vector<std::string> actual(obj->contents);
      std::sort(required.begin(), required.end());
      std::sort(actual.begin(), actual.end());
      if (required != actual) {
        report.unmet.push_back(
            {node.name, "contents", display_contents(required), display_contents(actual)});
      }
    }
  }
  report.satisfied = report.unmet.empty();
  return report;
}

Result<EnvironmentState> replay(const TaskGraph& graph, const EnvironmentState& initial) {
  EnvironmentState current = initial;
  for (size_t i = 0; i < graph.units.size(); ++i) {
    const FunctionalUnit& unit = graph.units[i];
    if (auto diag = check_action(current, unit)) {
      return Error{ErrorCode::InvariantViolation,
                   "replay: unit " + std::to_string(i) + " ('" + unit.step_text +
                       "') is infeasible"};
    }
    auto next = apply_action(current, unit);
    if (!next) return next.error();
    current = std::move(next).value();
  }
  return current;
}

}  // namespace foon
