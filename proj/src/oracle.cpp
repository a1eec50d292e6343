#include <deque>
#include <unordered_set>

#include "foon/orchestrator.hpp"

namespace foon {

namespace {

// ---------------------------------------------------------------------------
// State hashing
// ---------------------------------------------------------------------------

struct StateHash {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  friend bool operator==(const StateHash&, const StateHash&) = default;
};

struct StateHashHasher {
  size_t operator()(const StateHash& h) const noexcept {
    return static_cast<size_t>(h.a ^ (h.b * 0x9E3779B97F4A7C15ull));
  }
};

std::uint64_t fnv1a(const std::string& text, std::uint64_t seed) {
  std::uint64_t hash = seed;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

StateHash hash_state(const EnvironmentState& env) {
  std::string key;
  key.reserve(256);
  for (const auto& [name, obj] : env.objects) {
    key += name;
    key += '\x1f';
    key += static_cast<char>('0' + static_cast<int>(obj.category));
    key += to_string(obj.place);
    key += '\x1f';
    for (const auto& token : obj.status) {
      key += token;
      key += ',';
    }
    key += '\x1f';
    for (const auto& content : obj.contents) {
      key += content;
      key += ',';
    }
    key += '\x1e';
  }
  key += env.left.holding ? *env.left.holding : std::string("-");
  key += '\x1f';
  key += env.right.holding ? *env.right.holding : std::string("-");
  return {fnv1a(key, 14695981039346656037ull), fnv1a(key, 0x51ED270B9A3E11C7ull)};
}

// ---------------------------------------------------------------------------
// Pruned candidate enumeration
// ---------------------------------------------------------------------------

struct BoundValue {
  SlotKind kind = SlotKind::Object;
  std::string name;  // object slots
  Hand hand = Hand::Right;
  Location location;
};

struct EnumerationPlan {
  const FunctionalUnitTemplate* tmpl = nullptr;
  // input conditions grouped by the highest signature index they reference
  std::vector<std::vector<const AttrTemplate*>> conditions_at;
  // location slot -> index of the object slot whose current place it must equal
  std::map<size_t, size_t> restricted_location;
};

int slot_index(const FunctionalUnitTemplate& tmpl, std::string_view name) {
  std::string stripped(name);
  if (!stripped.empty() && stripped.front() == '?') stripped.erase(stripped.begin());
  for (size_t i = 0; i < tmpl.signature.size(); ++i) {
    if (tmpl.signature[i].name == stripped) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> value_slot_refs(const std::string& value) {
  std::vector<std::string> refs;
  for (const std::string& raw : [&] {
         std::vector<std::string> parts;
         std::string current;
         for (char c : value) {
           if (c == '|') {
             parts.push_back(trim(current));
             current.clear();
           } else {
             current += c;
           }
         }
         parts.push_back(trim(current));
         return parts;
       }()) {
    std::string inner = raw;
    if ((raw.rfind("In(", 0) == 0 || raw.rfind("On(", 0) == 0) && raw.back() == ')') {
      inner = trim(std::string_view(raw).substr(3, raw.size() - 4));
    } else if (raw.rfind("InHand(", 0) == 0 && raw.back() == ')') {
      inner = trim(std::string_view(raw).substr(7, raw.size() - 8));
    }
    if (!inner.empty() && inner.front() == '?') refs.push_back(inner.substr(1));
  }
  return refs;
}

EnumerationPlan make_enumeration_plan(const FunctionalUnitTemplate& tmpl) {
  EnumerationPlan plan;
  plan.tmpl = &tmpl;
  plan.conditions_at.resize(tmpl.signature.size());
  for (const AttrTemplate& cond : tmpl.inputs) {
    std::string subject = trim(cond.subject);
    if (subject.rfind("contents(", 0) == 0 && subject.back() == ')') {
      subject = trim(std::string_view(subject).substr(9, subject.size() - 10));
    }
    int last = slot_index(tmpl, subject);
    for (const std::string& ref : value_slot_refs(cond.value)) {
      last = std::max(last, slot_index(tmpl, ref));
    }
    if (last < 0) last = 0;
    plan.conditions_at[last].push_back(&cond);

    // "object ?o sits at ?L": the only location satisfying it is o's place.
    if (cond.key == "place" && !cond.value.empty() && cond.value.front() == '?') {
      const int loc = slot_index(tmpl, cond.value);
      const int obj = slot_index(tmpl, subject);
      if (loc >= 0 && obj >= 0 && obj < loc &&
          tmpl.signature[loc].kind == SlotKind::LocationSlot &&
          tmpl.signature[obj].kind == SlotKind::Object) {
        plan.restricted_location[static_cast<size_t>(loc)] = static_cast<size_t>(obj);
      }
    }
  }
  return plan;
}

// Conservative partial-condition check: returns false only when the condition
// is definitely violated; unknown forms pass through to check_action.
bool condition_may_hold(const EnvironmentState& env, const EnumerationPlan& plan,
                        const AttrTemplate& cond, const std::vector<BoundValue>& bound,
                        const std::vector<std::string>& cut_surfaces) {
  const FunctionalUnitTemplate& tmpl = *plan.tmpl;

  std::string subject = trim(cond.subject);
  bool contents_of = false;
  if (subject.rfind("contents(", 0) == 0 && subject.back() == ')') {
    contents_of = true;
    subject = trim(std::string_view(subject).substr(9, subject.size() - 10));
  }
  const int subject_idx = slot_index(tmpl, subject);
  if (subject_idx < 0) return true;
  const BoundValue& subject_value = bound[subject_idx];

  if (subject_value.kind == SlotKind::HandSlot) {
    if (cond.key != "holding") return true;
    const HandState& hand = env.hand(subject_value.hand);
    const std::string value = trim(cond.value);
    if (iequals(value, "none")) return !hand.holding.has_value();
    if (!value.empty() && value.front() == '?') {
      const int ref = slot_index(tmpl, value);
      if (ref < 0) return true;
      return hand.holding && *hand.holding == bound[ref].name;
    }
    return hand.holding && *hand.holding == value;
  }

  const ObjectState* obj = env.find(subject_value.name);
  if (obj == nullptr) return false;
  std::vector<const ObjectState*> subjects;
  if (contents_of) {
    for (const std::string& content : obj->contents) {
      if (const ObjectState* member = env.find(content)) subjects.push_back(member);
    }
  } else {
    subjects.push_back(obj);
  }

  for (const ObjectState* s : subjects) {
    bool ok = false;
    if (cond.key == "place") {
      std::string current;
      std::vector<std::string> alts;
      for (char c : cond.value) {
        if (c == '|') {
          alts.push_back(trim(current));
          current.clear();
        } else {
          current += c;
        }
      }
      alts.push_back(trim(current));
      for (const std::string& alt : alts) {
        if (alt == "CutSurface") {
          for (const std::string& surface : cut_surfaces) {
            if (s->place == Location::on(surface) || s->place == Location::in(surface)) ok = true;
          }
        } else if (!alt.empty() && alt.front() == '?') {
          const int ref = slot_index(tmpl, alt);
          if (ref < 0 || s->place == bound[ref].location) ok = true;
        } else if ((alt.rfind("In(", 0) == 0 || alt.rfind("On(", 0) == 0) && alt.back() == ')') {
          const std::string inner = trim(std::string_view(alt).substr(3, alt.size() - 4));
          if (!inner.empty() && inner.front() == '?') {
            const int ref = slot_index(tmpl, inner);
            if (ref < 0) {
              ok = true;
            } else {
              const Location want = alt.rfind("In(", 0) == 0
                                        ? Location::in(bound[ref].name)
                                        : Location::on(bound[ref].name);
              if (s->place == want) ok = true;
            }
          } else if (auto loc = parse_location(alt); loc && s->place == *loc) {
            ok = true;
          }
        } else if (auto loc = parse_location(alt); !loc || s->place == *loc) {
          ok = true;  // unparseable forms pass through
        }
      }
    } else if (cond.key == "category") {
      std::string current;
      for (char c : cond.value) {
        if (c == '|') {
          if (iequals(trim(current), category_name(s->category))) ok = true;
          current.clear();
        } else {
          current += c;
        }
      }
      if (iequals(trim(current), category_name(s->category))) ok = true;
    } else if (cond.key == "status") {
      std::string current;
      for (char c : cond.value) {
        if (c == '|') {
          if (s->status.count(trim(current)) != 0) ok = true;
          current.clear();
        } else {
          current += c;
        }
      }
      if (s->status.count(trim(current)) != 0) ok = true;
    } else if (cond.key == "contents") {
      ok = iequals(trim(cond.value), "nonempty") ? !s->contents.empty() : s->contents.empty();
    } else {
      ok = true;
    }
    if (!ok) return false;
  }
  return true;
}

void enumerate_template(const EnvironmentState& env, const EnumerationPlan& plan,
                        const std::vector<Location>& base_locations,
                        const std::vector<std::string>& cut_surfaces,
                        std::vector<PlanStep>& out) {
  const FunctionalUnitTemplate& tmpl = *plan.tmpl;
  std::vector<BoundValue> bound(tmpl.signature.size());

  std::vector<std::string> object_names;
  object_names.reserve(env.objects.size());
  for (const auto& [name, obj] : env.objects) object_names.push_back(name);

  auto conditions_hold = [&](size_t idx) {
    for (const AttrTemplate* cond : plan.conditions_at[idx]) {
      if (!condition_may_hold(env, plan, *cond, bound, cut_surfaces)) return false;
    }
    return true;
  };

  auto emit = [&] {
    PlanStep step;
    step.motion = tmpl.motion;
    for (size_t i = 0; i < bound.size(); ++i) {
      switch (bound[i].kind) {
        case SlotKind::Object: step.args.push_back(bound[i].name); break;
        case SlotKind::HandSlot: step.args.push_back(hand_token(bound[i].hand)); break;
        case SlotKind::LocationSlot: step.args.push_back(to_string(bound[i].location)); break;
      }
    }
    out.push_back(std::move(step));
  };

  auto recurse = [&](auto&& self, size_t idx) -> void {
    if (idx == tmpl.signature.size()) {
      emit();
      return;
    }
    const VariableSlot& slot = tmpl.signature[idx];
    bound[idx].kind = slot.kind;
    switch (slot.kind) {
      case SlotKind::Object:
        for (const std::string& name : object_names) {
          bound[idx].name = name;
          if (conditions_hold(idx)) self(self, idx + 1);
        }
        break;
      case SlotKind::HandSlot:
        for (Hand hand : {Hand::Left, Hand::Right}) {
          bound[idx].hand = hand;
          if (conditions_hold(idx)) self(self, idx + 1);
        }
        break;
      case SlotKind::LocationSlot: {
        auto restricted = plan.restricted_location.find(idx);
        if (restricted != plan.restricted_location.end()) {
          const ObjectState* obj = env.find(bound[restricted->second].name);
          if (obj == nullptr || obj->place.kind() == Location::Kind::InHand) break;
          bound[idx].location = obj->place;
          if (conditions_hold(idx)) self(self, idx + 1);
          break;
        }
        for (const Location& location : base_locations) {
          bound[idx].location = location;
          if (conditions_hold(idx)) self(self, idx + 1);
        }
        break;
      }
    }
  };
  recurse(recurse, 0);
}

std::vector<PlanStep> enumerate_feasible_candidates(const EnvironmentState& env,
                                                    const MotionLibrary& library,
                                                    const std::vector<EnumerationPlan>& plans) {
  std::vector<Location> base_locations = {Location::left_storage(), Location::right_storage(),
                                          Location::workspace()};
  for (const auto& [name, obj] : env.objects) {
    base_locations.push_back(Location::on(name));
    if (obj.category == Category::Container || obj.category == Category::Machine) {
      base_locations.push_back(Location::in(name));
    }
  }

  std::vector<PlanStep> candidates;
  for (const EnumerationPlan& plan : plans) {
    enumerate_template(env, plan, base_locations, library.cut_surfaces(), candidates);
  }
  std::sort(candidates.begin(), candidates.end(), [](const PlanStep& a, const PlanStep& b) {
    return print_plan_line(a) < print_plan_line(b);
  });
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  return candidates;
}

struct SearchRecord {
  int parent = -1;
  PlanStep step;
  EnvironmentState env;
  int depth = 0;
};

}  // namespace

Result<std::optional<std::vector<PlanStep>>> oracle_plan(const EnvironmentState& env,
                                                         const TargetState& target,
                                                         const MotionLibrary& library,
                                                         int depth_bound,
                                                         std::size_t node_cap) {
  if (depth_bound < 1) {
    return Error{ErrorCode::InvariantViolation, "oracle depth bound must be at least 1"};
  }
  if (check_goal(env, target).satisfied) {
    return std::optional<std::vector<PlanStep>>(std::vector<PlanStep>{});
  }

  std::vector<EnumerationPlan> plans;
  plans.reserve(library.templates().size());
  for (const FunctionalUnitTemplate& tmpl : library.templates()) {
    plans.push_back(make_enumeration_plan(tmpl));
  }

  std::vector<SearchRecord> records;
  records.push_back({-1, PlanStep{}, env, 0});
  std::unordered_set<StateHash, StateHashHasher> visited;
  visited.insert(hash_state(env));
  std::deque<int> frontier;
  frontier.push_back(0);

  auto reconstruct = [&](int index) {
    std::vector<PlanStep> steps;
    for (int i = index; i > 0; i = records[i].parent) steps.push_back(records[i].step);
    std::reverse(steps.begin(), steps.end());
    return steps;
  };

  while (!frontier.empty()) {
    const int index = frontier.front();
    frontier.pop_front();
    if (records[index].depth >= depth_bound) continue;
    const EnvironmentState current = std::move(records[index].env);
    records[index].env = EnvironmentState{};  // drop expanded states to bound memory

    for (const PlanStep& step : enumerate_feasible_candidates(current, library, plans)) {
      auto unit = instantiate(library, step);
      if (!unit) continue;
      if (check_action(current, unit.value())) continue;
      auto next = apply_action(current, unit.value());
      if (!next) continue;

      const StateHash hash = hash_state(next.value());
      if (!visited.insert(hash).second) continue;
      if (visited.size() > node_cap) {
        return Error{ErrorCode::SearchSpaceTooLarge,
                     "oracle search exceeded " + std::to_string(node_cap) + " states"};
      }
      const bool satisfied = check_goal(next.value(), target).satisfied;
      records.push_back(
          {index, step, std::move(next).value(), records[index].depth + 1});
      if (satisfied) {
        return std::optional<std::vector<PlanStep>>(
            reconstruct(static_cast<int>(records.size()) - 1));
      }
      frontier.push_back(static_cast<int>(records.size()) - 1);
    }
  }
  return std::optional<std::vector<PlanStep>>(std::nullopt);
}

}  // namespace foon
