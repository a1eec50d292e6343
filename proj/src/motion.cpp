#include "foon/motion.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace foon {

using nlohmann::json;

std::string_view slot_kind_name(SlotKind kind) {
  switch (kind) {
    case SlotKind::Object: return "object";
    case SlotKind::HandSlot: return "hand";
    case SlotKind::LocationSlot: return "location";
  }
  return "object";
}

std::optional<SlotKind> parse_slot_kind(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "object") return SlotKind::Object;
  if (t == "hand") return SlotKind::HandSlot;
  if (t == "location") return SlotKind::LocationSlot;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SubjectRef / ValueExpr
// ---------------------------------------------------------------------------

SubjectRef SubjectRef::object(std::string name) {
  SubjectRef ref;
  ref.kind = Kind::Object;
  ref.name = std::move(name);
  return ref;
}

SubjectRef SubjectRef::hand_ref(Hand hand) {
  SubjectRef ref;
  ref.kind = Kind::HandRef;
  ref.hand = hand;
  return ref;
}

SubjectRef SubjectRef::contents_of(std::string container) {
  SubjectRef ref;
  ref.kind = Kind::ContentsOf;
  ref.name = std::move(container);
  return ref;
}

std::string SubjectRef::display() const {
  switch (kind) {
    case Kind::Object: return name;
    case Kind::HandRef: return hand_id(hand);
    case Kind::ContentsOf: return "contents(" + name + ")";
  }
  return name;
}

std::optional<SubjectRef> parse_subject_ref(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  if (t == "RightHand") return SubjectRef::hand_ref(Hand::Right);
  if (t == "LeftHand") return SubjectRef::hand_ref(Hand::Left);
  if (t.rfind("contents(", 0) == 0 && t.back() == ')') {
    std::string inner = trim(std::string_view(t).substr(9, t.size() - 10));
    if (inner.empty()) return std::nullopt;
    return SubjectRef::contents_of(inner);
  }
  return SubjectRef::object(t);
}

ValueExpr ValueExpr::none() { return ValueExpr{}; }

ValueExpr ValueExpr::token(std::string token) {
  ValueExpr v;
  v.kind = Kind::Tokens;
  v.tokens.push_back(std::move(token));
  return v;
}

ValueExpr ValueExpr::token_alternatives(std::vector<std::string> tokens) {
  ValueExpr v;
  v.kind = Kind::Tokens;
  v.tokens = std::move(tokens);
  return v;
}

ValueExpr ValueExpr::location(Location location) {
  ValueExpr v;
  v.kind = Kind::Locations;
  v.locations.push_back(std::move(location));
  return v;
}

ValueExpr ValueExpr::location_alternatives(std::vector<Location> locations) {
  ValueExpr v;
  v.kind = Kind::Locations;
  v.locations = std::move(locations);
  return v;
}

ValueExpr ValueExpr::non_empty() {
  ValueExpr v;
  v.kind = Kind::NonEmpty;
  return v;
}

ValueExpr ValueExpr::empty_value() {
  ValueExpr v;
  v.kind = Kind::Empty;
  return v;
}

std::string ValueExpr::display() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::NonEmpty: return "nonempty";
    case Kind::Empty: return "empty";
    case Kind::Tokens: {
      std::string out;
      for (const auto& t : tokens) {
        if (!out.empty()) out += "|";
        out += t;
      }
      return out;
    }
    case Kind::Locations: {
      std::string out;
      for (const auto& l : locations) {
        if (!out.empty()) out += "|";
        out += to_string(l);
      }
      return out;
    }
  }
  return "none";
}

namespace {

std::vector<std::string> split_alternatives(std::string_view text) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == '|') {
      parts.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(trim(current));
  return parts;
}

}  // namespace

std::optional<ValueExpr> parse_value_expr(std::string_view text, std::string_view key) {
  const std::string t = trim(text);
  if (key == "place") {
    std::vector<Location> locations;
    for (const std::string& part : split_alternatives(t)) {
      auto loc = parse_location(part);
      if (!loc) return std::nullopt;
      locations.push_back(*loc);
    }
    if (locations.empty()) return std::nullopt;
    return ValueExpr::location_alternatives(std::move(locations));
  }
  if (key == "holding") {
    if (iequals(t, "none")) return ValueExpr::none();
    if (t.empty()) return std::nullopt;
    return ValueExpr::token(t);
  }
  if (key == "contents") {
    if (iequals(t, "nonempty")) return ValueExpr::non_empty();
    if (iequals(t, "empty")) return ValueExpr::empty_value();
    return std::nullopt;
  }
  // category / status
  std::vector<std::string> tokens = split_alternatives(t);
  for (const auto& tok : tokens) {
    if (tok.empty()) return std::nullopt;
  }
  return ValueExpr::token_alternatives(std::move(tokens));
}

// ---------------------------------------------------------------------------
// Library
// ---------------------------------------------------------------------------

Result<bool> MotionLibrary::add(FunctionalUnitTemplate tmpl) {
  const std::string key = to_lower(tmpl.motion);
  if (index_.count(key) != 0) {
    return Error{ErrorCode::DuplicateMotion, "duplicate motion '" + tmpl.motion + "'"};
  }
  index_.emplace(key, templates_.size());
  templates_.push_back(std::move(tmpl));
  return true;
}

const FunctionalUnitTemplate* MotionLibrary::find(std::string_view motion) const {
  auto it = index_.find(to_lower(trim(motion)));
  return it == index_.end() ? nullptr : &templates_[it->second];
}

std::string_view builtin_library_document() {
  static constexpr std::string_view kDocument = R"json({
  "cut_surfaces": ["Cutting board"],
  "motions": [
    {
      "motion": "Pick",
      "slots": [
        {"name": "obj", "kind": "object"},
        {"name": "hand", "kind": "hand"},
        {"name": "place", "kind": "location"}
      ],
      "inputs": [
        {"subject": "?hand", "key": "holding", "value": "none"},
        {"subject": "?obj", "key": "place", "value": "?place"},
        {"subject": "?obj", "key": "category", "value": "ingredient|container|tool"}
      ],
      "outputs": [
        {"subject": "?hand", "key": "holding", "value": "?obj"},
        {"subject": "?obj", "key": "place", "value": "InHand(?hand)"}
      ]
    },
    {
      "motion": "Place",
      "slots": [
        {"name": "obj", "kind": "object"},
        {"name": "hand", "kind": "hand"},
        {"name": "dest", "kind": "location"}
      ],
      "inputs": [
        {"subject": "?hand", "key": "holding", "value": "?obj"}
      ],
      "outputs": [
        {"subject": "?obj", "key": "place", "value": "?dest"},
        {"subject": "?hand", "key": "holding", "value": "none"}
      ]
    },
    {
      "motion": "Pour",
      "slots": [
        {"name": "src", "kind": "object"},
        {"name": "hand", "kind": "hand"},
        {"name": "dest", "kind": "object"}
      ],
      "inputs": [
        {"subject": "?hand", "key": "holding", "value": "?src"},
        {"subject": "?src", "key": "category", "value": "container"},
        {"subject": "?src", "key": "contents", "value": "nonempty"},
        {"subject": "?dest", "key": "category", "value": "container|machine"}
      ],
      "outputs": [
        {"subject": "contents(?src)", "key": "place", "value": "In(?dest)"},
        {"subject": "?src", "key": "status", "value": "empty"}
      ]
    },
    {
      "motion": "Cut",
      "slots": [
        {"name": "obj", "kind": "object"},
        {"name": "tool", "kind": "object"},
        {"name": "hand", "kind": "hand"}
      ],
      "inputs": [
        {"subject": "?hand", "key": "holding", "value": "?tool"},
        {"subject": "?tool", "key": "category", "value": "tool"},
        {"subject": "?obj", "key": "place", "value": "CutSurface"}
      ],
      "outputs": [
        {"subject": "?obj", "key": "status", "value": "chopped"}
      ]
    },
    {
      "motion": "Mix",
      "slots": [
        {"name": "container", "kind": "object"},
        {"name": "tool", "kind": "object"},
        {"name": "hand", "kind": "hand"}
      ],
      "inputs": [
        {"subject": "?hand", "key": "holding", "value": "?tool"},
        {"subject": "?container", "key": "contents", "value": "nonempty"}
      ],
      "outputs": [
        {"subject": "contents(?container)", "key": "status", "value": "mixed"}
      ]
    },
    {
      "motion": "Cook",
      "slots": [
        {"name": "container", "kind": "object"},
        {"name": "appliance", "kind": "object"}
      ],
      "inputs": [
        {"subject": "?container", "key": "place", "value": "On(?appliance)|In(?appliance)"},
        {"subject": "?appliance", "key": "category", "value": "machine"}
      ],
      "outputs": [
        {"subject": "contents(?container)", "key": "status", "value": "cooked"}
      ]
    }
  ]
})json";
  return kDocument;
}

const MotionLibrary& builtin_library() {
  static const MotionLibrary library = [] {
    auto result = load_library(builtin_library_document());
    if (!result) throw std::logic_error("builtin motion library failed to load");
    return std::move(result).value();
  }();
  return library;
}

// ---------------------------------------------------------------------------
// Template document loading
// ---------------------------------------------------------------------------

namespace {

struct TemplateValueRef {
  // slot names referenced by a template value, with the kind each use implies
  std::vector<std::pair<std::string, SlotKind>> refs;
};

std::string strip_slot_mark(std::string_view name) {
  std::string n = trim(name);
  if (!n.empty() && n.front() == '?') n.erase(n.begin());
  return n;
}

bool is_slot_ref(std::string_view text) {
  return !text.empty() && text.front() == '?';
}

const VariableSlot* find_slot(const FunctionalUnitTemplate& tmpl, std::string_view name) {
  for (const auto& slot : tmpl.signature) {
    if (slot.name == name) return &slot;
  }
  return nullptr;
}

std::optional<Error> check_slot_ref(const FunctionalUnitTemplate& tmpl, std::string_view raw,
                                    SlotKind expected, std::string_view where) {
  const std::string name = strip_slot_mark(raw);
  const VariableSlot* slot = find_slot(tmpl, name);
  if (slot == nullptr) {
    return Error{ErrorCode::UnboundSlot, "template '" + tmpl.motion + "' " + std::string(where) +
                                             " references undeclared slot '?" + name + "'"};
  }
  if (slot->kind != expected) {
    return Error{ErrorCode::ParseError,
                 "template '" + tmpl.motion + "' " + std::string(where) + " uses slot '?" + name +
                     "' as " + std::string(slot_kind_name(expected)) + " but it is declared " +
                     std::string(slot_kind_name(slot->kind))};
  }
  return std::nullopt;
}

// Validates one condition/effect record against the template signature.
std::optional<Error> check_record(const FunctionalUnitTemplate& tmpl, const AttrTemplate& rec,
                                  bool is_effect) {
  const std::string where = is_effect ? "output" : "input";

  static const std::set<std::string> kConditionKeys = {"place", "holding", "status", "category",
                                                       "contents"};
  static const std::set<std::string> kEffectKeys = {"place", "holding", "status"};
  const auto& allowed = is_effect ? kEffectKeys : kConditionKeys;
  if (allowed.count(rec.key) == 0) {
    return Error{ErrorCode::ParseError, "template '" + tmpl.motion + "' " + where + " key '" +
                                            rec.key + "' is not an assignable schema key"};
  }

  // Subject: ?slot or contents(?slot).
  std::string subject = trim(rec.subject);
  bool contents_of = false;
  if (subject.rfind("contents(", 0) == 0 && subject.back() == ')') {
    contents_of = true;
    subject = trim(std::string_view(subject).substr(9, subject.size() - 10));
  }
  if (!is_slot_ref(subject)) {
    return Error{ErrorCode::ParseError, "template '" + tmpl.motion + "' " + where +
                                            " subject '" + rec.subject +
                                            "' must reference a slot"};
  }
  const SlotKind subject_kind =
      (!contents_of && rec.key == "holding") ? SlotKind::HandSlot : SlotKind::Object;
  if (auto err = check_slot_ref(tmpl, subject, subject_kind, where + " subject")) return err;
  if (contents_of && rec.key == "holding") {
    return Error{ErrorCode::ParseError,
                 "template '" + tmpl.motion + "' applies 'holding' to contents()"};
  }

  // Value grammar per key.
  const std::string value = trim(rec.value);
  if (value.empty()) {
    return Error{ErrorCode::ParseError,
                 "template '" + tmpl.motion + "' " + where + " has an empty value"};
  }
  const std::vector<std::string> alts = split_alternatives(value);
  if (is_effect && alts.size() != 1) {
    return Error{ErrorCode::ParseError,
                 "template '" + tmpl.motion + "' output value '" + value +
                     "' must not use alternatives"};
  }
  for (const std::string& alt : alts) {
    if (rec.key == "place") {
      if (is_slot_ref(alt)) {
        if (auto err = check_slot_ref(tmpl, alt, SlotKind::LocationSlot, where + " value"))
          return err;
      } else if (alt.rfind("In(", 0) == 0 || alt.rfind("On(", 0) == 0) {
        const std::string inner = trim(std::string_view(alt).substr(3, alt.size() - 4));
        if (is_slot_ref(inner)) {
          if (auto err = check_slot_ref(tmpl, inner, SlotKind::Object, where + " value"))
            return err;
        } else if (!parse_location(alt)) {
          return Error{ErrorCode::ParseError, "template '" + tmpl.motion + "' bad location '" +
                                                  alt + "'"};
        }
      } else if (alt.rfind("InHand(", 0) == 0) {
        const std::string inner = trim(std::string_view(alt).substr(7, alt.size() - 8));
        if (is_slot_ref(inner)) {
          if (auto err = check_slot_ref(tmpl, inner, SlotKind::HandSlot, where + " value"))
            return err;
        } else if (!parse_location(alt)) {
          return Error{ErrorCode::ParseError, "template '" + tmpl.motion + "' bad location '" +
                                                  alt + "'"};
        }
      } else if (alt == "CutSurface") {
        if (is_effect) {
          return Error{ErrorCode::ParseError,
                       "template '" + tmpl.motion + "' cannot assign place CutSurface"};
        }
      } else if (!parse_location(alt)) {
        return Error{ErrorCode::ParseError,
                     "template '" + tmpl.motion + "' bad location '" + alt + "'"};
      }
    } else if (rec.key == "holding") {
      if (is_slot_ref(alt)) {
        if (auto err = check_slot_ref(tmpl, alt, SlotKind::Object, where + " value")) return err;
      }
      // "none" and literal object names are fine as-is
    } else if (rec.key == "category") {
      if (!parse_category(alt)) {
        return Error{ErrorCode::ParseError, "template '" + tmpl.motion +
                                                "' references unknown category '" + alt + "'"};
      }
    } else if (rec.key == "contents") {
      if (!iequals(alt, "nonempty") && !iequals(alt, "empty")) {
        return Error{ErrorCode::ParseError, "template '" + tmpl.motion +
                                                "' contents value must be nonempty or empty"};
      }
    } else if (rec.key == "status") {
      if (is_slot_ref(alt)) {
        return Error{ErrorCode::ParseError,
                     "template '" + tmpl.motion + "' status tokens must be literal"};
      }
    }
  }
  return std::nullopt;
}

Result<FunctionalUnitTemplate> parse_template(const json& entry) {
  if (!entry.is_object() || !entry.contains("motion") || !entry["motion"].is_string()) {
    return Error{ErrorCode::ParseError, "template entry missing string field 'motion'"};
  }
  FunctionalUnitTemplate tmpl;
  tmpl.motion = trim(entry["motion"].get<std::string>());
  if (tmpl.motion.empty()) {
    return Error{ErrorCode::ParseError, "template with empty motion name"};
  }

  if (!entry.contains("slots") || !entry["slots"].is_array()) {
    return Error{ErrorCode::ParseError, "template '" + tmpl.motion + "' missing slots array"};
  }
  std::set<std::string> seen;
  for (const auto& s : entry["slots"]) {
    if (!s.is_object() || !s.contains("name") || !s.contains("kind")) {
      return Error{ErrorCode::ParseError,
                   "template '" + tmpl.motion + "' slot missing name/kind"};
    }
    VariableSlot slot;
    slot.name = strip_slot_mark(s["name"].get<std::string>());
    auto kind = parse_slot_kind(s["kind"].get<std::string>());
    if (slot.name.empty() || !kind) {
      return Error{ErrorCode::ParseError, "template '" + tmpl.motion + "' bad slot"};
    }
    slot.kind = *kind;
    if (!seen.insert(slot.name).second) {
      return Error{ErrorCode::ParseError,
                   "template '" + tmpl.motion + "' duplicate slot '?" + slot.name + "'"};
    }
    tmpl.signature.push_back(std::move(slot));
  }

  for (const char* section : {"inputs", "outputs"}) {
    if (!entry.contains(section) || !entry[section].is_array()) {
      return Error{ErrorCode::ParseError,
                   "template '" + tmpl.motion + "' missing " + std::string(section)};
    }
    for (const auto& r : entry[section]) {
      if (!r.is_object() || !r.contains("subject") || !r.contains("key") ||
          !r.contains("value")) {
        return Error{ErrorCode::ParseError, "template '" + tmpl.motion +
                                                "' record needs subject/key/value"};
      }
      AttrTemplate rec{trim(r["subject"].get<std::string>()),
                       trim(r["key"].get<std::string>()),
                       trim(r["value"].get<std::string>())};
      auto& dst = std::string_view(section) == "inputs" ? tmpl.inputs : tmpl.outputs;
      dst.push_back(std::move(rec));
    }
  }

  for (const auto& rec : tmpl.inputs) {
    if (auto err = check_record(tmpl, rec, /*is_effect=*/false)) return *err;
  }
  for (const auto& rec : tmpl.outputs) {
    if (auto err = check_record(tmpl, rec, /*is_effect=*/true)) return *err;
  }
  return tmpl;
}

}  // namespace

Result<MotionLibrary> load_library(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Error{ErrorCode::ParseError, "template document is not a JSON object"};
  }
  if (!doc.contains("motions") || !doc["motions"].is_array()) {
    return Error{ErrorCode::ParseError, "template document missing 'motions' array"};
  }
  MotionLibrary library;
  if (doc.contains("cut_surfaces")) {
    if (!doc["cut_surfaces"].is_array()) {
      return Error{ErrorCode::ParseError, "'cut_surfaces' must be an array of names"};
    }
    std::vector<std::string> surfaces;
    for (const auto& s : doc["cut_surfaces"]) {
      if (!s.is_string() || trim(s.get<std::string>()).empty()) {
        return Error{ErrorCode::ParseError, "'cut_surfaces' must be an array of names"};
      }
      surfaces.push_back(trim(s.get<std::string>()));
    }
    library.set_cut_surfaces(std::move(surfaces));
  }
  for (const auto& entry : doc["motions"]) {
    auto tmpl = parse_template(entry);
    if (!tmpl) return tmpl.error();
    auto added = library.add(std::move(tmpl).value());
    if (!added) return added.error();
  }
  return library;
}

// ---------------------------------------------------------------------------
// Instantiation
// ---------------------------------------------------------------------------

namespace {

struct Bindings {
  const FunctionalUnitTemplate* tmpl = nullptr;
  std::map<std::string, std::string> token;     // slot -> canonical token
  std::map<std::string, Hand> hands;            // hand slots
  std::map<std::string, Location> locations;    // location slots
};

Result<SubjectRef> resolve_subject(const Bindings& b, std::string_view raw) {
  std::string subject = trim(raw);
  bool contents_of = false;
  if (subject.rfind("contents(", 0) == 0 && subject.back() == ')') {
    contents_of = true;
    subject = trim(std::string_view(subject).substr(9, subject.size() - 10));
  }
  const std::string name = strip_slot_mark(subject);
  if (contents_of) return SubjectRef::contents_of(b.token.at(name));
  auto hand_it = b.hands.find(name);
  if (hand_it != b.hands.end()) return SubjectRef::hand_ref(hand_it->second);
  return SubjectRef::object(b.token.at(name));
}

Result<Location> resolve_location_alt(const Bindings& b, const std::string& alt) {
  if (is_slot_ref(alt)) {
    return b.locations.at(strip_slot_mark(alt));
  }
  const bool in_form = alt.rfind("In(", 0) == 0;
  const bool on_form = alt.rfind("On(", 0) == 0;
  if (in_form || on_form) {
    const std::string inner = trim(std::string_view(alt).substr(3, alt.size() - 4));
    if (is_slot_ref(inner)) {
      const std::string& bound = b.token.at(strip_slot_mark(inner));
      return in_form ? Location::in(bound) : Location::on(bound);
    }
  }
  if (alt.rfind("InHand(", 0) == 0) {
    const std::string inner = trim(std::string_view(alt).substr(7, alt.size() - 8));
    if (is_slot_ref(inner)) {
      return Location::in_hand(b.hands.at(strip_slot_mark(inner)));
    }
  }
  auto loc = parse_location(alt);
  if (!loc) {
    return Error{ErrorCode::ParseError,
                 "template '" + b.tmpl->motion + "' has unresolvable location '" + alt + "'"};
  }
  return *loc;
}

Result<ValueExpr> resolve_value(const Bindings& b, const AttrTemplate& rec,
                                const MotionLibrary& library) {
  const std::vector<std::string> alts = split_alternatives(rec.value);
  if (rec.key == "place") {
    std::vector<Location> locations;
    for (const std::string& alt : alts) {
      if (alt == "CutSurface") {
        for (const std::string& surface : library.cut_surfaces()) {
          locations.push_back(Location::on(surface));
          locations.push_back(Location::in(surface));
        }
        continue;
      }
      auto loc = resolve_location_alt(b, alt);
      if (!loc) return loc.error();
      locations.push_back(std::move(loc).value());
    }
    return ValueExpr::location_alternatives(std::move(locations));
  }
  if (rec.key == "holding") {
    const std::string& alt = alts.front();
    if (iequals(alt, "none")) return ValueExpr::none();
    if (is_slot_ref(alt)) return ValueExpr::token(b.token.at(strip_slot_mark(alt)));
    return ValueExpr::token(alt);
  }
  if (rec.key == "contents") {
    return iequals(alts.front(), "nonempty") ? ValueExpr::non_empty() : ValueExpr::empty_value();
  }
  return ValueExpr::token_alternatives(alts);  // category / status literals
}

}  // namespace

Result<FunctionalUnit> instantiate(const MotionLibrary& library, const PlanStep& step) {
  const FunctionalUnitTemplate* tmpl = library.find(step.motion);
  if (tmpl == nullptr) {
    return Error{ErrorCode::UnknownMotion, "unknown motion '" + trim(step.motion) + "'"};
  }
  if (step.args.size() != tmpl->signature.size()) {
    std::ostringstream msg;
    msg << "motion '" << tmpl->motion << "' expects " << tmpl->signature.size()
        << " arguments after the motion name, got " << step.args.size();
    return Error{ErrorCode::ArityMismatch, msg.str()};
  }

  Bindings bindings;
  bindings.tmpl = tmpl;
  FunctionalUnit unit;
  unit.motion = tmpl->motion;

  for (size_t i = 0; i < tmpl->signature.size(); ++i) {
    const VariableSlot& slot = tmpl->signature[i];
    const std::string raw = trim(step.args[i]);
    std::string canonical;
    switch (slot.kind) {
      case SlotKind::HandSlot: {
        auto hand = parse_hand_token(raw);
        if (!hand) {
          return Error{ErrorCode::SlotDomainError,
                       "slot '?" + slot.name + "' expects a hand, got '" + raw + "'"};
        }
        bindings.hands[slot.name] = *hand;
        canonical = hand_token(*hand);
        break;
      }
      case SlotKind::LocationSlot: {
        auto loc = parse_location(raw);
        if (!loc || loc->kind() == Location::Kind::InHand) {
          return Error{ErrorCode::SlotDomainError,
                       "slot '?" + slot.name + "' expects a location, got '" + raw + "'"};
        }
        bindings.locations[slot.name] = *loc;
        canonical = to_string(*loc);
        break;
      }
      case SlotKind::Object: {
        if (raw.empty() || parse_hand_token(raw) || parse_location(raw)) {
          return Error{ErrorCode::SlotDomainError,
                       "slot '?" + slot.name + "' expects an object name, got '" + raw + "'"};
        }
        canonical = raw;
        break;
      }
    }
    bindings.token[slot.name] = canonical;
    unit.bindings.emplace_back(slot.name, canonical);
  }

  unit.step_text = tmpl->motion;
  for (const auto& [slot, token] : unit.bindings) {
    unit.step_text += " | " + token;
  }

  for (const AttrTemplate& rec : tmpl->inputs) {
    auto subject = resolve_subject(bindings, rec.subject);
    if (!subject) return subject.error();
    auto value = resolve_value(bindings, rec, library);
    if (!value) return value.error();
    unit.inputs.push_back({std::move(subject).value(), rec.key, std::move(value).value()});
  }
  for (const AttrTemplate& rec : tmpl->outputs) {
    auto subject = resolve_subject(bindings, rec.subject);
    if (!subject) return subject.error();
    auto value = resolve_value(bindings, rec, library);
    if (!value) return value.error();
    unit.outputs.push_back({std::move(subject).value(), rec.key, std::move(value).value()});
  }
  return unit;
}

}  // namespace foon
