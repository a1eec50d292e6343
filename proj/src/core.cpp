#include "foon/core.hpp"

#include <algorithm>
#include <cctype>

namespace foon {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::HandInconsistency: return "HandInconsistency";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::UnknownMotion: return "UnknownMotion";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::SlotDomainError: return "SlotDomainError";
    case ErrorCode::DuplicateMotion: return "DuplicateMotion";
    case ErrorCode::UnboundSlot: return "UnboundSlot";
    case ErrorCode::EmptyLine: return "EmptyLine";
    case ErrorCode::EmptyField: return "EmptyField";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NoJsonFound: return "NoJsonFound";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::VariantMismatch: return "VariantMismatch";
    case ErrorCode::MalformedTimestamp: return "MalformedTimestamp";
    case ErrorCode::NonMonotonicIndex: return "NonMonotonicIndex";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::EmptyLexicon: return "EmptyLexicon";
    case ErrorCode::PlannerTransport: return "PlannerTransport";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

std::string trim(std::string_view text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// ---------------------------------------------------------------------------
// Hands
// ---------------------------------------------------------------------------

Hand other_hand(Hand hand) { return hand == Hand::Left ? Hand::Right : Hand::Left; }

std::string hand_token(Hand hand) { return hand == Hand::Left ? "Left hand" : "Right hand"; }

std::string hand_id(Hand hand) { return hand == Hand::Left ? "LeftHand" : "RightHand"; }

std::optional<Hand> parse_hand_token(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "left hand" || t == "left") return Hand::Left;
  if (t == "right hand" || t == "right") return Hand::Right;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Locations
// ---------------------------------------------------------------------------

Location Location::in_hand(Hand hand) {
  Location loc(Kind::InHand);
  loc.hand_ = hand;
  return loc;
}

Location Location::in(std::string object_name) {
  Location loc(Kind::In);
  loc.referent_ = std::move(object_name);
  return loc;
}

Location Location::on(std::string object_name) {
  Location loc(Kind::On);
  loc.referent_ = std::move(object_name);
  return loc;
}

bool operator==(const Location& a, const Location& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Location::Kind::InHand: return a.hand_ == b.hand_;
    case Location::Kind::In:
    case Location::Kind::On: return a.referent_ == b.referent_;
    default: return true;
  }
}

std::string to_string(const Location& location) {
  switch (location.kind()) {
    case Location::Kind::RightStorage: return "Right storage";
    case Location::Kind::LeftStorage: return "Left storage";
    case Location::Kind::Workspace: return "Workspace";
    case Location::Kind::InHand:
      return location.hand() == Hand::Left ? "InHand(Left)" : "InHand(Right)";
    case Location::Kind::In: return "In(" + location.referent() + ")";
    case Location::Kind::On: return "On(" + location.referent() + ")";
  }
  return "Workspace";
}

namespace {

// Splits "Prefix(Arg)" and returns Arg; empty optional when not of that shape.
std::optional<std::string> paren_arg(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size() + 2) return std::nullopt;
  if (!iequals(text.substr(0, prefix.size()), prefix)) return std::nullopt;
  if (text[prefix.size()] != '(' || text.back() != ')') return std::nullopt;
  return trim(text.substr(prefix.size() + 1, text.size() - prefix.size() - 2));
}

}  // namespace

std::optional<Location> parse_location(std::string_view text) {
  const std::string t = trim(text);
  if (iequals(t, "Right storage")) return Location::right_storage();
  if (iequals(t, "Left storage")) return Location::left_storage();
  if (iequals(t, "Workspace")) return Location::workspace();
  if (auto arg = paren_arg(t, "InHand")) {
    if (auto hand = parse_hand_token(*arg)) return Location::in_hand(*hand);
    return std::nullopt;
  }
  if (auto arg = paren_arg(t, "In")) {
    if (arg->empty()) return std::nullopt;
    return Location::in(*arg);
  }
  if (auto arg = paren_arg(t, "On")) {
    if (arg->empty()) return std::nullopt;
    return Location::on(*arg);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Categories
// ---------------------------------------------------------------------------

std::string_view category_name(Category category) {
  switch (category) {
    case Category::Ingredient: return "ingredient";
    case Category::Container: return "container";
    case Category::Tool: return "tool";
    case Category::Machine: return "machine";
  }
  return "ingredient";
}

std::optional<Category> parse_category(std::string_view text) {
  const std::string t = to_lower(trim(text));
  if (t == "ingredient") return Category::Ingredient;
  if (t == "container") return Category::Container;
  if (t == "tool") return Category::Tool;
  if (t == "machine") return Category::Machine;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Environment state
// ---------------------------------------------------------------------------

const ObjectState* EnvironmentState::find(std::string_view name) const {
  auto it = objects.find(std::string(name));
  return it == objects.end() ? nullptr : &it->second;
}

namespace {

std::optional<Error> audit_impl(const EnvironmentState& env, bool constructing) {
  // Location referents resolve, and In() targets can actually contain things.
  for (const auto& [name, obj] : env.objects) {
    if (obj.name != name) {
      return Error{ErrorCode::InvariantViolation,
                   "object map key '" + name + "' disagrees with object name '" + obj.name + "'"};
    }
    if (obj.place.has_referent()) {
      const ObjectState* ref = env.find(obj.place.referent());
      if (ref == nullptr) {
        return Error{ErrorCode::DanglingReference,
                     "object '" + name + "' placed at " + to_string(obj.place) +
                         " but '" + obj.place.referent() + "' does not exist"};
      }
      if (obj.place.kind() == Location::Kind::In && ref->category != Category::Container &&
          ref->category != Category::Machine) {
        return Error{ErrorCode::InvariantViolation,
                     "object '" + name + "' is In(" + ref->name + ") but '" + ref->name +
                         "' is a " + std::string(category_name(ref->category))};
      }
    }
  }

  // Containment/support chains terminate (no object rests on itself).
  for (const auto& [name, obj] : env.objects) {
    std::set<std::string> seen;
    const ObjectState* cur = &obj;
    while (cur->place.has_referent()) {
      if (!seen.insert(cur->name).second) {
        return Error{ErrorCode::InvariantViolation,
                     "containment cycle through '" + cur->name + "'"};
      }
      cur = env.find(cur->place.referent());
      if (cur == nullptr) break;  // dangling already reported above
    }
  }

  // Contents tracked for containers only, bidirectionally consistent.
  for (const auto& [name, obj] : env.objects) {
    if (obj.category != Category::Container && !obj.contents.empty()) {
      return Error{ErrorCode::InvariantViolation,
                   "non-container '" + name + "' has contents"};
    }
    std::set<std::string> listed;
    for (const std::string& content : obj.contents) {
      if (!listed.insert(content).second) {
        return Error{ErrorCode::InvariantViolation,
                     "container '" + name + "' lists '" + content + "' twice"};
      }
      const ObjectState* inner = env.find(content);
      if (inner == nullptr) {
        return Error{ErrorCode::DanglingReference,
                     "container '" + name + "' lists missing object '" + content + "'"};
      }
      if (inner->place != Location::in(name)) {
        return Error{ErrorCode::InvariantViolation,
                     "container '" + name + "' lists '" + content + "' but its place is " +
                         to_string(inner->place)};
      }
    }
  }
  for (const auto& [name, obj] : env.objects) {
    if (obj.place.kind() != Location::Kind::In) continue;
    const ObjectState* container = env.find(obj.place.referent());
    if (container != nullptr && container->category == Category::Container) {
      const auto& c = container->contents;
      if (std::find(c.begin(), c.end(), name) == c.end()) {
        return Error{ErrorCode::InvariantViolation,
                     "object '" + name + "' is In(" + container->name +
                         ") but is not listed in its contents"};
      }
    }
  }

  // Hand-object duality, both directions.
  for (Hand h : {Hand::Left, Hand::Right}) {
    const HandState& hand = env.hand(h);
    if (hand.holding) {
      const ObjectState* held = env.find(*hand.holding);
      if (held == nullptr) {
        return Error{constructing ? ErrorCode::HandInconsistency : ErrorCode::InvariantViolation,
                     hand_id(h) + " holds missing object '" + *hand.holding + "'"};
      }
      if (held->place != Location::in_hand(h)) {
        return Error{constructing ? ErrorCode::HandInconsistency : ErrorCode::InvariantViolation,
                     hand_id(h) + " holds '" + *hand.holding + "' but its place is " +
                         to_string(held->place)};
      }
    }
  }
  for (const auto& [name, obj] : env.objects) {
    if (obj.place.kind() != Location::Kind::InHand) continue;
    const HandState& hand = env.hand(obj.place.hand());
    if (!hand.holding || *hand.holding != name) {
      return Error{constructing ? ErrorCode::HandInconsistency : ErrorCode::InvariantViolation,
                   "object '" + name + "' is " + to_string(obj.place) + " but " +
                       hand_id(obj.place.hand()) + " holds " +
                       (hand.holding ? "'" + *hand.holding + "'" : "nothing")};
    }
  }

  return std::nullopt;
}

}  // namespace

std::optional<Error> audit_environment(const EnvironmentState& env) {
  return audit_impl(env, /*constructing=*/false);
}

Result<EnvironmentState> new_environment(const std::vector<ObjectState>& objects,
                                         const HandState& left, const HandState& right) {
  EnvironmentState env;
  if (left.hand != Hand::Left || right.hand != Hand::Right) {
    return Error{ErrorCode::HandInconsistency, "hand states supplied in the wrong order"};
  }
  env.left = left;
  env.right = right;
  for (const ObjectState& obj : objects) {
    if (obj.name.empty()) {
      return Error{ErrorCode::InvariantViolation, "object with empty name"};
    }
    if (!env.objects.emplace(obj.name, obj).second) {
      return Error{ErrorCode::DuplicateName, "duplicate object name '" + obj.name + "'"};
    }
  }
  if (auto err = audit_impl(env, /*constructing=*/true)) return *err;
  return env;
}

}  // namespace foon
