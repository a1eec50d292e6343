#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace foon {

enum class ErrorCode {
  // state construction
  DuplicateName,
  DanglingReference,
  HandInconsistency,
  InvariantViolation,
  // motion library
  UnknownMotion,
  ArityMismatch,
  SlotDomainError,
  DuplicateMotion,
  UnboundSlot,
  // parsing
  EmptyLine,
  EmptyField,
  ParseError,
  NoJsonFound,
  SchemaError,
  VariantMismatch,
  MalformedTimestamp,
  NonMonotonicIndex,
  // validation / segmentation
  UnknownObject,
  EmptyLexicon,
  // orchestration
  PlannerTransport,
  SearchSpaceTooLarge,
  // filesystem
  IoError,
};

std::string_view error_code_name(ErrorCode code);

struct Error {
  ErrorCode code;
  std::string message;
};

/// Success-or-error wrapper used by every fallible operation in the engine.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error error) : v_(std::move(error)) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(v_); }
  T& value() & { return std::get<T>(v_); }
  T&& value() && { return std::get<T>(std::move(v_)); }
  const Error& error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

// ---------------------------------------------------------------------------
// Hands and locations
// ---------------------------------------------------------------------------

enum class Hand { Left, Right };

Hand other_hand(Hand hand);

/// Plan-line form, e.g. "Right hand".
std::string hand_token(Hand hand);
/// Mismatch-subject and node-label form, e.g. "RightHand".
std::string hand_id(Hand hand);
std::optional<Hand> parse_hand_token(std::string_view text);

/// Symbolic placement of an object: a storage region, the workspace, a hand,
/// or containment/support relative to another named object.
class Location {
 public:
  enum class Kind { RightStorage, LeftStorage, Workspace, InHand, In, On };

  Location() = default;

  static Location right_storage() { return Location(Kind::RightStorage); }
  static Location left_storage() { return Location(Kind::LeftStorage); }
  static Location workspace() { return Location(Kind::Workspace); }
  static Location in_hand(Hand hand);
  static Location in(std::string object_name);
  static Location on(std::string object_name);

  Kind kind() const { return kind_; }
  Hand hand() const { return hand_; }
  const std::string& referent() const { return referent_; }
  bool has_referent() const { return kind_ == Kind::In || kind_ == Kind::On; }

  friend bool operator==(const Location& a, const Location& b);
  friend bool operator!=(const Location& a, const Location& b) { return !(a == b); }

 private:
  explicit Location(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::Workspace;
  Hand hand_ = Hand::Right;  // meaningful only for InHand
  std::string referent_;     // meaningful only for In/On
};

/// Canonical text form: "Right storage", "Workspace", "InHand(Left)",
/// "In(Frying pan)", "On(Stove)".
std::string to_string(const Location& location);
std::optional<Location> parse_location(std::string_view text);

// ---------------------------------------------------------------------------
// Object and environment state
// ---------------------------------------------------------------------------

enum class Category { Ingredient, Container, Tool, Machine };

std::string_view category_name(Category category);
std::optional<Category> parse_category(std::string_view text);

struct ObjectState {
  std::string name;
  Category category = Category::Ingredient;
  Location place;
  std::set<std::string> status;
  std::vector<std::string> contents;  // containers only

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct HandState {
  Hand hand = Hand::Right;
  std::optional<std::string> holding;

  friend bool operator==(const HandState&, const HandState&) = default;
};

/// The environment object node: every object in the local workspace plus the
/// two hand nodes. Immutable by convention; actions produce new states.
struct EnvironmentState {
  std::map<std::string, ObjectState> objects;
  HandState left{Hand::Left, std::nullopt};
  HandState right{Hand::Right, std::nullopt};

  const ObjectState* find(std::string_view name) const;
  const HandState& hand(Hand hand) const { return hand == Hand::Left ? left : right; }
  HandState& hand(Hand hand) { return hand == Hand::Left ? left : right; }

  friend bool operator==(const EnvironmentState&, const EnvironmentState&) = default;
};

Result<EnvironmentState> new_environment(const std::vector<ObjectState>& objects,
                                         const HandState& left, const HandState& right);

/// Full-state audit: referential closure, hand-object duality, container
/// contents consistency, containment acyclicity. Returns nullopt when clean.
std::optional<Error> audit_environment(const EnvironmentState& env);

// ---------------------------------------------------------------------------
// Target object nodes
// ---------------------------------------------------------------------------

/// Partial attribute requirements for one object; unset fields are wildcards.
struct TargetObjectNode {
  std::string name;
  std::optional<Category> category;
  std::optional<Location> place;
  std::optional<std::set<std::string>> status;  // subset semantics
  std::optional<std::vector<std::string>> contents;

  friend bool operator==(const TargetObjectNode&, const TargetObjectNode&) = default;
};

struct TargetState {
  int scene_id = 0;
  std::vector<TargetObjectNode> targets;

  friend bool operator==(const TargetState&, const TargetState&) = default;
};

// ---------------------------------------------------------------------------
// Plan steps
// ---------------------------------------------------------------------------

/// One pipe-delimited plan line: a motion name and its raw argument tokens.
struct PlanStep {
  std::string motion;
  std::vector<std::string> args;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
bool iequals(std::string_view a, std::string_view b);

}  // namespace foon
