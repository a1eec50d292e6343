#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "foon/core.hpp"

namespace foon {

enum class SlotKind { Object, HandSlot, LocationSlot };

std::string_view slot_kind_name(SlotKind kind);
std::optional<SlotKind> parse_slot_kind(std::string_view text);

struct VariableSlot {
  std::string name;  // without the leading '?'
  SlotKind kind = SlotKind::Object;

  friend bool operator==(const VariableSlot&, const VariableSlot&) = default;
};

/// Condition/effect record before binding. Subjects are slot references
/// ("?obj") or content expansions ("contents(?src)"); values keep the raw
/// template grammar and are resolved at instantiation time.
struct AttrTemplate {
  std::string subject;
  std::string key;    // place | holding | status | category | contents
  std::string value;  // e.g. "none", "?place", "In(?dest)", "container|machine"

  friend bool operator==(const AttrTemplate&, const AttrTemplate&) = default;
};

/// A functional unit with variables: one motion plus the input conditions and
/// output effects expressed over its variable slots.
struct FunctionalUnitTemplate {
  std::string motion;
  std::vector<VariableSlot> signature;
  std::vector<AttrTemplate> inputs;
  std::vector<AttrTemplate> outputs;

  friend bool operator==(const FunctionalUnitTemplate&, const FunctionalUnitTemplate&) = default;
};

// ---------------------------------------------------------------------------
// Ground (instantiated) form
// ---------------------------------------------------------------------------

struct SubjectRef {
  enum class Kind { Object, HandRef, ContentsOf };
  Kind kind = Kind::Object;
  std::string name;          // Object / ContentsOf
  Hand hand = Hand::Right;   // HandRef

  static SubjectRef object(std::string name);
  static SubjectRef hand_ref(Hand hand);
  static SubjectRef contents_of(std::string container);

  /// Display form used in mismatches and serialized graphs:
  /// "Knife", "RightHand", "contents(Frying pan)".
  std::string display() const;

  friend bool operator==(const SubjectRef&, const SubjectRef&) = default;
};

std::optional<SubjectRef> parse_subject_ref(std::string_view text);

/// Fully resolved value of a ground condition or effect.
struct ValueExpr {
  enum class Kind { None, Tokens, Locations, NonEmpty, Empty };
  Kind kind = Kind::None;
  std::vector<std::string> tokens;      // Tokens: alternatives for conditions
  std::vector<Location> locations;      // Locations: alternatives for conditions

  static ValueExpr none();
  static ValueExpr token(std::string token);
  static ValueExpr token_alternatives(std::vector<std::string> tokens);
  static ValueExpr location(Location location);
  static ValueExpr location_alternatives(std::vector<Location> locations);
  static ValueExpr non_empty();
  static ValueExpr empty_value();

  std::string display() const;

  friend bool operator==(const ValueExpr&, const ValueExpr&) = default;
};

/// Parses the display form back into a ValueExpr; the attribute key selects
/// the token domain ("place" values parse as locations, others as tokens).
std::optional<ValueExpr> parse_value_expr(std::string_view text, std::string_view key);

struct GroundAttr {
  SubjectRef subject;
  std::string key;
  ValueExpr value;

  friend bool operator==(const GroundAttr&, const GroundAttr&) = default;
};

/// A ground functional unit: motion, concrete bindings, and fully resolved
/// input conditions and output effects. No unresolved slots remain.
struct FunctionalUnit {
  std::string motion;
  std::string step_text;  // canonical pipe-delimited plan line
  std::vector<std::pair<std::string, std::string>> bindings;  // slot -> token
  std::vector<GroundAttr> inputs;
  std::vector<GroundAttr> outputs;

  friend bool operator==(const FunctionalUnit&, const FunctionalUnit&) = default;
};

// ---------------------------------------------------------------------------
// Library
// ---------------------------------------------------------------------------

/// Motion-name-indexed template store. Lookup is case-insensitive; canonical
/// casing and declaration order are preserved.
class MotionLibrary {
 public:
  Result<bool> add(FunctionalUnitTemplate tmpl);

  const FunctionalUnitTemplate* find(std::string_view motion) const;
  const std::vector<FunctionalUnitTemplate>& templates() const { return templates_; }

  const std::vector<std::string>& cut_surfaces() const { return cut_surfaces_; }
  void set_cut_surfaces(std::vector<std::string> surfaces) { cut_surfaces_ = std::move(surfaces); }

  friend bool operator==(const MotionLibrary& a, const MotionLibrary& b) {
    return a.templates_ == b.templates_ && a.cut_surfaces_ == b.cut_surfaces_;
  }

 private:
  std::vector<FunctionalUnitTemplate> templates_;
  std::map<std::string, size_t> index_;  // lowercased motion -> position
  std::vector<std::string> cut_surfaces_ = {"Cutting board"};
};

/// The six bundled motions: Pick, Place, Pour, Cut, Mix, Cook.
const MotionLibrary& builtin_library();

/// The template definition document the builtin library is built from.
std::string_view builtin_library_document();

/// Loads a template definition document:
///   {"motions": [{motion, slots:[{name,kind}], inputs:[...], outputs:[...]}],
///    "cut_surfaces": ["Cutting board"]}
Result<MotionLibrary> load_library(std::string_view json_text);

/// Binds a parsed plan step to its template, positionally, producing a ground
/// functional unit.
Result<FunctionalUnit> instantiate(const MotionLibrary& library, const PlanStep& step);

}  // namespace foon
