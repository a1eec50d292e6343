#include "foon/plan_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace foon {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Plan lines
// ---------------------------------------------------------------------------

Result<PlanStep> parse_plan_line(std::string_view text) {
  if (trim(text).empty()) {
    return Error{ErrorCode::EmptyLine, "empty plan line"};
  }
  std::vector<std::string> fields;
  std::string current;
  for (char c : text) {
    if (c == '|') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(trim(current));

  for (size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].empty()) {
      return Error{ErrorCode::EmptyField, "empty field " + std::to_string(i + 1)};
    }
  }
  PlanStep step;
  step.motion = fields.front();
  step.args.assign(fields.begin() + 1, fields.end());
  return step;
}

std::string print_plan_line(const PlanStep& step) {
  std::string out = step.motion;
  for (const auto& arg : step.args) out += " | " + arg;
  return out;
}

Result<std::vector<PlanStep>> parse_plan_file(std::string_view text) {
  std::vector<PlanStep> steps;
  size_t line_no = 0;
  std::istringstream stream{std::string(text)};
  std::string line;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto step = parse_plan_line(line);
    if (!step) {
      return Error{step.error().code,
                   "line " + std::to_string(line_no) + ": " + step.error().message};
    }
    steps.push_back(std::move(step).value());
  }
  return steps;
}

// ---------------------------------------------------------------------------
// SRT
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty() && current.back() == '\r') current.pop_back();
  lines.push_back(current);
  return lines;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

// "HH:MM:SS,mmm" (comma or dot before the milliseconds).
std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  const std::string t = trim(text);
  int h = 0, m = 0, s = 0, ms = 0;
  char sep = 0;
  if (std::sscanf(t.c_str(), "%d:%d:%d%c%3d", &h, &m, &s, &sep, &ms) != 5) return std::nullopt;
  if (sep != ',' && sep != '.') return std::nullopt;
  if (h < 0 || m < 0 || m > 59 || s < 0 || s > 59 || ms < 0 || ms > 999) return std::nullopt;
  return (((static_cast<std::int64_t>(h) * 60 + m) * 60) + s) * 1000 + ms;
}

std::string format_timestamp(std::int64_t ms) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld,%03lld",
                static_cast<long long>(ms / 3600000), static_cast<long long>(ms / 60000 % 60),
                static_cast<long long>(ms / 1000 % 60), static_cast<long long>(ms % 1000));
  return buf;
}

}  // namespace

Result<std::vector<SubtitleCue>> parse_srt(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  const std::vector<std::string> lines = split_lines(text);

  std::vector<SubtitleCue> cues;
  int previous_index = 0;
  size_t i = 0;
  while (i < lines.size()) {
    if (trim(lines[i]).empty()) {
      ++i;
      continue;
    }

    SubtitleCue cue;
    const std::string index_text = trim(lines[i]);
    if (!all_digits(index_text)) {
      return Error{ErrorCode::ParseError,
                   "line " + std::to_string(i + 1) + ": expected cue index, got '" +
                       index_text + "'"};
    }
    cue.index = std::stoi(index_text);
    if (cue.index <= previous_index) {
      return Error{ErrorCode::NonMonotonicIndex,
                   "line " + std::to_string(i + 1) + ": cue index " +
                       std::to_string(cue.index) + " not greater than " +
                       std::to_string(previous_index)};
    }
    ++i;

    if (i >= lines.size()) {
      return Error{ErrorCode::MalformedTimestamp,
                   "line " + std::to_string(i + 1) + ": missing timestamp range"};
    }
    const std::string& range = lines[i];
    const size_t arrow = range.find("-->");
    if (arrow == std::string::npos) {
      return Error{ErrorCode::MalformedTimestamp,
                   "line " + std::to_string(i + 1) + ": expected 'start --> end'"};
    }
    auto start = parse_timestamp(range.substr(0, arrow));
    auto end = parse_timestamp(range.substr(arrow + 3));
    if (!start || !end) {
      return Error{ErrorCode::MalformedTimestamp,
                   "line " + std::to_string(i + 1) + ": bad timestamp in '" + trim(range) + "'"};
    }
    if (*start >= *end) {
      return Error{ErrorCode::MalformedTimestamp,
                   "line " + std::to_string(i + 1) + ": cue ends before it starts"};
    }
    cue.start_ms = *start;
    cue.end_ms = *end;
    ++i;

    std::string cue_text;
    while (i < lines.size() && !trim(lines[i]).empty()) {
      if (!cue_text.empty()) cue_text += "\n";
      cue_text += lines[i];
      ++i;
    }
    cue.text = cue_text;
    previous_index = cue.index;
    cues.push_back(std::move(cue));
  }
  return cues;
}

std::string serialize_srt(const std::vector<SubtitleCue>& cues) {
  std::string out;
  for (const SubtitleCue& cue : cues) {
    out += std::to_string(cue.index) + "\n";
    out += format_timestamp(cue.start_ms) + " --> " + format_timestamp(cue.end_ms) + "\n";
    out += cue.text + "\n\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Planner responses
// ---------------------------------------------------------------------------

Result<std::string> extract_first_json(std::string_view text) {
  size_t pos = 0;
  while (pos < text.size()) {
    size_t open = pos;
    while (open < text.size() && text[open] != '{' && text[open] != '[') ++open;
    if (open >= text.size()) break;

    std::vector<char> stack;
    bool in_string = false;
    bool escaped = false;
    size_t close = std::string::npos;
    for (size_t i = open; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{' || c == '[') {
        stack.push_back(c);
      } else if (c == '}' || c == ']') {
        if (stack.empty() || (c == '}' && stack.back() != '{') ||
            (c == ']' && stack.back() != '[')) {
          break;  // mismatched nesting; try the next candidate
        }
        stack.pop_back();
        if (stack.empty()) {
          close = i;
          break;
        }
      }
    }

    if (close != std::string::npos) {
      const std::string candidate(text.substr(open, close - open + 1));
      const auto parsed = ojson::parse(candidate, nullptr, /*allow_exceptions=*/false);
      if (!parsed.is_discarded()) return candidate;
    }
    pos = open + 1;
  }
  return Error{ErrorCode::NoJsonFound, "no JSON value found in planner response"};
}

namespace {

Result<TargetObjectNode> parse_target_node(const ojson& value, const std::string& path) {
  if (!value.is_object()) {
    return Error{ErrorCode::SchemaError, path + ": target node must be an object"};
  }
  TargetObjectNode node;
  if (!value.contains("name") || !value["name"].is_string() ||
      trim(value["name"].get<std::string>()).empty()) {
    return Error{ErrorCode::SchemaError, path + ".name: required non-empty string"};
  }
  node.name = trim(value["name"].get<std::string>());

  if (value.contains("category") && !value["category"].is_null()) {
    if (!value["category"].is_string()) {
      return Error{ErrorCode::SchemaError, path + ".category: must be a string"};
    }
    const std::string raw = value["category"].get<std::string>();
    auto category = parse_category(raw);
    if (!category) {
      return Error{ErrorCode::SchemaError,
                   path + ".category: unknown category '" + trim(raw) +
                       "' (expected ingredient, container, tool or machine)"};
    }
    node.category = *category;
  }
  if (value.contains("place") && !value["place"].is_null()) {
    if (!value["place"].is_string()) {
      return Error{ErrorCode::SchemaError, path + ".place: must be a string"};
    }
    auto place = parse_location(value["place"].get<std::string>());
    if (!place) {
      return Error{ErrorCode::SchemaError,
                   path + ".place: bad location '" + value["place"].get<std::string>() + "'"};
    }
    node.place = *place;
  }
  if (value.contains("status") && !value["status"].is_null()) {
    if (!value["status"].is_array()) {
      return Error{ErrorCode::SchemaError, path + ".status: must be an array of tokens"};
    }
    std::set<std::string> status;
    for (const auto& token : value["status"]) {
      if (!token.is_string() || trim(token.get<std::string>()).empty()) {
        return Error{ErrorCode::SchemaError, path + ".status: tokens must be strings"};
      }
      status.insert(trim(token.get<std::string>()));
    }
    node.status = std::move(status);
  }
  if (value.contains("contents") && !value["contents"].is_null()) {
    if (!value["contents"].is_array()) {
      return Error{ErrorCode::SchemaError, path + ".contents: must be an array of names"};
    }
    std::vector<std::string> contents;
    for (const auto& name : value["contents"]) {
      if (!name.is_string() || trim(name.get<std::string>()).empty()) {
        return Error{ErrorCode::SchemaError, path + ".contents: names must be strings"};
      }
      contents.push_back(trim(name.get<std::string>()));
    }
    node.contents = std::move(contents);
  }
  return node;
}

ojson target_node_to_json(const TargetObjectNode& node) {
  ojson out;
  out["name"] = node.name;
  if (node.category) out["category"] = std::string(category_name(*node.category));
  if (node.place) out["place"] = to_string(*node.place);
  if (node.status) {
    out["status"] = ojson::array();
    for (const auto& token : *node.status) out["status"].push_back(token);
  }
  if (node.contents) out["contents"] = *node.contents;
  return out;
}

}  // namespace

Result<PlannerResponse> parse_planner_response(std::string_view text, ResponseKind expected) {
  auto raw = extract_first_json(text);
  if (!raw) return raw.error();
  const ojson doc = ojson::parse(raw.value(), nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) {
    return Error{ErrorCode::SchemaError, "planner response must be a JSON object"};
  }

  const bool looks_like_plan = doc.contains("plan");
  const bool looks_like_targets = doc.contains("targets") || doc.contains("unnecessary");

  if (expected == ResponseKind::TargetEstimate) {
    if (looks_like_plan && !looks_like_targets) {
      return Error{ErrorCode::VariantMismatch,
                   "expected a target estimate, got an action plan"};
    }
    TargetEstimateResponse response;
    if (doc.contains("unnecessary")) {
      if (!doc["unnecessary"].is_boolean()) {
        return Error{ErrorCode::SchemaError, "unnecessary: must be a boolean"};
      }
      response.unnecessary = doc["unnecessary"].get<bool>();
    }
    if (response.unnecessary) return PlannerResponse{std::move(response)};
    if (!doc.contains("targets") || !doc["targets"].is_array()) {
      return Error{ErrorCode::SchemaError, "targets: required array of target nodes"};
    }
    for (size_t i = 0; i < doc["targets"].size(); ++i) {
      auto node = parse_target_node(doc["targets"][i], "targets[" + std::to_string(i) + "]");
      if (!node) return node.error();
      response.targets.push_back(std::move(node).value());
    }
    return PlannerResponse{std::move(response)};
  }

  if (looks_like_targets && !looks_like_plan) {
    return Error{ErrorCode::VariantMismatch, "expected an action plan, got a target estimate"};
  }
  if (!doc.contains("plan") || !doc["plan"].is_array()) {
    return Error{ErrorCode::SchemaError, "plan: required array of pipe-delimited step strings"};
  }
  ActionPlanResponse response;
  for (size_t i = 0; i < doc["plan"].size(); ++i) {
    const auto& entry = doc["plan"][i];
    if (!entry.is_string()) {
      return Error{ErrorCode::SchemaError, "plan[" + std::to_string(i) + "]: must be a string"};
    }
    auto step = parse_plan_line(entry.get<std::string>());
    if (!step) {
      return Error{ErrorCode::SchemaError,
                   "plan[" + std::to_string(i) + "]: " + step.error().message};
    }
    response.steps.push_back(std::move(step).value());
  }
  return PlannerResponse{std::move(response)};
}

// ---------------------------------------------------------------------------
// Environment documents
// ---------------------------------------------------------------------------

namespace {

ojson object_state_to_json(const ObjectState& obj, bool with_name) {
  ojson out;
  if (with_name) out["name"] = obj.name;
  out["category"] = std::string(category_name(obj.category));
  out["place"] = to_string(obj.place);
  out["status"] = ojson::array();
  for (const auto& token : obj.status) out["status"].push_back(token);
  out["contents"] = obj.contents;
  return out;
}

Result<ObjectState> object_state_from_json(const ojson& value, const std::string& path,
                                           std::string name_override = {}) {
  if (!value.is_object()) {
    return Error{ErrorCode::SchemaError, path + ": object record must be a JSON object"};
  }
  ObjectState obj;
  if (!name_override.empty()) {
    obj.name = name_override;
  } else {
    if (!value.contains("name") || !value["name"].is_string() ||
        trim(value["name"].get<std::string>()).empty()) {
      return Error{ErrorCode::SchemaError, path + ".name: required non-empty string"};
    }
    obj.name = trim(value["name"].get<std::string>());
  }
  if (!value.contains("category") || !value["category"].is_string()) {
    return Error{ErrorCode::SchemaError, path + ".category: required string"};
  }
  auto category = parse_category(value["category"].get<std::string>());
  if (!category) {
    return Error{ErrorCode::SchemaError,
                 path + ".category: unknown category '" +
                     trim(value["category"].get<std::string>()) + "'"};
  }
  obj.category = *category;
  if (!value.contains("place") || !value["place"].is_string()) {
    return Error{ErrorCode::SchemaError, path + ".place: required string"};
  }
  auto place = parse_location(value["place"].get<std::string>());
  if (!place) {
    return Error{ErrorCode::SchemaError,
                 path + ".place: bad location '" + value["place"].get<std::string>() + "'"};
  }
  obj.place = *place;
  if (value.contains("status")) {
    if (!value["status"].is_array()) {
      return Error{ErrorCode::SchemaError, path + ".status: must be an array"};
    }
    for (const auto& token : value["status"]) {
      if (!token.is_string()) {
        return Error{ErrorCode::SchemaError, path + ".status: tokens must be strings"};
      }
      obj.status.insert(trim(token.get<std::string>()));
    }
  }
  if (value.contains("contents")) {
    if (!value["contents"].is_array()) {
      return Error{ErrorCode::SchemaError, path + ".contents: must be an array"};
    }
    for (const auto& name : value["contents"]) {
      if (!name.is_string()) {
        return Error{ErrorCode::SchemaError, path + ".contents: names must be strings"};
      }
      obj.contents.push_back(trim(name.get<std::string>()));
    }
  }
  return obj;
}

}  // namespace

Result<EnvironmentState> parse_environment(std::string_view json_text) {
  const ojson doc = ojson::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Error{ErrorCode::ParseError, "environment document is not a JSON object"};
  }
  if (!doc.contains("objects") || !doc["objects"].is_array()) {
    return Error{ErrorCode::SchemaError, "objects: required array"};
  }
  std::vector<ObjectState> objects;
  for (size_t i = 0; i < doc["objects"].size(); ++i) {
    auto obj = object_state_from_json(doc["objects"][i], "objects[" + std::to_string(i) + "]");
    if (!obj) return obj.error();
    objects.push_back(std::move(obj).value());
  }

  HandState left{Hand::Left, std::nullopt};
  HandState right{Hand::Right, std::nullopt};
  if (doc.contains("hands")) {
    if (!doc["hands"].is_object()) {
      return Error{ErrorCode::SchemaError, "hands: must be an object with left/right"};
    }
    auto read_hand = [&](const char* key) -> Result<std::optional<std::string>> {
      if (!doc["hands"].contains(key) || doc["hands"][key].is_null()) {
        return std::optional<std::string>{};
      }
      if (!doc["hands"][key].is_string()) {
        return Error{ErrorCode::SchemaError,
                     std::string("hands.") + key + ": must be null or an object name"};
      }
      return std::optional<std::string>{trim(doc["hands"][key].get<std::string>())};
    };
    auto l = read_hand("left");
    if (!l) return l.error();
    auto r = read_hand("right");
    if (!r) return r.error();
    left.holding = l.value();
    right.holding = r.value();
  }
  return new_environment(objects, left, right);
}

std::string serialize_environment(const EnvironmentState& env) {
  ojson doc;
  doc["objects"] = ojson::array();
  for (const auto& [name, obj] : env.objects) {
    doc["objects"].push_back(object_state_to_json(obj, /*with_name=*/true));
  }
  doc["hands"] = ojson::object();
  doc["hands"]["left"] = env.left.holding ? ojson(*env.left.holding) : ojson(nullptr);
  doc["hands"]["right"] = env.right.holding ? ojson(*env.right.holding) : ojson(nullptr);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Target documents
// ---------------------------------------------------------------------------

Result<std::vector<TargetState>> parse_targets(std::string_view json_text) {
  const ojson doc = ojson::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Error{ErrorCode::ParseError, "target document is not a JSON object"};
  }
  if (!doc.contains("scenes") || !doc["scenes"].is_array()) {
    return Error{ErrorCode::SchemaError, "scenes: required array"};
  }
  std::vector<TargetState> scenes;
  for (size_t i = 0; i < doc["scenes"].size(); ++i) {
    const auto& entry = doc["scenes"][i];
    const std::string path = "scenes[" + std::to_string(i) + "]";
    if (!entry.is_object() || !entry.contains("scene_id") ||
        !entry["scene_id"].is_number_integer()) {
      return Error{ErrorCode::SchemaError, path + ".scene_id: required integer"};
    }
    TargetState scene;
    scene.scene_id = entry["scene_id"].get<int>();
    if (!entry.contains("targets") || !entry["targets"].is_array()) {
      return Error{ErrorCode::SchemaError, path + ".targets: required array"};
    }
    for (size_t j = 0; j < entry["targets"].size(); ++j) {
      auto node = parse_target_node(entry["targets"][j],
                                    path + ".targets[" + std::to_string(j) + "]");
      if (!node) return node.error();
      scene.targets.push_back(std::move(node).value());
    }
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

std::string serialize_targets(const std::vector<TargetState>& targets) {
  ojson doc;
  doc["scenes"] = ojson::array();
  for (const TargetState& scene : targets) {
    ojson entry;
    entry["scene_id"] = scene.scene_id;
    entry["targets"] = ojson::array();
    for (const TargetObjectNode& node : scene.targets) {
      entry["targets"].push_back(target_node_to_json(node));
    }
    doc["scenes"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Graph documents
// ---------------------------------------------------------------------------

namespace {

ojson ground_attr_to_json(const GroundAttr& attr) {
  ojson out;
  out["subject"] = attr.subject.display();
  out["key"] = attr.key;
  out["value"] = attr.value.display();
  return out;
}

Result<GroundAttr> ground_attr_from_json(const ojson& value, const std::string& path) {
  if (!value.is_object() || !value.contains("subject") || !value.contains("key") ||
      !value.contains("value") || !value["subject"].is_string() || !value["key"].is_string() ||
      !value["value"].is_string()) {
    return Error{ErrorCode::ParseError, path + ": record needs subject/key/value strings"};
  }
  GroundAttr attr;
  auto subject = parse_subject_ref(value["subject"].get<std::string>());
  if (!subject) {
    return Error{ErrorCode::ParseError, path + ": bad subject"};
  }
  attr.subject = *subject;
  attr.key = trim(value["key"].get<std::string>());
  auto expr = parse_value_expr(value["value"].get<std::string>(), attr.key);
  if (!expr) {
    return Error{ErrorCode::ParseError,
                 path + ": bad value '" + value["value"].get<std::string>() + "'"};
  }
  attr.value = *expr;
  return attr;
}

}  // namespace

std::string serialize_graph(const TaskGraph& graph) {
  ojson doc;
  doc["units"] = ojson::array();
  for (const FunctionalUnit& unit : graph.units) {
    ojson u;
    u["motion"] = unit.motion;
    u["step"] = unit.step_text;
    u["bindings"] = ojson::array();
    for (const auto& [slot, token] : unit.bindings) {
      ojson b;
      b["slot"] = slot;
      b["value"] = token;
      u["bindings"].push_back(std::move(b));
    }
    u["inputs"] = ojson::array();
    for (const GroundAttr& attr : unit.inputs) u["inputs"].push_back(ground_attr_to_json(attr));
    u["outputs"] = ojson::array();
    for (const GroundAttr& attr : unit.outputs) u["outputs"].push_back(ground_attr_to_json(attr));
    doc["units"].push_back(std::move(u));
  }

  doc["nodes"] = ojson::array();
  for (const GraphNode& node : graph.nodes) {
    ojson n;
    n["id"] = node.id;
    n["kind"] = std::string(node_kind_name(node.kind));
    n["side"] = std::string(node_side_name(node.side));
    n["label"] = node.label;
    n["unit"] = node.unit_index;
    if (node.kind == NodeKind::Object) {
      n["state"] = node.object_state ? object_state_to_json(*node.object_state, false)
                                     : ojson(nullptr);
    } else if (node.kind == NodeKind::HandNode) {
      n["holding"] = node.hand_state && node.hand_state->holding
                         ? ojson(*node.hand_state->holding)
                         : ojson(nullptr);
    }
    doc["nodes"].push_back(std::move(n));
  }

  doc["edges"] = ojson::array();
  for (const GraphEdge& edge : graph.edges) {
    ojson e;
    e["from"] = edge.from;
    e["to"] = edge.to;
    doc["edges"].push_back(std::move(e));
  }
  return doc.dump(2) + "\n";
}

Result<TaskGraph> parse_graph(std::string_view json_text) {
  const ojson doc = ojson::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Error{ErrorCode::ParseError, "graph document is not a JSON object"};
  }
  for (const char* key : {"units", "nodes", "edges"}) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      return Error{ErrorCode::ParseError, std::string(key) + ": required array"};
    }
  }

  TaskGraph graph;
  for (size_t i = 0; i < doc["units"].size(); ++i) {
    const auto& u = doc["units"][i];
    const std::string path = "units[" + std::to_string(i) + "]";
    if (!u.is_object() || !u.contains("motion") || !u["motion"].is_string() ||
        !u.contains("step") || !u["step"].is_string()) {
      return Error{ErrorCode::ParseError, path + ": unit needs motion and step"};
    }
    FunctionalUnit unit;
    unit.motion = u["motion"].get<std::string>();
    unit.step_text = u["step"].get<std::string>();
    if (u.contains("bindings")) {
      for (const auto& b : u["bindings"]) {
        if (!b.is_object() || !b.contains("slot") || !b.contains("value")) {
          return Error{ErrorCode::ParseError, path + ": bad binding"};
        }
        unit.bindings.emplace_back(b["slot"].get<std::string>(), b["value"].get<std::string>());
      }
    }
    for (const char* section : {"inputs", "outputs"}) {
      if (!u.contains(section) || !u[section].is_array()) {
        return Error{ErrorCode::ParseError, path + ": missing " + std::string(section)};
      }
      auto& dst = std::string_view(section) == "inputs" ? unit.inputs : unit.outputs;
      for (size_t j = 0; j < u[section].size(); ++j) {
        auto attr = ground_attr_from_json(
            u[section][j], path + "." + section + "[" + std::to_string(j) + "]");
        if (!attr) return attr.error();
        dst.push_back(std::move(attr).value());
      }
    }
    graph.units.push_back(std::move(unit));
  }

  for (size_t i = 0; i < doc["nodes"].size(); ++i) {
    const auto& n = doc["nodes"][i];
    const std::string path = "nodes[" + std::to_string(i) + "]";
    if (!n.is_object() || !n.contains("id") || !n["id"].is_number_integer() ||
        !n.contains("kind") || !n["kind"].is_string() || !n.contains("label") ||
        !n["label"].is_string()) {
      return Error{ErrorCode::ParseError, path + ": node needs id/kind/label"};
    }
    GraphNode node;
    node.id = n["id"].get<int>();
    node.label = n["label"].get<std::string>();
    const std::string kind = n["kind"].get<std::string>();
    if (kind == "object") {
      node.kind = NodeKind::Object;
    } else if (kind == "hand") {
      node.kind = NodeKind::HandNode;
    } else if (kind == "motion") {
      node.kind = NodeKind::Motion;
    } else {
      return Error{ErrorCode::ParseError, path + ": unknown node kind '" + kind + "'"};
    }
    const std::string side = n.contains("side") ? n["side"].get<std::string>() : "motion";
    if (side == "input") {
      node.side = NodeSide::Input;
    } else if (side == "output") {
      node.side = NodeSide::Output;
    } else {
      node.side = NodeSide::Middle;
    }
    node.unit_index = n.contains("unit") ? n["unit"].get<int>() : 0;
    if (node.kind == NodeKind::Object && n.contains("state") && !n["state"].is_null()) {
      auto obj = object_state_from_json(n["state"], path + ".state", node.label);
      if (!obj) return obj.error();
      node.object_state = std::move(obj).value();
    }
    if (node.kind == NodeKind::HandNode) {
      HandState hand;
      hand.hand = node.label == "LeftHand" ? Hand::Left : Hand::Right;
      if (n.contains("holding") && !n["holding"].is_null()) {
        hand.holding = n["holding"].get<std::string>();
      }
      node.hand_state = hand;
    }
    graph.nodes.push_back(std::move(node));
  }

  const int node_count = static_cast<int>(graph.nodes.size());
  for (size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto& e = doc["edges"][i];
    if (!e.is_object() || !e.contains("from") || !e.contains("to") ||
        !e["from"].is_number_integer() || !e["to"].is_number_integer()) {
      return Error{ErrorCode::ParseError, "edges[" + std::to_string(i) + "]: needs from/to"};
    }
    GraphEdge edge{e["from"].get<int>(), e["to"].get<int>()};
    if (edge.from < 0 || edge.from >= node_count || edge.to < 0 || edge.to >= node_count) {
      return Error{ErrorCode::ParseError,
                   "edges[" + std::to_string(i) + "]: endpoint out of range"};
    }
    graph.edges.push_back(edge);
  }
  return graph;
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

namespace {

std::string dot_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string node_dot_label(const GraphNode& node) {
  if (node.kind == NodeKind::Motion) return node.label;
  std::string label = node.label;
  if (node.kind == NodeKind::HandNode && node.hand_state) {
    label += "\nholding: " + (node.hand_state->holding ? *node.hand_state->holding : "none");
  } else if (node.object_state) {
    label += "\nplace: " + to_string(node.object_state->place);
    if (!node.object_state->status.empty()) {
      label += "\nstatus:";
      for (const auto& token : node.object_state->status) label += " " + token;
    }
    if (!node.object_state->contents.empty()) {
      label += "\ncontents:";
      for (const auto& name : node.object_state->contents) label += " " + name;
    }
  }
  return label;
}

}  // namespace

std::string export_dot(const TaskGraph& graph) {
  std::string out = "digraph foon {\n";
  if (!graph.nodes.empty()) {
    out += "  rankdir=LR;\n";
  }
  for (const GraphNode& node : graph.nodes) {
    const char* shape = node.kind == NodeKind::Motion ? "box" : "ellipse";
    out += "  n" + std::to_string(node.id) + " [shape=" + shape + ", label=\"" +
           dot_escape(node_dot_label(node)) + "\"];\n";
  }
  for (const GraphEdge& edge : graph.edges) {
    out += "  n" + std::to_string(edge.from) + " -> n" + std::to_string(edge.to) + ";\n";
  }
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

Result<std::string> read_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    return Error{ErrorCode::IoError, "cannot open '" + path + "'"};
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

Result<bool> write_file(const std::string& path, std::string_view content) {
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream) {
    return Error{ErrorCode::IoError, "cannot write '" + path + "'"};
  }
  stream << content;
  stream.close();
  if (!stream) {
    return Error{ErrorCode::IoError, "short write to '" + path + "'"};
  }
  return true;
}

}  // namespace foon
