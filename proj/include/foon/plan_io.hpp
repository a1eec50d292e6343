#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "foon/core.hpp"
#include "foon/graph.hpp"

namespace foon {

// ---------------------------------------------------------------------------
// Plan lines
// ---------------------------------------------------------------------------

/// Splits a pipe-delimited plan line; the first field is the motion name.
Result<PlanStep> parse_plan_line(std::string_view text);
std::string print_plan_line(const PlanStep& step);

/// One step per line; '#' comments and blank lines are ignored.
Result<std::vector<PlanStep>> parse_plan_file(std::string_view text);

// ---------------------------------------------------------------------------
// Subtitles
// ---------------------------------------------------------------------------

struct SubtitleCue {
  int index = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::string text;

  friend bool operator==(const SubtitleCue&, const SubtitleCue&) = default;
};

/// Standard SubRip parsing, tolerant of BOM, CRLF, and trailing blank lines.
Result<std::vector<SubtitleCue>> parse_srt(std::string_view text);
std::string serialize_srt(const std::vector<SubtitleCue>& cues);

// ---------------------------------------------------------------------------
// Planner responses
// ---------------------------------------------------------------------------

struct TargetEstimateResponse {
  bool unnecessary = false;
  std::vector<TargetObjectNode> targets;

  friend bool operator==(const TargetEstimateResponse&, const TargetEstimateResponse&) = default;
};

struct ActionPlanResponse {
  std::vector<PlanStep> steps;

  friend bool operator==(const ActionPlanResponse&, const ActionPlanResponse&) = default;
};

using PlannerResponse = std::variant<TargetEstimateResponse, ActionPlanResponse>;

enum class ResponseKind { TargetEstimate, ActionPlan };

/// Extracts the first well-formed JSON value from free-form planner text
/// (code fences and surrounding prose are tolerated) and validates it against
/// the expected response schema.
Result<PlannerResponse> parse_planner_response(std::string_view text, ResponseKind expected);

/// The first balanced, parseable JSON value inside `text`, as its raw
/// substring. Shared by the response parser and the fixture planners.
Result<std::string> extract_first_json(std::string_view text);

// ---------------------------------------------------------------------------
// Environment / target / graph documents
// ---------------------------------------------------------------------------

Result<EnvironmentState> parse_environment(std::string_view json_text);
std::string serialize_environment(const EnvironmentState& env);

Result<std::vector<TargetState>> parse_targets(std::string_view json_text);
std::string serialize_targets(const std::vector<TargetState>& targets);

Result<TaskGraph> parse_graph(std::string_view json_text);
std::string serialize_graph(const TaskGraph& graph);

/// DOT export: object/hand nodes as ellipses, motion nodes as boxes, edges in
/// validation order. Deterministic for identical graphs.
std::string export_dot(const TaskGraph& graph);

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

Result<std::string> read_file(const std::string& path);
Result<bool> write_file(const std::string& path, std::string_view content);

}  // namespace foon
