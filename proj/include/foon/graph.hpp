#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foon/core.hpp"
#include "foon/motion.hpp"

namespace foon {

enum class NodeKind { Object, HandNode, Motion };
enum class NodeSide { Input, Output, Middle };

std::string_view node_kind_name(NodeKind kind);
std::string_view node_side_name(NodeSide side);

/// One node of the bipartite FOON: an object/hand state snapshot or a motion.
struct GraphNode {
  int id = 0;
  NodeKind kind = NodeKind::Object;
  NodeSide side = NodeSide::Middle;
  std::string label;  // object name, hand id, or motion name
  int unit_index = 0;
  std::optional<ObjectState> object_state;  // kind == Object
  std::optional<HandState> hand_state;      // kind == HandNode

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  int from = 0;
  int to = 0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// The accumulated FOON task graph: instantiated functional units in
/// chronological validation order, chained by object-state nodes.
struct TaskGraph {
  std::vector<FunctionalUnit> units;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  bool empty() const { return units.empty(); }

  friend bool operator==(const TaskGraph&, const TaskGraph&) = default;
};

/// Appends a validated unit. Input nodes snapshot the unit's subjects in
/// pre_env and feed the motion node; output nodes snapshot post_env.
TaskGraph append_unit(const TaskGraph& graph, const FunctionalUnit& unit,
                      const EnvironmentState& pre_env, const EnvironmentState& post_env);

/// Units in validation order.
const std::vector<FunctionalUnit>& chronological_units(const TaskGraph& graph);

/// Appends all of `fragment` after `graph`, renumbering ids and unit indices.
TaskGraph concat_graphs(const TaskGraph& graph, const TaskGraph& fragment);

/// The ordered, distinct subjects a unit touches: condition subjects first,
/// then effect subjects, with contents() expanded against `env`.
std::vector<SubjectRef> unit_subjects(const FunctionalUnit& unit, const EnvironmentState& env);

}  // namespace foon
