#include "foon/graph.hpp"

#include <algorithm>

namespace foon {

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Object: return "object";
    case NodeKind::HandNode: return "hand";
    case NodeKind::Motion: return "motion";
  }
  return "object";
}

std::string_view node_side_name(NodeSide side) {
  switch (side) {
    case NodeSide::Input: return "input";
    case NodeSide::Output: return "output";
    case NodeSide::Middle: return "motion";
  }
  return "motion";
}

namespace {

void add_subject(std::vector<SubjectRef>& out, const SubjectRef& subject) {
  if (std::find(out.begin(), out.end(), subject) == out.end()) out.push_back(subject);
}

// contents(c) expands to c itself plus whatever c holds in `env`.
void expand_subject(std::vector<SubjectRef>& out, const SubjectRef& subject,
                    const EnvironmentState& env) {
  if (subject.kind != SubjectRef::Kind::ContentsOf) {
    add_subject(out, subject);
    return;
  }
  add_subject(out, SubjectRef::object(subject.name));
  if (const ObjectState* container = env.find(subject.name)) {
    for (const std::string& content : container->contents) {
      add_subject(out, SubjectRef::object(content));
    }
  }
}

GraphNode state_node(int id, const SubjectRef& subject, const EnvironmentState& env,
                     NodeSide side, int unit_index) {
  GraphNode node;
  node.id = id;
  node.side = side;
  node.unit_index = unit_index;
  if (subject.kind == SubjectRef::Kind::HandRef) {
    node.kind = NodeKind::HandNode;
    node.label = hand_id(subject.hand);
    node.hand_state = env.hand(subject.hand);
  } else {
    node.kind = NodeKind::Object;
    node.label = subject.name;
    if (const ObjectState* obj = env.find(subject.name)) node.object_state = *obj;
  }
  return node;
}

}  // namespace

std::vector<SubjectRef> unit_subjects(const FunctionalUnit& unit, const EnvironmentState& env) {
  std::vector<SubjectRef> subjects;
  for (const GroundAttr& rec : unit.inputs) expand_subject(subjects, rec.subject, env);
  for (const GroundAttr& rec : unit.outputs) expand_subject(subjects, rec.subject, env);
  return subjects;
}

TaskGraph append_unit(const TaskGraph& graph, const FunctionalUnit& unit,
                      const EnvironmentState& pre_env, const EnvironmentState& post_env) {
  TaskGraph out = graph;
  const int unit_index = static_cast<int>(out.units.size());
  out.units.push_back(unit);

  int next_id = static_cast<int>(out.nodes.size());
  const std::vector<SubjectRef> subjects = unit_subjects(unit, pre_env);

  std::vector<int> input_ids;
  for (const SubjectRef& subject : subjects) {
    out.nodes.push_back(state_node(next_id, subject, pre_env, NodeSide::Input, unit_index));
    input_ids.push_back(next_id++);
  }

  GraphNode motion;
  motion.id = next_id;
  motion.kind = NodeKind::Motion;
  motion.side = NodeSide::Middle;
  motion.label = unit.motion;
  motion.unit_index = unit_index;
  out.nodes.push_back(motion);
  const int motion_id = next_id++;

  for (int input_id : input_ids) out.edges.push_back({input_id, motion_id});
  for (const SubjectRef& subject : subjects) {
    out.nodes.push_back(state_node(next_id, subject, post_env, NodeSide::Output, unit_index));
    out.edges.push_back({motion_id, next_id});
    ++next_id;
  }
  return out;
}

const std::vector<FunctionalUnit>& chronological_units(const TaskGraph& graph) {
  return graph.units;
}

TaskGraph concat_graphs(const TaskGraph& graph, const TaskGraph& fragment) {
  TaskGraph out = graph;
  const int unit_offset = static_cast<int>(out.units.size());
  const int node_offset = static_cast<int>(out.nodes.size());
  out.units.insert(out.units.end(), fragment.units.begin(), fragment.units.end());
  for (GraphNode node : fragment.nodes) {
    node.id += node_offset;
    node.unit_index += unit_offset;
    out.nodes.push_back(std::move(node));
  }
  for (const GraphEdge& edge : fragment.edges) {
    out.edges.push_back({edge.from + node_offset, edge.to + node_offset});
  }
  return out;
}

}  // namespace foon
