#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dagparse/util.hpp"

namespace dagparse {

enum class TransitionKind {
  Shift,
  Reduce,
  Node,
  LeftEdge,
  RightEdge,
  LeftRemote,
  RightRemote,
  Swap,
  Finish,
};

constexpr int kTransitionKindCount = 9;

bool kind_creates_edge(TransitionKind k);  // Node and the four edge kinds
const char* kind_name(TransitionKind k);

struct Transition {
  TransitionKind kind = TransitionKind::Shift;
  std::string label;  // present iff the kind creates an edge and the task is labeled

  bool operator==(const Transition&) const = default;
  auto operator<=>(const Transition&) const = default;
  std::string to_string() const;
};

// Per-task constraint set and label inventory, loaded from a JSON config.
struct TaskConfig {
  std::string name;
  bool labeled = true;
  bool node_allowed = true;
  bool remote_allowed = true;
  bool terminal_single_parent = false;  // UCCA: a terminal may only have one parent

  // Uniform label set; the per-kind lists below override it when non-empty.
  std::vector<std::string> labels;
  std::vector<std::string> node_labels;
  std::vector<std::string> edge_labels;
  std::vector<std::string> remote_labels;

  // Head-terminal edge-label priority (feature extraction).
  std::vector<std::string> head_priority;

  // PropBank core-argument constraint: frame label -> allowed ARG labels.
  // Inactive when empty.
  std::map<std::string, std::vector<std::string>> frames;

  std::string orphan_label = "orphan";  // decode cleanup label

  const std::vector<std::string>& labels_for(TransitionKind k) const;

  static TaskConfig from_json_text(const std::string& text);
  static TaskConfig load(const std::string& path);
  std::string to_json_text() const;
};

// Classifier output space: labeled tasks get one entry per edge-creating
// kind x label plus the label-free kinds; unlabeled tasks get exactly the 9
// label-free kinds.
std::vector<Transition> transition_inventory(const TaskConfig& task);

}  // namespace dagparse
