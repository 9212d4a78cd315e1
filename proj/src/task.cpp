#include "dagparse/task.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dagparse {

using nlohmann::json;

bool kind_creates_edge(TransitionKind k) {
  switch (k) {
    case TransitionKind::Node:
    case TransitionKind::LeftEdge:
    case TransitionKind::RightEdge:
    case TransitionKind::LeftRemote:
    case TransitionKind::RightRemote:
      return true;
    default:
      return false;
  }
}

const char* kind_name(TransitionKind k) {
  switch (k) {
    case TransitionKind::Shift: return "Shift";
    case TransitionKind::Reduce: return "Reduce";
    case TransitionKind::Node: return "Node";
    case TransitionKind::LeftEdge: return "LeftEdge";
    case TransitionKind::RightEdge: return "RightEdge";
    case TransitionKind::LeftRemote: return "LeftRemote";
    case TransitionKind::RightRemote: return "RightRemote";
    case TransitionKind::Swap: return "Swap";
    case TransitionKind::Finish: return "Finish";
  }
  return "?";
}

std::string Transition::to_string() const {
  std::string s = kind_name(kind);
  if (!label.empty()) s += "-" + label;
  return s;
}

const std::vector<std::string>& TaskConfig::labels_for(TransitionKind k) const {
  switch (k) {
    case TransitionKind::Node:
      return node_labels.empty() ? labels : node_labels;
    case TransitionKind::LeftEdge:
    case TransitionKind::RightEdge:
      return edge_labels.empty() ? labels : edge_labels;
    case TransitionKind::LeftRemote:
    case TransitionKind::RightRemote:
      return remote_labels.empty() ? labels : remote_labels;
    default:
      return labels;
  }
}

TaskConfig TaskConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("task config: ") + e.what());
  }
  TaskConfig t;
  t.name = j.value("name", "");
  if (t.name.empty()) throw DataError("task config: missing name");
  t.labeled = j.value("labeled", true);
  t.node_allowed = j.value("node_allowed", true);
  t.remote_allowed = j.value("remote_allowed", true);
  t.terminal_single_parent = j.value("terminal_single_parent", false);
  auto get_list = [&](const char* key) {
    std::vector<std::string> v;
    for (const json& x : j.value(key, json::array())) v.push_back(x.get<std::string>());
    return v;
  };
  t.labels = get_list("labels");
  t.node_labels = get_list("node_labels");
  t.edge_labels = get_list("edge_labels");
  t.remote_labels = get_list("remote_labels");
  t.head_priority = get_list("head_priority");
  if (j.contains("frames")) {
    for (auto it = j["frames"].begin(); it != j["frames"].end(); ++it) {
      std::vector<std::string> args;
      for (const json& a : it.value()) args.push_back(a.get<std::string>());
      t.frames[it.key()] = std::move(args);
    }
  }
  t.orphan_label = j.value("orphan_label", std::string("orphan"));
  if (t.labeled && t.labels.empty() && t.edge_labels.empty() && t.node_labels.empty() &&
      t.remote_labels.empty() && !j.contains("labels"))
    throw DataError("task config '" + t.name + "': labeled task without labels");
  return t;
}

TaskConfig TaskConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open task config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string TaskConfig::to_json_text() const {
  json j;
  j["name"] = name;
  j["labeled"] = labeled;
  j["node_allowed"] = node_allowed;
  j["remote_allowed"] = remote_allowed;
  j["terminal_single_parent"] = terminal_single_parent;
  j["labels"] = labels;
  if (!node_labels.empty()) j["node_labels"] = node_labels;
  if (!edge_labels.empty()) j["edge_labels"] = edge_labels;
  if (!remote_labels.empty()) j["remote_labels"] = remote_labels;
  if (!head_priority.empty()) j["head_priority"] = head_priority;
  if (!frames.empty()) {
    json jf = json::object();
    for (const auto& [frame, args] : frames) jf[frame] = args;
    j["frames"] = jf;
  }
  j["orphan_label"] = orphan_label;
  return j.dump();
}

std::vector<Transition> transition_inventory(const TaskConfig& task) {
  static const TransitionKind kOrder[] = {
      TransitionKind::Shift,      TransitionKind::Reduce,      TransitionKind::Node,
      TransitionKind::LeftEdge,   TransitionKind::RightEdge,   TransitionKind::LeftRemote,
      TransitionKind::RightRemote, TransitionKind::Swap,       TransitionKind::Finish,
  };
  // The node/remote flags constrain legality, not the classifier output space.
  std::vector<Transition> out;
  for (TransitionKind k : kOrder) {
    if (task.labeled && kind_creates_edge(k)) {
      for (const std::string& label : task.labels_for(k)) out.push_back({k, label});
    } else {
      out.push_back({k, ""});
    }
  }
  return out;
}

}  // namespace dagparse
