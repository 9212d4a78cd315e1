#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dagparse/state.hpp"

namespace dagparse {

// Dynamic oracle: yields the set of transitions that keep the gold graph
// reachable from a state on the optimal path. For unlabeled tasks the gold
// edge set is collapsed to (parent, child, remote) shape.
class Oracle {
 public:
  Oracle(UnifiedGraph gold, TaskConfig task);

  // Deterministically ordered set. Throws DataError when the state does not
  // correspond to this gold graph, InternalError when no optimal transition
  // exists (an oracle bug on optimal-path states).
  std::vector<Transition> optimal_set(const ParserState& state) const;

  const UnifiedGraph& gold() const { return gold_; }
  const TaskConfig& task() const { return task_; }

  // Maps state node -> gold node (correspondence recovered from primary
  // edges); exposed for tests. Throws on inconsistent states.
  std::vector<int> correspondence(const ParserState& state) const;

 private:
  struct GoldEdge {
    int parent;
    int child;
    std::string label;
    bool remote;
  };
  struct View;

  UnifiedGraph gold_;
  TaskConfig task_;
  std::vector<GoldEdge> gold_edges_;            // deduped by shape when unlabeled
  std::vector<std::vector<int>> incident_;      // gold node -> gold edge ids
  std::vector<int> primary_parent_edge_;        // gold node -> gold edge id or -1

  View analyze(const ParserState& state) const;
};

struct OracleParse {
  std::vector<Transition> sequence;
  UnifiedGraph graph;
};

int transition_priority(const Transition& t);  // smaller sorts first
const Transition& pick_by_priority(const std::vector<Transition>& options);

// Chooses the transition to perform from a non-empty optimal set.
using TieBreak = std::function<const Transition&(const std::vector<Transition>&)>;

// Repeatedly applies a member of optimal_set chosen by tie_break until
// Finish. The default priority: edge creations > Node > Reduce > Shift >
// Swap > Finish, ties by inventory order.
OracleParse oracle_parse(const UnifiedGraph& gold, const TaskConfig& task,
                         const TieBreak& tie_break = pick_by_priority);

}  // namespace dagparse
