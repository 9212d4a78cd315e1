#include "dagparse/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

namespace dagparse {

Oracle::Oracle(UnifiedGraph gold, TaskConfig task)
    : gold_(std::move(gold)), task_(std::move(task)) {
  std::map<std::tuple<int, int, bool, std::string>, int> seen;
  for (const Edge& e : gold_.edges()) {
    std::string key_label = task_.labeled ? e.label : std::string();
    auto key = std::make_tuple(e.parent, e.child, e.remote, key_label);
    if (seen.count(key)) continue;  // unlabeled mode collapses parallel labels
    seen[key] = static_cast<int>(gold_edges_.size());
    gold_edges_.push_back({e.parent, e.child, e.label, e.remote});
  }
  incident_.resize(static_cast<std::size_t>(gold_.node_count()));
  primary_parent_edge_.assign(static_cast<std::size_t>(gold_.node_count()), -1);
  for (int i = 0; i < static_cast<int>(gold_edges_.size()); ++i) {
    const GoldEdge& e = gold_edges_[static_cast<std::size_t>(i)];
    incident_[static_cast<std::size_t>(e.parent)].push_back(i);
    incident_[static_cast<std::size_t>(e.child)].push_back(i);
    if (!e.remote && primary_parent_edge_[static_cast<std::size_t>(e.child)] < 0)
      primary_parent_edge_[static_cast<std::size_t>(e.child)] = i;
  }
}

struct Oracle::View {
  std::vector<int> mu;           // state node -> gold node
  std::vector<int> inv;          // gold node -> state node or -1
  std::vector<char> created;     // per gold edge
  std::vector<int> pending;      // per gold node: uncreated incident count
  int uncreated_edges = 0;
  int uncreated_nodes = 0;
  std::vector<int> cur_pos;      // state node -> combined stack+buffer position, -1 reduced
};

std::vector<int> Oracle::correspondence(const ParserState& state) const {
  return analyze(state).mu;
}

Oracle::View Oracle::analyze(const ParserState& state) const {
  const UnifiedGraph& g = state.graph;
  if (g.tokens.size() != gold_.tokens.size())
    throw DataError("oracle: state tokenization does not match gold");

  View v;
  v.mu.assign(static_cast<std::size_t>(g.node_count()), -1);
  v.inv.assign(static_cast<std::size_t>(gold_.node_count()), -1);

  auto bind = [&](int state_node, int gold_node, const char* what) {
    if (gold_node < 0) throw DataError(std::string("oracle: state has ") + what + " absent from gold");
    if (v.inv[static_cast<std::size_t>(gold_node)] >= 0)
      throw DataError("oracle: two state nodes map to one gold node");
    v.mu[static_cast<std::size_t>(state_node)] = gold_node;
    v.inv[static_cast<std::size_t>(gold_node)] = state_node;
  };

  for (int i = 0; i < g.node_count(); ++i) {
    const Node& n = g.node(i);
    switch (n.kind) {
      case NodeKind::Root:
        bind(i, gold_.root(), "a root");
        break;
      case NodeKind::Terminal:
        bind(i, gold_.terminal(n.terminal_position), "a terminal");
        break;
      case NodeKind::Nonterminal: {
        // The creation edge is the node's first child edge; its gold image
        // is the gold primary parent of the mapped child.
        if (g.child_edges(i).empty())
          throw DataError("oracle: created non-terminal without children");
        const Edge& ce = g.edge(g.child_edges(i).front());
        int gc = v.mu[static_cast<std::size_t>(ce.child)];
        if (gc < 0) throw DataError("oracle: creation child unmapped");
        int pe = primary_parent_edge_[static_cast<std::size_t>(gc)];
        if (pe < 0) throw DataError("oracle: created node has no gold counterpart");
        const GoldEdge& ge = gold_edges_[static_cast<std::size_t>(pe)];
        if (ge.remote || (task_.labeled && ge.label != ce.label))
          throw DataError("oracle: creation edge does not match gold");
        if (gold_.node(ge.parent).kind != NodeKind::Nonterminal)
          throw DataError("oracle: created node maps to a non-nonterminal");
        bind(i, ge.parent, "a node");
        break;
      }
    }
  }

  v.created.assign(gold_edges_.size(), 0);
  for (const Edge& e : g.edges()) {
    int gp = v.mu[static_cast<std::size_t>(e.parent)];
    int gc = v.mu[static_cast<std::size_t>(e.child)];
    int found = -1;
    for (int ei : incident_[static_cast<std::size_t>(gp)]) {
      const GoldEdge& ge = gold_edges_[static_cast<std::size_t>(ei)];
      if (ge.parent == gp && ge.child == gc && ge.remote == e.remote &&
          (!task_.labeled || ge.label == e.label)) {
        found = ei;
        break;
      }
    }
    if (found < 0) throw DataError("oracle: state contains a non-gold edge");
    v.created[static_cast<std::size_t>(found)] = 1;
  }

  v.pending.assign(static_cast<std::size_t>(gold_.node_count()), 0);
  v.uncreated_edges = 0;
  for (std::size_t i = 0; i < gold_edges_.size(); ++i) {
    if (v.created[i]) continue;
    ++v.uncreated_edges;
    ++v.pending[static_cast<std::size_t>(gold_edges_[i].parent)];
    ++v.pending[static_cast<std::size_t>(gold_edges_[i].child)];
  }
  v.uncreated_nodes = 0;
  for (int gn = 0; gn < gold_.node_count(); ++gn)
    if (v.inv[static_cast<std::size_t>(gn)] < 0) ++v.uncreated_nodes;

  v.cur_pos.assign(static_cast<std::size_t>(g.node_count()), -1);
  int pos = 0;
  for (int n : state.stack) v.cur_pos[static_cast<std::size_t>(n)] = pos++;
  for (int n : state.buffer) v.cur_pos[static_cast<std::size_t>(n)] = pos++;
  return v;
}

std::vector<Transition> Oracle::optimal_set(const ParserState& state) const {
  if (state.finished) return {};
  View v = analyze(state);
  const UnifiedGraph& g = state.graph;
  int s0 = state.s(0), s1 = state.s(1);

  auto label_of = [&](const GoldEdge& e) { return task_.labeled ? e.label : std::string(); };
  std::vector<Transition> out;
  auto offer = [&](Transition t) {
    if (legal(state, t, task_) && std::find(out.begin(), out.end(), t) == out.end())
      out.push_back(std::move(t));
  };

  if (v.uncreated_edges == 0 && v.uncreated_nodes == 0) {
    if (state.buffer.empty()) return {{TransitionKind::Finish, ""}};
    if (s0 >= 0 && s0 != g.root()) offer({TransitionKind::Reduce, ""});
    offer({TransitionKind::Shift, ""});
    return out;
  }

  bool due_pair = false;  // uncreated gold edge between s0 and s1
  if (s0 >= 0 && s1 >= 0) {
    int gs0 = v.mu[static_cast<std::size_t>(s0)];
    int gs1 = v.mu[static_cast<std::size_t>(s1)];
    for (int ei : incident_[static_cast<std::size_t>(gs0)]) {
      if (v.created[static_cast<std::size_t>(ei)]) continue;
      const GoldEdge& e = gold_edges_[static_cast<std::size_t>(ei)];
      if (e.parent == gs1 && e.child == gs0) {
        due_pair = true;
        offer({e.remote ? TransitionKind::RightRemote : TransitionKind::RightEdge, label_of(e)});
      } else if (e.parent == gs0 && e.child == gs1) {
        due_pair = true;
        offer({e.remote ? TransitionKind::LeftRemote : TransitionKind::LeftEdge, label_of(e)});
      }
    }
  }

  if (s0 >= 0 && s0 != g.root()) {
    int gs0 = v.mu[static_cast<std::size_t>(s0)];
    int pe = primary_parent_edge_[static_cast<std::size_t>(gs0)];
    if (pe >= 0 && !v.created[static_cast<std::size_t>(pe)]) {
      const GoldEdge& e = gold_edges_[static_cast<std::size_t>(pe)];
      if (gold_.node(e.parent).kind == NodeKind::Nonterminal &&
          v.inv[static_cast<std::size_t>(e.parent)] < 0)
        offer({TransitionKind::Node, label_of(e)});
    }
    if (v.pending[static_cast<std::size_t>(gs0)] == 0) offer({TransitionKind::Reduce, ""});
  }

  // Swap when the stack top still needs a counterpart strictly below s1;
  // s1 steps aside and returns after s0's deep business is done.
  if (s0 >= 0 && s1 >= 0 && s1 != g.root() && !due_pair) {
    // Grounded position of an uncreated gold node: where it can first be
    // created, i.e. the position of its shallowest primary child.
    std::vector<int> gpos_memo(static_cast<std::size_t>(gold_.node_count()), -2);
    std::function<int(int)> gold_pos = [&](int gn) -> int {
      int sn = v.inv[static_cast<std::size_t>(gn)];
      if (sn >= 0) {
        int p = v.cur_pos[static_cast<std::size_t>(sn)];
        return p < 0 ? std::numeric_limits<int>::max() : p;  // reduced: dead
      }
      int& memo = gpos_memo[static_cast<std::size_t>(gn)];
      if (memo != -2) return memo;
      memo = std::numeric_limits<int>::max();
      for (int ei : incident_[static_cast<std::size_t>(gn)]) {
        const GoldEdge& e = gold_edges_[static_cast<std::size_t>(ei)];
        if (e.parent == gn && !e.remote) memo = std::min(memo, gold_pos(e.child));
      }
      return memo;
    };
    int gs0 = v.mu[static_cast<std::size_t>(s0)];
    int min_counterpart = std::numeric_limits<int>::max();
    for (int ei : incident_[static_cast<std::size_t>(gs0)]) {
      if (v.created[static_cast<std::size_t>(ei)]) continue;
      const GoldEdge& e = gold_edges_[static_cast<std::size_t>(ei)];
      int other = e.parent == gs0 ? e.child : e.parent;
      min_counterpart = std::min(min_counterpart, gold_pos(other));
    }
    if (min_counterpart < v.cur_pos[static_cast<std::size_t>(s1)])
      offer({TransitionKind::Swap, ""});
  }

  if (out.empty() && !state.buffer.empty()) offer({TransitionKind::Shift, ""});

  if (out.empty())
    throw InternalError("oracle: no optimal transition at an optimal-path state (graph '" +
                        gold_.id + "')");
  std::sort(out.begin(), out.end());
  return out;
}

int transition_priority(const Transition& t) {
  switch (t.kind) {
    case TransitionKind::LeftEdge:
    case TransitionKind::RightEdge:
    case TransitionKind::LeftRemote:
    case TransitionKind::RightRemote:
      return 0;
    case TransitionKind::Node: return 1;
    case TransitionKind::Reduce: return 2;
    case TransitionKind::Shift: return 3;
    case TransitionKind::Swap: return 4;
    case TransitionKind::Finish: return 5;
  }
  return 6;
}

const Transition& pick_by_priority(const std::vector<Transition>& options) {
  if (options.empty()) throw InternalError("pick_by_priority: empty set");
  const Transition* best = &options.front();
  for (const Transition& t : options) {
    auto key = std::make_tuple(transition_priority(t), t.kind, t.label);
    auto best_key = std::make_tuple(transition_priority(*best), best->kind, best->label);
    if (key < best_key) best = &t;
  }
  return *best;
}

OracleParse oracle_parse(const UnifiedGraph& gold, const TaskConfig& task,
                         const TieBreak& tie_break) {
  Oracle oracle(gold, task);
  ParserState state = initial_state(gold.tokens, gold.id);
  OracleParse out;
  int n = static_cast<int>(gold.tokens.size()) + gold.node_count();
  long limit = 40L * n * n + 100;  // safety net; oracle parses are O(n^2)
  while (!state.finished) {
    if (static_cast<long>(out.sequence.size()) > limit)
      throw InternalError("oracle_parse: transition limit exceeded on graph '" + gold.id + "'");
    std::vector<Transition> options = oracle.optimal_set(state);
    const Transition& t = tie_break(options);
    apply(state, t, task);
    out.sequence.push_back(t);
  }
  out.graph = std::move(state.graph);
  return out;
}

}  // namespace dagparse
