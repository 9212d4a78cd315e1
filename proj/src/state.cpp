#include "dagparse/state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dagparse {

namespace {

void normalize(SwapIndex& s) {
  while (s.log2_den > 0 && (s.num & 1) == 0) {
    s.num >>= 1;
    --s.log2_den;
  }
}

// Denominators beyond 2^100 cannot occur in oracle parses (one mean per
// created node); degenerate transition chains saturate instead of overflowing.
constexpr int kMaxLog2Den = 100;

}  // namespace

SwapIndex SwapIndex::mean(SwapIndex a, SwapIndex b) {
  int den = std::max(a.log2_den, b.log2_den);
  __int128 na = a.num << (den - a.log2_den);
  __int128 nb = b.num << (den - b.log2_den);
  SwapIndex out{na + nb, den + 1};
  normalize(out);
  if (out.log2_den > kMaxLog2Den) {
    out.num >>= (out.log2_den - kMaxLog2Den);
    out.log2_den = kMaxLog2Den;
  }
  return out;
}

bool SwapIndex::operator<(const SwapIndex& o) const {
  int den = std::max(log2_den, o.log2_den);
  return (num << (den - log2_den)) < (o.num << (den - o.log2_den));
}

bool SwapIndex::operator==(const SwapIndex& o) const {
  int den = std::max(log2_den, o.log2_den);
  return (num << (den - log2_den)) == (o.num << (den - o.log2_den));
}

double SwapIndex::to_double() const {
  return static_cast<double>(num) / std::pow(2.0, log2_den);
}

std::string SwapIndex::to_string() const {
  std::ostringstream os;
  long long hi = static_cast<long long>(num >> 64);
  unsigned long long lo = static_cast<unsigned long long>(num);
  if (hi == 0 || hi == -1) {
    os << static_cast<long long>(num);
  } else {
    os << hi << ":" << lo;
  }
  os << "/2^" << log2_den;
  return os.str();
}

bool ParserState::on_stack(int node) const {
  return std::find(stack.begin(), stack.end(), node) != stack.end();
}

bool ParserState::in_buffer(int node) const {
  return std::find(buffer.begin(), buffer.end(), node) != buffer.end();
}

ParserState initial_state(const std::vector<Token>& tokens, const std::string& graph_id) {
  if (tokens.empty()) throw DataError("initial_state: empty token list");
  ParserState st;
  st.graph = UnifiedGraph::over_tokens(tokens, graph_id);
  st.stack.push_back(st.graph.root());
  st.swap_index.resize(static_cast<std::size_t>(st.graph.node_count()));
  st.swap_index[static_cast<std::size_t>(st.graph.root())] = SwapIndex::of_int(0);
  for (int p = 1; p <= static_cast<int>(tokens.size()); ++p) {
    int t = st.graph.terminal(p);
    st.buffer.push_back(t);
    st.swap_index[static_cast<std::size_t>(t)] = SwapIndex::of_int(p);
  }
  return st;
}

namespace {

std::optional<std::string> edge_illegal(const ParserState& state, int parent, int child,
                                        const std::string& label, bool remote,
                                        const TaskConfig& task) {
  const UnifiedGraph& g = state.graph;
  if (g.node(parent).kind == NodeKind::Terminal) return "terminals are childless";
  if (child == g.root()) return "root cannot be a child";
  if (!remote && g.primary_parent_edge(child) >= 0) return "child already has a primary parent";
  if (remote && !task.remote_allowed) return "remote edges not allowed for task";
  if (g.has_edge(parent, child, label, remote)) return "duplicate edge";
  if (g.reaches(child, parent)) return "edge would create a cycle";
  if (task.terminal_single_parent && g.node(child).kind == NodeKind::Terminal &&
      g.count_parents(child) >= 1)
    return "terminal may only have one parent";
  if (!task.frames.empty() && starts_with(label, "ARG")) {
    auto it = task.frames.find(g.node(parent).label);
    if (it != task.frames.end() &&
        std::find(it->second.begin(), it->second.end(), label) == it->second.end())
      return "core argument not defined for frame";
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> illegal_reason(const ParserState& state, const Transition& t,
                                          const TaskConfig& task) {
  if (state.finished) return "state is finished";
  if (kind_creates_edge(t.kind)) {
    if (task.labeled && t.label.empty()) return "labeled task requires a label";
    if (!task.labeled && !t.label.empty()) return "unlabeled task forbids labels";
  } else if (!t.label.empty()) {
    return "transition kind takes no label";
  }
  int s0 = state.s(0), s1 = state.s(1);
  switch (t.kind) {
    case TransitionKind::Shift:
      if (state.buffer.empty()) return "buffer is empty";
      return std::nullopt;
    case TransitionKind::Reduce:
      if (s0 < 0) return "stack is empty";
      if (s0 == state.graph.root()) return "root cannot be reduced";
      if (state.graph.primary_parent_edge(s0) < 0) return "cannot reduce a parentless node";
      return std::nullopt;
    case TransitionKind::Node:
      if (s0 < 0) return "stack is empty";
      if (!task.node_allowed) return "node creation not allowed for task";
      if (s0 == state.graph.root()) return "root cannot be given a parent";
      if (state.graph.primary_parent_edge(s0) >= 0) return "child already has a primary parent";
      if (task.terminal_single_parent && state.graph.node(s0).kind == NodeKind::Terminal &&
          state.graph.count_parents(s0) >= 1)
        return "terminal may only have one parent";
      return std::nullopt;
    case TransitionKind::LeftEdge:
      if (s1 < 0) return "stack has fewer than two nodes";
      return edge_illegal(state, s0, s1, t.label, false, task);
    case TransitionKind::RightEdge:
      if (s1 < 0) return "stack has fewer than two nodes";
      return edge_illegal(state, s1, s0, t.label, false, task);
    case TransitionKind::LeftRemote:
      if (s1 < 0) return "stack has fewer than two nodes";
      return edge_illegal(state, s0, s1, t.label, true, task);
    case TransitionKind::RightRemote:
      if (s1 < 0) return "stack has fewer than two nodes";
      return edge_illegal(state, s1, s0, t.label, true, task);
    case TransitionKind::Swap:
      if (s1 < 0) return "stack has fewer than two nodes";
      if (s1 == state.graph.root()) return "root cannot be swapped";
      if (!(state.swap_index[static_cast<std::size_t>(s1)] <
            state.swap_index[static_cast<std::size_t>(s0)]))
        return "pair already swapped";
      return std::nullopt;
    case TransitionKind::Finish: {
      if (!state.buffer.empty()) return "buffer must be empty";
      const UnifiedGraph& g = state.graph;
      for (int i = 0; i < g.node_count(); ++i)
        if (i != g.root() && g.primary_parent_edge(i) < 0) return "unattached nodes remain";
      return std::nullopt;
    }
  }
  return "unknown transition";
}

bool legal(const ParserState& state, const Transition& t, const TaskConfig& task) {
  return !illegal_reason(state, t, task).has_value();
}

void apply(ParserState& state, const Transition& t, const TaskConfig& task) {
  if (auto why = illegal_reason(state, t, task))
    throw InternalError("illegal transition " + t.to_string() + ": " + *why);
  int s0 = state.s(0), s1 = state.s(1);
  switch (t.kind) {
    case TransitionKind::Shift:
      state.stack.push_back(state.buffer.front());
      state.buffer.pop_front();
      break;
    case TransitionKind::Reduce:
      state.stack.pop_back();
      break;
    case TransitionKind::Node: {
      int created = state.graph.add_node(
          {.id = "n" + std::to_string(state.graph.node_count()), .kind = NodeKind::Nonterminal});
      state.graph.add_edge(created, s0, t.label, false);
      SwapIndex idx;
      if (state.buffer.empty()) {
        idx = state.swap_index[static_cast<std::size_t>(s0)];
        idx.num += static_cast<__int128>(1) << idx.log2_den;  // kappa(s0) + 1
      } else {
        idx = SwapIndex::mean(state.swap_index[static_cast<std::size_t>(s0)],
                              state.swap_index[static_cast<std::size_t>(state.b(0))]);
      }
      state.swap_index.push_back(idx);
      state.buffer.push_front(created);
      break;
    }
    case TransitionKind::LeftEdge:
      state.graph.add_edge(s0, s1, t.label, false);
      break;
    case TransitionKind::RightEdge:
      state.graph.add_edge(s1, s0, t.label, false);
      break;
    case TransitionKind::LeftRemote:
      state.graph.add_edge(s0, s1, t.label, true);
      break;
    case TransitionKind::RightRemote:
      state.graph.add_edge(s1, s0, t.label, true);
      break;
    case TransitionKind::Swap:
      state.stack.erase(state.stack.end() - 2);
      state.buffer.push_front(s1);
      break;
    case TransitionKind::Finish:
      state.finished = true;
      break;
  }
  state.history.push_back(t);
}

ParserState applied(const ParserState& state, const Transition& t, const TaskConfig& task) {
  ParserState next = state;
  apply(next, t, task);
  return next;
}

}  // namespace dagparse
