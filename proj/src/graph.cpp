#include "dagparse/graph.hpp"

#include <algorithm>
#include <functional>

namespace dagparse {

void annotate_token(Token& t) {
  if (t.shape.empty()) t.shape = word_shape(t.text);
  if (t.ne_iob != 'B' && t.ne_iob != 'I') t.ne_iob = 'O';
}

UnifiedGraph UnifiedGraph::over_tokens(std::vector<Token> tokens, std::string graph_id) {
  UnifiedGraph g;
  g.id = std::move(graph_id);
  g.tokens = std::move(tokens);
  g.set_root(g.add_node({.id = "r", .kind = NodeKind::Root}));
  for (const Token& t : g.tokens) {
    g.add_node({.id = "t" + std::to_string(t.position),
                .kind = NodeKind::Terminal,
                .terminal_position = t.position});
  }
  return g;
}

int UnifiedGraph::add_node(Node n) {
  nodes_.push_back(std::move(n));
  parents_.emplace_back();
  children_.emplace_back();
  primary_parent_.push_back(-1);
  return static_cast<int>(nodes_.size()) - 1;
}

int UnifiedGraph::add_edge(int parent, int child, const std::string& label, bool remote) {
  if (parent < 0 || parent >= node_count() || child < 0 || child >= node_count())
    throw InternalError("add_edge: node index out of range");
  edges_.push_back({parent, child, label, remote});
  int idx = static_cast<int>(edges_.size()) - 1;
  children_[static_cast<std::size_t>(parent)].push_back(idx);
  parents_[static_cast<std::size_t>(child)].push_back(idx);
  if (!remote && primary_parent_[static_cast<std::size_t>(child)] < 0)
    primary_parent_[static_cast<std::size_t>(child)] = idx;
  return idx;
}

int UnifiedGraph::find_node(const std::string& node_id) const {
  for (int i = 0; i < node_count(); ++i)
    if (nodes_[static_cast<std::size_t>(i)].id == node_id) return i;
  return -1;
}

int UnifiedGraph::terminal(int position) const {
  for (int i = 0; i < node_count(); ++i) {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.kind == NodeKind::Terminal && n.terminal_position == position) return i;
  }
  return -1;
}

int UnifiedGraph::primary_parent(int node) const {
  int e = primary_parent_edge(node);
  return e < 0 ? -1 : edges_[static_cast<std::size_t>(e)].parent;
}

bool UnifiedGraph::has_edge(int parent, int child, const std::string& label, bool remote) const {
  for (int e : children_[static_cast<std::size_t>(parent)]) {
    const Edge& ed = edges_[static_cast<std::size_t>(e)];
    if (ed.child == child && ed.label == label && ed.remote == remote) return true;
  }
  return false;
}

bool UnifiedGraph::has_any_edge(int parent, int child) const {
  for (int e : children_[static_cast<std::size_t>(parent)])
    if (edges_[static_cast<std::size_t>(e)].child == child) return true;
  return false;
}

bool UnifiedGraph::reaches(int from, int to) const {
  if (from == to) return true;
  std::vector<bool> seen(static_cast<std::size_t>(node_count()), false);
  std::vector<int> work{from};
  seen[static_cast<std::size_t>(from)] = true;
  while (!work.empty()) {
    int cur = work.back();
    work.pop_back();
    for (int e : children_[static_cast<std::size_t>(cur)]) {
      int next = edges_[static_cast<std::size_t>(e)].child;
      if (next == to) return true;
      if (!seen[static_cast<std::size_t>(next)]) {
        seen[static_cast<std::size_t>(next)] = true;
        work.push_back(next);
      }
    }
  }
  return false;
}

std::vector<Violation> UnifiedGraph::validate() const {
  std::vector<Violation> out;
  auto add = [&](const std::string& rule, const std::string& detail) {
    out.push_back({rule, detail});
  };

  if (root_ < 0 || root_ >= node_count()) {
    add("single-root", "graph has no root");
    return out;
  }
  int root_count = 0;
  for (const Node& n : nodes_)
    if (n.kind == NodeKind::Root) ++root_count;
  if (root_count != 1) add("single-root", "graph has " + std::to_string(root_count) + " root nodes");
  if (node(root_).kind != NodeKind::Root) add("single-root", "root reference is not a root node");
  if (!parents_[static_cast<std::size_t>(root_)].empty()) add("root-has-no-parent", "node " + node(root_).id);

  // Primary edges form a tree: every non-root node has exactly one primary parent.
  for (int i = 0; i < node_count(); ++i) {
    if (i == root_) continue;
    int primaries = 0;
    for (int e : parents_[static_cast<std::size_t>(i)])
      if (!edges_[static_cast<std::size_t>(e)].remote) ++primaries;
    if (primaries != 1)
      add("single-primary-parent",
          "node " + node(i).id + " has " + std::to_string(primaries) + " primary parents");
  }

  // Acyclicity of primary + remote edges together.
  {
    std::vector<int> color(static_cast<std::size_t>(node_count()), 0);  // 0 new, 1 open, 2 done
    bool cyclic = false;
    std::function<void(int)> dfs = [&](int u) {
      color[static_cast<std::size_t>(u)] = 1;
      for (int e : children_[static_cast<std::size_t>(u)]) {
        int v = edges_[static_cast<std::size_t>(e)].child;
        if (color[static_cast<std::size_t>(v)] == 1) {
          cyclic = true;
        } else if (color[static_cast<std::size_t>(v)] == 0) {
          dfs(v);
        }
      }
      color[static_cast<std::size_t>(u)] = 2;
    };
    for (int i = 0; i < node_count() && !cyclic; ++i)
      if (color[static_cast<std::size_t>(i)] == 0) dfs(i);
    if (cyclic) add("acyclicity", "primary+remote edges contain a cycle");
  }

  // Terminals are exactly the tokens, childless, anchored to distinct positions.
  {
    for (std::size_t i = 0; i < tokens.size(); ++i)
      if (tokens[i].position != static_cast<int>(i) + 1)
        add("token-positions", "token " + std::to_string(i + 1) + " carries position " +
                                   std::to_string(tokens[i].position));
    std::vector<int> anchor_count(tokens.size() + 1, 0);
    for (int i = 0; i < node_count(); ++i) {
      const Node& n = node(i);
      if (n.kind == NodeKind::Terminal) {
        if (!children_[static_cast<std::size_t>(i)].empty())
          add("terminal-childless", "terminal " + n.id + " has children");
        if (n.terminal_position < 1 || n.terminal_position > static_cast<int>(tokens.size()))
          add("terminal-anchoring", "terminal " + n.id + " anchored outside 1..n");
        else
          ++anchor_count[static_cast<std::size_t>(n.terminal_position)];
      } else if (n.terminal_position != 0) {
        add("terminal-anchoring", "non-terminal " + n.id + " has a terminal position");
      }
    }
    for (std::size_t p = 1; p < anchor_count.size(); ++p)
      if (anchor_count[p] != 1)
        add("terminal-anchoring",
            "position " + std::to_string(p) + " anchored by " + std::to_string(anchor_count[p]) +
                " terminals");
  }

  // No self loops; edge tuples unique.
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.parent == e.child) add("no-self-loop", "edge on node " + node(e.parent).id);
    for (std::size_t j = i + 1; j < edges_.size(); ++j)
      if (edges_[j] == e)
        add("unique-edges", "duplicate edge " + node(e.parent).id + "->" + node(e.child).id);
  }

  // Implicit nodes have no terminal descendants.
  for (int i = 0; i < node_count(); ++i)
    if (node(i).implicit && !terminal_yield(i).empty())
      add("implicit-no-terminals", "implicit node " + node(i).id + " has terminal descendants");

  return out;
}

void UnifiedGraph::yield_into(int node, std::vector<bool>& seen, std::vector<int>& out) const {
  if (seen[static_cast<std::size_t>(node)]) return;
  seen[static_cast<std::size_t>(node)] = true;
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  if (n.kind == NodeKind::Terminal) {
    out.push_back(n.terminal_position);
    return;
  }
  for (int e : children_[static_cast<std::size_t>(node)]) {
    const Edge& ed = edges_[static_cast<std::size_t>(e)];
    if (!ed.remote) yield_into(ed.child, seen, out);
  }
}

std::vector<int> UnifiedGraph::terminal_yield(int node) const {
  if (node < 0 || node >= node_count()) throw DataError("terminal_yield: unknown node");
  std::vector<bool> seen(static_cast<std::size_t>(node_count()), false);
  std::vector<int> out;
  yield_into(node, seen, out);
  std::sort(out.begin(), out.end());
  return out;
}

int UnifiedGraph::node_height(int node) const {
  if (node < 0 || node >= node_count()) throw DataError("node_height: unknown node");
  std::vector<int> memo(static_cast<std::size_t>(node_count()), -1);
  std::function<int(int)> rec = [&](int u) -> int {
    int& m = memo[static_cast<std::size_t>(u)];
    if (m >= 0) return m;
    m = 0;  // breaks cycles defensively; valid graphs are acyclic
    if (nodes_[static_cast<std::size_t>(u)].kind == NodeKind::Terminal) return m = 0;
    int h = 0;
    for (int e : children_[static_cast<std::size_t>(u)]) {
      const Edge& ed = edges_[static_cast<std::size_t>(e)];
      if (!ed.remote) h = std::max(h, 1 + rec(ed.child));
    }
    return m = h;
  };
  return rec(node);
}

int UnifiedGraph::count_remote_parents(int node) const {
  int c = 0;
  for (int e : parents_[static_cast<std::size_t>(node)])
    if (edges_[static_cast<std::size_t>(e)].remote) ++c;
  return c;
}

int UnifiedGraph::count_remote_children(int node) const {
  int c = 0;
  for (int e : children_[static_cast<std::size_t>(node)])
    if (edges_[static_cast<std::size_t>(e)].remote) ++c;
  return c;
}

int UnifiedGraph::count_implicit_children(int node) const {
  int c = 0;
  for (int e : children_[static_cast<std::size_t>(node)])
    if (nodes_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(e)].child)].implicit) ++c;
  return c;
}

int UnifiedGraph::count_nonterminals() const {
  int c = 0;
  for (const Node& n : nodes_)
    if (n.kind == NodeKind::Nonterminal) ++c;
  return c;
}

}  // namespace dagparse
