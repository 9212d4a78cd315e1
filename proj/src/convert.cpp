#include "dagparse/convert.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

namespace dagparse {

UnifiedGraph from_bilexical(const BilexicalGraph& g) {
  auto cycle = g.find_cycle();
  if (!cycle.empty()) {
    std::string nodes;
    for (int p : cycle) nodes += (nodes.empty() ? "" : ",") + std::to_string(p);
    throw DataError("cyclic bilexical graph '" + g.id + "' (positions " + nodes + ")");
  }
  int n = static_cast<int>(g.tokens.size());
  for (const Arc& a : g.arcs)
    if (a.dependent < 1 || a.dependent > n || a.head < 0 || a.head > n)
      throw DataError("arc out of range in '" + g.id + "'");

  UnifiedGraph u = UnifiedGraph::over_tokens(g.tokens, g.id);

  std::set<int> heads;
  std::vector<std::vector<Arc>> parents(static_cast<std::size_t>(n) + 1);
  std::vector<bool> participates(static_cast<std::size_t>(n) + 1, false);
  for (const Arc& a : g.arcs) {
    participates[static_cast<std::size_t>(a.dependent)] = true;
    if (a.head != 0) {
      heads.insert(a.head);
      participates[static_cast<std::size_t>(a.head)] = true;
    }
    parents[static_cast<std::size_t>(a.dependent)].push_back(a);
  }
  for (int top : g.tops) participates[static_cast<std::size_t>(top)] = true;
  // Root-attached tokens get a unit non-terminal too: the root's children
  // are units, never bare pre-terminals (orphans excepted).
  std::set<int> units = heads;
  for (int top : g.tops) units.insert(top);
  for (const Arc& a : g.arcs)
    if (a.head == 0) units.insert(a.dependent);
  for (int d = 1; d <= n; ++d)
    if (participates[static_cast<std::size_t>(d)] &&
        parents[static_cast<std::size_t>(d)].empty() && !g.tops.count(d))
      units.insert(d);

  std::vector<int> pre(static_cast<std::size_t>(n) + 1, -1);
  for (int i = 1; i <= n; ++i)
    pre[static_cast<std::size_t>(i)] =
        u.add_node({.id = "p" + std::to_string(i), .kind = NodeKind::Nonterminal});
  std::map<int, int> head_node;
  for (int h : units)
    head_node[h] = u.add_node({.id = "n" + std::to_string(h), .kind = NodeKind::Nonterminal});

  auto unit = [&](int position) {
    auto it = head_node.find(position);
    return it != head_node.end() ? it->second : pre[static_cast<std::size_t>(position)];
  };

  for (int i = 1; i <= n; ++i)
    u.add_edge(pre[static_cast<std::size_t>(i)], u.terminal(i), kTerminalLabel, false);
  for (int h : units) u.add_edge(head_node[h], pre[static_cast<std::size_t>(h)], kHeadLabel, false);

  for (int d = 1; d <= n; ++d) {
    std::vector<Arc> ps = parents[static_cast<std::size_t>(d)];
    std::sort(ps.begin(), ps.end());
    bool is_top = g.tops.count(d) > 0;
    bool has_primary = false;
    if (is_top) {
      // Top marking takes the primary slot, demoting arc parents to remote.
      u.add_edge(u.root(), unit(d), kTopLabel, false);
      has_primary = true;
    }
    for (const Arc& a : ps) {
      if (a.head == 0) {
        if (is_top) continue;  // top replaces root
        u.add_edge(u.root(), unit(d), a.label, has_primary);
        has_primary = true;
      } else {
        // Lowest head position is primary; the rest are remote.
        u.add_edge(head_node.at(a.head), unit(d), a.label, has_primary);
        has_primary = true;
      }
    }
    if (!has_primary) {
      if (participates[static_cast<std::size_t>(d)]) {
        u.add_edge(u.root(), unit(d), kRootLabel, false);  // in-degree-0 original root
      } else {
        u.add_edge(u.root(), unit(d), kOrphanLabel, false);
      }
    }
  }
  return u;
}

namespace {

int head_position_of(const UnifiedGraph& g, int node) {
  if (g.node(node).kind == NodeKind::Terminal) return g.node(node).terminal_position;
  int head_child = -1, terminal_child = -1;
  for (int e : g.child_edges(node)) {
    const Edge& ed = g.edge(e);
    if (ed.remote) continue;
    if (ed.label == kHeadLabel && head_child < 0) head_child = ed.child;
    if (ed.label == kTerminalLabel && terminal_child < 0) terminal_child = ed.child;
  }
  if (head_child >= 0) return head_position_of(g, head_child);
  if (terminal_child >= 0) return head_position_of(g, terminal_child);
  throw DataError("inverse conversion: non-terminal '" + g.node(node).id +
                  "' lacks a head child");
}

}  // namespace

BilexicalGraph to_bilexical(const UnifiedGraph& graph) {
  BilexicalGraph g;
  g.id = graph.id;
  g.tokens = graph.tokens;
  for (const Edge& e : graph.edges()) {
    if (e.label == kTerminalLabel || e.label == kHeadLabel) continue;
    int dep = head_position_of(graph, e.child);
    if (e.parent == graph.root()) {
      if (e.label == kTopLabel) {
        g.tops.insert(dep);
      } else if (e.label != kOrphanLabel) {
        g.arcs.push_back({0, dep, e.label});
      }
    } else {
      g.arcs.push_back({head_position_of(graph, e.parent), dep, e.label});
    }
  }
  std::sort(g.arcs.begin(), g.arcs.end());
  g.arcs.erase(std::unique(g.arcs.begin(), g.arcs.end()), g.arcs.end());
  return g;
}

namespace {

std::string strip_op_suffix(const std::string& label) {
  if (label.size() > 2 && label.compare(0, 2, "op") == 0) {
    bool digits = true;
    for (std::size_t i = 2; i < label.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(label[i]))) digits = false;
    if (digits) return "op";
  }
  return label;
}

}  // namespace

UnifiedGraph from_concept_graph(const AnchoredConceptGraph& g,
                                std::vector<std::string>* warnings) {
  if (g.root.empty()) throw DataError("concept graph '" + g.id + "' has no root");
  std::map<std::string, const Concept*> by_id;
  for (const Concept& c : g.concepts) by_id[c.id] = &c;
  if (!by_id.count(g.root)) throw DataError("concept graph '" + g.id + "': unknown root concept");

  auto aligned_positions = [&](const std::string& cid) {
    auto it = g.alignments.find(cid);
    return it == g.alignments.end() ? std::set<int>{} : it->second;
  };

  // Collapse name subgraphs: the name node and its constant leaf children go
  // away; their parents point straight at the name tokens.
  std::set<std::string> removed;
  std::map<std::string, std::set<int>> name_positions;  // parent concept -> token positions
  std::map<std::string, std::vector<std::string>> children_of;
  for (const Relation& r : g.relations) children_of[r.source].push_back(r.target);
  for (const Concept& c : g.concepts) {
    if (c.label != kNameLabel || c.constant) continue;
    std::set<int> positions = aligned_positions(c.id);
    std::set<std::string> absorbed{c.id};
    for (const std::string& child : children_of[c.id]) {
      auto it = by_id.find(child);
      if (it == by_id.end()) continue;
      if (it->second->constant && children_of[child].empty()) {
        for (int p : aligned_positions(child)) positions.insert(p);
        absorbed.insert(child);
      }
    }
    for (const Relation& r : g.relations)
      if (r.target == c.id && !absorbed.count(r.source))
        for (int p : positions) name_positions[r.source].insert(p);
    for (const std::string& a : absorbed) removed.insert(a);
  }
  if (removed.count(g.root)) throw DataError("concept graph '" + g.id + "': root collapsed away");

  // A concept is implicit when neither it nor any descendant is aligned;
  // implicit concepts are dropped.
  std::map<std::string, bool> has_aligned;
  std::function<bool(const std::string&, std::set<std::string>&)> aligned_desc =
      [&](const std::string& cid, std::set<std::string>& on_path) -> bool {
    auto memo = has_aligned.find(cid);
    if (memo != has_aligned.end()) return memo->second;
    if (!aligned_positions(cid).empty() || name_positions.count(cid))
      return has_aligned[cid] = true;
    if (on_path.count(cid)) return false;  // cycle, resolved by other paths
    on_path.insert(cid);
    bool found = false;
    for (const std::string& child : children_of[cid])
      if (!removed.count(child) && by_id.count(child) && aligned_desc(child, on_path)) found = true;
    on_path.erase(cid);
    return has_aligned[cid] = found;
  };
  for (const Concept& c : g.concepts) {
    if (removed.count(c.id)) continue;
    std::set<std::string> on_path;
    if (!aligned_desc(c.id, on_path)) removed.insert(c.id);
  }
  if (removed.count(g.root)) throw DataError("concept graph '" + g.id + "': root is implicit");

  UnifiedGraph u = UnifiedGraph::over_tokens(g.tokens, g.id);
  std::map<std::string, int> node_of;
  for (const Concept& c : g.concepts) {
    if (removed.count(c.id)) continue;
    std::string nid = c.id;
    if (u.find_node(nid) >= 0) nid = "c:" + nid;
    node_of[c.id] = u.add_node({.id = nid,
                                .kind = NodeKind::Nonterminal,
                                .label = c.label,
                                .category = c.constant ? "constant" : ""});
  }

  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back("graph '" + g.id + "': " + msg);
  };

  // Adds primary when the child has no primary parent yet; reentrancies are
  // remote; edges that would close a cycle are dropped.
  auto attach = [&](int parent, int child, const std::string& label) {
    if (parent == child) {
      warn("self relation on '" + u.node(parent).id + "' dropped");
      return;
    }
    if (u.reaches(child, parent)) {
      warn("cycle through '" + u.node(parent).id + "'->'" + u.node(child).id +
           "' broken by dropping the edge");
      return;
    }
    bool primary = u.primary_parent_edge(child) < 0;
    if (!u.has_edge(parent, child, label, !primary)) u.add_edge(parent, child, label, !primary);
  };

  attach(u.root(), node_of.at(g.root), kRootLabel);
  for (const Relation& r : g.relations) {
    auto si = node_of.find(r.source);
    auto ti = node_of.find(r.target);
    if (si == node_of.end() || ti == node_of.end()) continue;  // collapsed or implicit
    attach(si->second, ti->second, strip_op_suffix(r.label));
  }
  for (const Concept& c : g.concepts) {
    if (removed.count(c.id)) continue;
    auto np = name_positions.find(c.id);
    if (np != name_positions.end())
      for (int p : np->second) attach(node_of.at(c.id), u.terminal(p), kNameLabel);
    for (int p : aligned_positions(c.id)) attach(node_of.at(c.id), u.terminal(p), kTerminalLabel);
  }
  for (int p = 1; p <= static_cast<int>(g.tokens.size()); ++p)
    if (u.primary_parent_edge(u.terminal(p)) < 0)
      u.add_edge(u.root(), u.terminal(p), kOrphanLabel, false);
  return u;
}

UnifiedGraph from_ucca(const UnifiedGraph& hierarchy) {
  // Linkage nodes are the ones with outgoing LR/LA edges.
  std::set<int> linkage;
  for (const Edge& e : hierarchy.edges())
    if (e.label == "LR" || e.label == "LA") linkage.insert(e.parent);

  UnifiedGraph u;
  u.id = hierarchy.id;
  u.tokens = hierarchy.tokens;
  std::map<int, int> remap;
  for (int i = 0; i < hierarchy.node_count(); ++i) {
    if (linkage.count(i)) continue;
    remap[i] = u.add_node(hierarchy.node(i));
  }
  if (!remap.count(hierarchy.root())) throw DataError("from_ucca: root was a linkage node");
  u.set_root(remap.at(hierarchy.root()));
  for (const Edge& e : hierarchy.edges()) {
    if (linkage.count(e.parent) || linkage.count(e.child)) continue;
    u.add_edge(remap.at(e.parent), remap.at(e.child), e.label, e.remote);
  }
  return u;
}

}  // namespace dagparse
