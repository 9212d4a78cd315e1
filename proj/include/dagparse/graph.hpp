#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dagparse/util.hpp"

namespace dagparse {

// Token annotations are consumed as input; only shape/prefix/suffix are
// derived from the text (see annotate_token).
struct Token {
  int position = 0;  // 1-based
  std::string text;
  std::string pos;
  std::string dep;
  char ne_iob = 'O';  // O, B or I
  std::string ne_type;
  std::string shape;
  bool is_punct = false;
};

// Fills shape from text when absent and normalizes ne_iob.
void annotate_token(Token& t);

enum class NodeKind { Root, Terminal, Nonterminal };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Nonterminal;
  int terminal_position = 0;  // terminals only, 1-based
  std::string label;          // AMR concept, metadata only
  std::string category;       // AMR, metadata only
  bool implicit = false;
};

struct Edge {
  int parent = -1;  // node index
  int child = -1;   // node index
  std::string label;
  bool remote = false;

  bool operator==(const Edge& o) const = default;
};

struct Violation {
  std::string rule;    // name of the violated invariant
  std::string detail;  // offending node/edge
};

// Rooted labeled DAG over tokens: primary edges form a tree, remote edges
// add reentrancy. Terminals are exactly the tokens. Construction is
// single-writer; a constructed graph is shared read-only.
class UnifiedGraph {
 public:
  std::string id;
  std::vector<Token> tokens;

  UnifiedGraph() = default;

  // Builds root + terminal nodes for the given tokens.
  static UnifiedGraph over_tokens(std::vector<Token> tokens, std::string graph_id = "");

  int add_node(Node n);                                   // returns node index
  int add_edge(int parent, int child, const std::string& label, bool remote);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  Node& node_mut(int i) { return nodes_.at(static_cast<std::size_t>(i)); }
  const Edge& edge(int i) const { return edges_.at(static_cast<std::size_t>(i)); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  int root() const { return root_; }
  void set_root(int i) { root_ = i; }
  int find_node(const std::string& node_id) const;        // -1 if absent
  int terminal(int position) const;                       // node index of token at position

  // Edge indices, in creation order.
  const std::vector<int>& parent_edges(int node) const { return parents_.at(static_cast<std::size_t>(node)); }
  const std::vector<int>& child_edges(int node) const { return children_.at(static_cast<std::size_t>(node)); }
  // Index of the node's primary parent edge, or -1.
  int primary_parent_edge(int node) const { return primary_parent_.at(static_cast<std::size_t>(node)); }
  int primary_parent(int node) const;                     // parent node index or -1
  bool has_edge(int parent, int child, const std::string& label, bool remote) const;
  bool has_any_edge(int parent, int child) const;

  // True if `to` is reachable from `from` over all edges (primary + remote).
  bool reaches(int from, int to) const;

  std::vector<Violation> validate() const;

  // Positions of terminals reachable via primary edges (sorted). Terminals
  // yield their own position.
  std::vector<int> terminal_yield(int node) const;
  // 0 for terminals, otherwise 1 + max primary-child height.
  int node_height(int node) const;

  // Counts used as classifier features.
  int count_parents(int node) const { return static_cast<int>(parents_[static_cast<std::size_t>(node)].size()); }
  int count_children(int node) const { return static_cast<int>(children_[static_cast<std::size_t>(node)].size()); }
  int count_remote_parents(int node) const;
  int count_remote_children(int node) const;
  int count_implicit_children(int node) const;
  int count_nonterminals() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> parents_;   // per node: incoming edge indices
  std::vector<std::vector<int>> children_;  // per node: outgoing edge indices
  std::vector<int> primary_parent_;         // per node: primary incoming edge or -1
  int root_ = -1;

  void yield_into(int node, std::vector<bool>& seen, std::vector<int>& out) const;
};

}  // namespace dagparse
