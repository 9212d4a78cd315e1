#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dagparse/bilexical.hpp"
#include "dagparse/graph.hpp"
#include "dagparse/state.hpp"

namespace dagparse::test {

struct GenOptions {
  int min_tokens = 1;
  int max_tokens = 20;
  int max_nonterminals = 0;        // 0: up to the token count
  double root_terminal_prob = 0.1; // terminals attached directly to the root
  double remote_attempts_per_token = 0.5;
  bool terminal_remote_parents = true;  // off for UCCA-style graphs
  std::vector<std::string> labels = {"A", "C", "E", "H", "P", "U"};
};

// Random valid unified graph: primary tree over root/non-terminals/terminals
// with every non-terminal anchoring at least one terminal, plus acyclic
// remote edges.
UnifiedGraph random_graph(Rng& rng, const GenOptions& opt, const std::string& id);

// Permissive task whose label set covers the given graphs.
TaskConfig generic_task(const std::vector<UnifiedGraph>& corpus);
TaskConfig generic_task(const UnifiedGraph& gold);

// Acyclic multi-head bilexical graph; dm_style draws tops instead of
// explicit root arcs for in-degree-0 participants.
BilexicalGraph random_bilexical(Rng& rng, int max_tokens, bool dm_style, const std::string& id);

// Test-side correspondence from parser-built graphs to a gold graph,
// independent of the oracle implementation. Returns std::nullopt when the
// state graph is not a prefix of gold (wrong node/edge or duplicate).
struct GoldMatch {
  std::vector<int> node_map;       // state node -> gold node
  std::vector<bool> edge_created;  // per deduped gold edge
  int remaining_edges = 0;
  int remaining_nodes = 0;
  bool complete() const { return remaining_edges == 0 && remaining_nodes == 0; }
};
std::optional<GoldMatch> match_against_gold(const UnifiedGraph& state_graph,
                                            const UnifiedGraph& gold, bool labeled);

// Exhaustive memoized search over all legal transition sequences: is the
// gold graph still reachable from this state? The brute-force oracle for
// small instances.
class ReachSearch {
 public:
  ReachSearch(const UnifiedGraph& gold, const TaskConfig& task);
  bool reachable(const ParserState& state);
  std::size_t states_explored() const { return memo_.size(); }

 private:
  const UnifiedGraph& gold_;
  TaskConfig task_;
  std::vector<Transition> candidates_;
  std::map<std::string, bool> memo_;

  std::string signature(const ParserState& state) const;
  bool search(const ParserState& state, int depth);
};

std::string fixture_path(const std::string& name);

// Walks the optimal closure of the oracle on one instance, comparing every
// legal transition against exhaustive reachability: offered transitions must
// keep gold reachable; excluded ones must lose reachability or be
// non-productive (an unneeded Shift or Swap).
struct BfsAgreement {
  long states_checked = 0;
  long disagreements = 0;
  std::vector<std::string> notes;
};
BfsAgreement check_oracle_against_bfs(const UnifiedGraph& gold, const TaskConfig& task,
                                      std::size_t closure_cap = 20000);

}  // namespace dagparse::test
