#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "dagparse/graph.hpp"

namespace dagparse {

struct Arc {
  int head = 0;  // 0 denotes a root arc
  int dependent = 0;
  std::string label;

  auto operator<=>(const Arc&) const = default;
};

// Bilexical dependency graph: arcs over token positions, reentrancy allowed,
// cycles rejected on ingest. `tops` marks DM top nodes.
struct BilexicalGraph {
  std::string id;
  std::vector<Token> tokens;
  std::vector<Arc> arcs;
  std::set<int> tops;

  // Positions forming a cycle, empty if acyclic.
  std::vector<int> find_cycle() const;
};

// CoNLL-U: 10 tab-separated columns, comment lines ignored, multi-word token
// ranges and empty nodes skipped. The DEPS column contributes extra arcs.
std::vector<BilexicalGraph> read_conllu(std::istream& in);
std::vector<BilexicalGraph> read_conllu_file(const std::string& path);
void write_conllu(std::ostream& out, const std::vector<BilexicalGraph>& graphs);

// SDP 2015 closed-track tab format.
std::vector<BilexicalGraph> read_sdp(std::istream& in);
std::vector<BilexicalGraph> read_sdp_file(const std::string& path);
void write_sdp(std::ostream& out, const std::vector<BilexicalGraph>& graphs);

}  // namespace dagparse
