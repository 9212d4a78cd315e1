#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dagparse/graph.hpp"

namespace dagparse {

struct Concept {
  std::string id;
  std::string label;
  bool constant = false;
};

struct Relation {
  std::string source;
  std::string target;
  std::string label;
};

// AMR-like anchored concept graph: rooted, concepts aligned to token
// positions. Cycles are permitted on ingest and resolved during conversion.
struct AnchoredConceptGraph {
  std::string id;
  std::vector<Token> tokens;
  std::vector<Concept> concepts;
  std::vector<Relation> relations;
  std::map<std::string, std::set<int>> alignments;  // concept id -> positions
  std::string root;                                 // concept id
};

// Ingest from the native JSON-lines format extended with concepts /
// relations / alignments fields.
std::vector<AnchoredConceptGraph> read_concept_graphs(std::istream& in);
std::vector<AnchoredConceptGraph> read_concept_graphs_file(const std::string& path);
AnchoredConceptGraph parse_concept_graph(const std::string& line, int line_number = 0);

}  // namespace dagparse
