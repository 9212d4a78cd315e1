#pragma once

#include <string>
#include <vector>

#include "dagparse/bilexical.hpp"
#include "dagparse/concept_graph.hpp"
#include "dagparse/graph.hpp"

namespace dagparse {

// Structural edge labels introduced by the converters.
inline constexpr const char* kHeadLabel = "head";
inline constexpr const char* kRootLabel = "root";
inline constexpr const char* kTopLabel = "top";
inline constexpr const char* kTerminalLabel = "terminal";
inline constexpr const char* kNameLabel = "name";
inline constexpr const char* kOrphanLabel = "orphan";

// Bilexical -> unified: a pre-terminal per token, a non-terminal per head
// token with a head-labeled edge, reentrant parents beyond the first marked
// remote (primary = lowest head position). Throws DataError on cyclic input.
UnifiedGraph from_bilexical(const BilexicalGraph& g);

// Inverse of from_bilexical; exact on its outputs (arcs as a set, tops
// preserved). Throws DataError when a non-terminal lacks a head child.
BilexicalGraph to_bilexical(const UnifiedGraph& graph);

// Anchored concept graph -> unified: concept labels kept as metadata, name
// subgraphs collapsed, numeric op suffixes removed, unaligned concepts
// without aligned descendants removed, reentrancies remote, residual cycles
// dropped with a warning.
UnifiedGraph from_concept_graph(const AnchoredConceptGraph& g,
                                std::vector<std::string>* warnings = nullptr);

// UCCA hierarchy -> unified: linkage nodes and edges removed, the rest
// preserved.
UnifiedGraph from_ucca(const UnifiedGraph& hierarchy);

}  // namespace dagparse
