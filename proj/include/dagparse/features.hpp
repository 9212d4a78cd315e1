#pragma once

#include <array>
#include <string>
#include <vector>

#include "dagparse/state.hpp"

namespace dagparse {

// Node target slots of the feature table, in emission order.
enum class Slot {
  S0, S1, S2, S3, B0, B1, B2, B3,
  S0l, S0r, S1l, S1r,
  S0ll, S0lr, S0rl, S0rr, S1ll, S1lr, S1rl, S1rr,
  S0L, S0R, S1L, S1R, B0L, B0R,
};
constexpr int kSlotCount = 26;
const char* slot_name(Slot s);

struct FeatureTemplate {
  std::string id;    // e.g. "s0.w", "s0>s1.x", "a0.A", "node_ratio"
  char code = 0;     // feature code character, 0 for misc
  int group = -1;    // node target group 0..25, -1 for edge/action/misc rows
  bool numeric = false;
};

struct FeatureValue {
  bool none = true;
  double num = 0;
  std::string cat;  // categorical value when !none and template is categorical
};

struct FeatureVector {
  std::vector<FeatureValue> values;                // one per template, fixed arity
  std::array<int, kSlotCount> head_position{};     // per slot: head terminal position or 0
  std::array<int, kSlotCount> slot_node{};         // per slot: node index or -1
};

// Mirrors the feature table: per-slot code strings, edge rows, action rows,
// misc. Tasks can drop codes by editing the rows.
struct FeatureConfig {
  std::vector<std::pair<std::string, std::string>> node_rows;  // slot name -> codes
  std::vector<std::pair<std::string, std::string>> edge_rows;  // "s0>s1" -> codes
  std::vector<std::pair<std::string, std::string>> action_rows;  // "a0" -> codes
  bool node_ratio = true;

  static FeatureConfig full();     // the complete feature table
  static FeatureConfig compact();  // s0/s1/b0 subset for tiny models
  static FeatureConfig from_json_text(const std::string& text);
  static FeatureConfig load(const std::string& path);
  std::string to_json_text() const;

  const std::vector<FeatureTemplate>& templates() const;  // built lazily, cached

 private:
  mutable std::vector<FeatureTemplate> templates_;
};

// Head terminal by descending through primary edges, choosing at each step
// the child whose edge label comes earliest in `priority` (ties: leftmost
// yield). Returns -1 when the node has no terminal descendant.
int head_terminal(const UnifiedGraph& g, int node, const std::vector<std::string>& priority);

// (gap type, gap length sum) of the node's terminal yield. Type 0 is
// contiguous, 1 a single gap, 2 multiple gaps.
std::pair<int, int> gap_features(const UnifiedGraph& g, int node);

// Default head priority (UCCA elaboration order).
const std::vector<std::string>& default_head_priority();

FeatureVector extract(const ParserState& state, const FeatureConfig& config,
                      const std::vector<std::string>& head_priority);

}  // namespace dagparse
