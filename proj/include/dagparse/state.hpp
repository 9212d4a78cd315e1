#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "dagparse/graph.hpp"
#include "dagparse/task.hpp"

namespace dagparse {

// Exact rational swap index: num / 2^log2_den. Node transitions take the
// arithmetic mean of two indices, so denominators stay powers of two.
struct SwapIndex {
  __int128 num = 0;
  int log2_den = 0;

  static SwapIndex of_int(long long v) { return {static_cast<__int128>(v), 0}; }
  static SwapIndex mean(SwapIndex a, SwapIndex b);

  bool operator<(const SwapIndex& o) const;
  bool operator==(const SwapIndex& o) const;
  double to_double() const;
  std::string to_string() const;
};

// Parser state: stack of unresolved nodes (top = s0), buffer of remaining
// tokens and nodes (head = b0), and the graph under construction. Each node
// is in exactly one of stack, buffer, or the reduced set.
struct ParserState {
  UnifiedGraph graph;
  std::vector<int> stack;   // node indices, top at back
  std::deque<int> buffer;   // node indices, head at front
  std::vector<SwapIndex> swap_index;  // per node index
  std::vector<Transition> history;
  bool finished = false;

  int s(int i) const {  // stack node i from the top, -1 if absent
    int idx = static_cast<int>(stack.size()) - 1 - i;
    return idx >= 0 ? stack[static_cast<std::size_t>(idx)] : -1;
  }
  int b(int i) const {  // buffer node i from the head, -1 if absent
    return i < static_cast<int>(buffer.size()) ? buffer[static_cast<std::size_t>(i)] : -1;
  }
  bool on_stack(int node) const;
  bool in_buffer(int node) const;
  bool reduced(int node) const { return !on_stack(node) && !in_buffer(node); }
};

// Root on the stack, terminals in the buffer; root swap index 0, terminal i
// swap index i. Throws DataError on an empty token list.
ParserState initial_state(const std::vector<Token>& tokens, const std::string& graph_id = "");

// Name of the violated rule, or nullopt when legal.
std::optional<std::string> illegal_reason(const ParserState& state, const Transition& t,
                                          const TaskConfig& task);
bool legal(const ParserState& state, const Transition& t, const TaskConfig& task);

// Applies a legal transition in place; throws InternalError naming the
// violated rule otherwise.
void apply(ParserState& state, const Transition& t, const TaskConfig& task);

// Value-semantics convenience for search code.
ParserState applied(const ParserState& state, const Transition& t, const TaskConfig& task);

}  // namespace dagparse
