#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dagparse/graph.hpp"

namespace dagparse {

// Native format: one JSON object per line per graph. Unknown fields are
// ignored on read and never emitted.
std::string serialize_graph(const UnifiedGraph& g);
UnifiedGraph deserialize_graph(const std::string& line, int line_number = 0);

std::vector<UnifiedGraph> read_native(std::istream& in);
std::vector<UnifiedGraph> read_native_file(const std::string& path);
void write_native(std::ostream& out, const std::vector<UnifiedGraph>& graphs);
void write_native_file(const std::string& path, const std::vector<UnifiedGraph>& graphs);

}  // namespace dagparse
