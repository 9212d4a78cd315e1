#include "dagparse/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dagparse {

using nlohmann::json;

std::string serialize_graph(const UnifiedGraph& g) {
  json j;
  j["id"] = g.id;
  json toks = json::array();
  for (const Token& t : g.tokens) {
    toks.push_back({{"position", t.position},
                    {"text", t.text},
                    {"pos", t.pos},
                    {"dep", t.dep},
                    {"ne_iob", std::string(1, t.ne_iob)},
                    {"ne_type", t.ne_type},
                    {"shape", t.shape},
                    {"punct", t.is_punct}});
  }
  j["tokens"] = std::move(toks);
  json nodes = json::array();
  for (const Node& n : g.nodes()) {
    json jn{{"id", n.id}};
    switch (n.kind) {
      case NodeKind::Root: jn["kind"] = "root"; break;
      case NodeKind::Terminal: jn["kind"] = "terminal"; break;
      case NodeKind::Nonterminal: jn["kind"] = "nonterminal"; break;
    }
    if (n.kind == NodeKind::Terminal) jn["terminal_position"] = n.terminal_position;
    if (!n.label.empty()) jn["label"] = n.label;
    if (!n.category.empty()) jn["category"] = n.category;
    if (n.implicit) jn["implicit"] = true;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"parent", g.node(e.parent).id},
                     {"child", g.node(e.child).id},
                     {"label", e.label},
                     {"remote", e.remote}});
  }
  j["edges"] = std::move(edges);
  j["root"] = g.root() >= 0 ? g.node(g.root()).id : "";
  return j.dump();
}

namespace {

[[noreturn]] void parse_fail(int line_number, const std::string& field, const std::string& why) {
  std::ostringstream os;
  os << "parse error";
  if (line_number > 0) os << " at line " << line_number;
  if (!field.empty()) os << ", field '" << field << "'";
  os << ": " << why;
  throw DataError(os.str());
}

}  // namespace

UnifiedGraph deserialize_graph(const std::string& line, int line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    parse_fail(line_number, "", e.what());
  }
  if (!j.is_object()) parse_fail(line_number, "", "record is not a JSON object");

  UnifiedGraph g;
  g.id = j.value("id", "");
  if (!j.contains("tokens") || !j["tokens"].is_array())
    parse_fail(line_number, "tokens", "missing or not an array");
  for (const json& jt : j["tokens"]) {
    Token t;
    try {
      t.position = jt.at("position").get<int>();
      t.text = jt.at("text").get<std::string>();
    } catch (const json::exception& e) {
      parse_fail(line_number, "tokens", e.what());
    }
    t.pos = jt.value("pos", "");
    t.dep = jt.value("dep", "");
    std::string iob = jt.value("ne_iob", "O");
    t.ne_iob = iob.empty() ? 'O' : iob[0];
    t.ne_type = jt.value("ne_type", "");
    t.shape = jt.value("shape", "");
    t.is_punct = jt.value("punct", false);
    annotate_token(t);
    g.tokens.push_back(std::move(t));
  }

  if (!j.contains("nodes") || !j["nodes"].is_array())
    parse_fail(line_number, "nodes", "missing or not an array");
  std::map<std::string, int> by_id;
  for (const json& jn : j["nodes"]) {
    Node n;
    try {
      n.id = jn.at("id").get<std::string>();
    } catch (const json::exception& e) {
      parse_fail(line_number, "nodes", e.what());
    }
    std::string kind = jn.value("kind", "nonterminal");
    if (kind == "root") {
      n.kind = NodeKind::Root;
    } else if (kind == "terminal") {
      n.kind = NodeKind::Terminal;
    } else if (kind == "nonterminal") {
      n.kind = NodeKind::Nonterminal;
    } else {
      parse_fail(line_number, "kind", "unknown node kind '" + kind + "'");
    }
    n.terminal_position = jn.value("terminal_position", 0);
    n.label = jn.value("label", "");
    n.category = jn.value("category", "");
    n.implicit = jn.value("implicit", false);
    std::string node_id = n.id;
    if (by_id.count(node_id)) parse_fail(line_number, "nodes", "duplicate node id '" + node_id + "'");
    by_id[node_id] = g.add_node(std::move(n));
  }

  if (!j.contains("edges") || !j["edges"].is_array())
    parse_fail(line_number, "edges", "missing or not an array");
  for (const json& je : j["edges"]) {
    std::string parent, child;
    try {
      parent = je.at("parent").get<std::string>();
      child = je.at("child").get<std::string>();
    } catch (const json::exception& e) {
      parse_fail(line_number, "edges", e.what());
    }
    auto pi = by_id.find(parent);
    auto ci = by_id.find(child);
    if (pi == by_id.end()) parse_fail(line_number, "edges", "unknown parent '" + parent + "'");
    if (ci == by_id.end()) parse_fail(line_number, "edges", "unknown child '" + child + "'");
    g.add_edge(pi->second, ci->second, je.value("label", ""), je.value("remote", false));
  }

  std::string root_id = j.value("root", "");
  auto ri = by_id.find(root_id);
  if (ri == by_id.end()) parse_fail(line_number, "root", "unknown root '" + root_id + "'");
  g.set_root(ri->second);
  return g;
}

std::vector<UnifiedGraph> read_native(std::istream& in) {
  std::vector<UnifiedGraph> out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    out.push_back(deserialize_graph(line, line_number));
  }
  return out;
}

std::vector<UnifiedGraph> read_native_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_native(in);
}

void write_native(std::ostream& out, const std::vector<UnifiedGraph>& graphs) {
  for (const UnifiedGraph& g : graphs) out << serialize_graph(g) << '\n';
}

void write_native_file(const std::string& path, const std::vector<UnifiedGraph>& graphs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path);
  write_native(out, graphs);
}

}  // namespace dagparse
