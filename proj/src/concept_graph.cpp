#include "dagparse/concept_graph.hpp"

#include <fstream>

#include "json.hpp"

namespace dagparse {

using nlohmann::json;

AnchoredConceptGraph parse_concept_graph(const std::string& line, int line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DataError("parse error at line " + std::to_string(line_number) + ": " + e.what());
  }
  AnchoredConceptGraph g;
  g.id = j.value("id", "");
  if (!j.contains("tokens") || !j["tokens"].is_array())
    throw DataError("line " + std::to_string(line_number) + ": missing tokens");
  for (const json& jt : j["tokens"]) {
    Token t;
    t.position = jt.at("position").get<int>();
    t.text = jt.at("text").get<std::string>();
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
  for (const json& jc : j.value("concepts", json::array())) {
    Concept c;
    c.id = jc.at("id").get<std::string>();
    c.label = jc.value("label", "");
    c.constant = jc.value("constant", false);
    g.concepts.push_back(std::move(c));
  }
  for (const json& jr : j.value("relations", json::array())) {
    g.relations.push_back({jr.at("source").get<std::string>(),
                           jr.at("target").get<std::string>(),
                           jr.value("label", "")});
  }
  if (j.contains("alignments")) {
    for (auto it = j["alignments"].begin(); it != j["alignments"].end(); ++it) {
      std::set<int>& positions = g.alignments[it.key()];
      for (const json& p : it.value()) {
        int pos = p.get<int>();
        if (pos < 1 || pos > static_cast<int>(g.tokens.size()))
          throw DataError("line " + std::to_string(line_number) + ": alignment outside 1..n");
        positions.insert(pos);
      }
    }
  }
  g.root = j.value("root", "");
  return g;
}

std::vector<AnchoredConceptGraph> read_concept_graphs(std::istream& in) {
  std::vector<AnchoredConceptGraph> out;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    out.push_back(parse_concept_graph(line, line_number));
  }
  return out;
}

std::vector<AnchoredConceptGraph> read_concept_graphs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_concept_graphs(in);
}

}  // namespace dagparse
