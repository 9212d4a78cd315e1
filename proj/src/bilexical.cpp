#include "dagparse/bilexical.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace dagparse {

namespace {

bool looks_like_punct(const std::string& text, const std::string& pos) {
  if (pos == "PUNCT") return true;
  if (text.empty()) return false;
  for (unsigned char c : text)
    if (!std::ispunct(c)) return false;
  return true;
}

[[noreturn]] void line_fail(int line_number, const std::string& why) {
  throw DataError("parse error at line " + std::to_string(line_number) + ": " + why);
}

int parse_position(const std::string& s, int line_number) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size() || v < 0) line_fail(line_number, "bad position '" + s + "'");
    return v;
  } catch (const std::exception&) {
    line_fail(line_number, "bad position '" + s + "'");
  }
}

}  // namespace

std::vector<int> BilexicalGraph::find_cycle() const {
  int n = static_cast<int>(tokens.size());
  std::vector<std::vector<int>> next(static_cast<std::size_t>(n) + 1);
  for (const Arc& a : arcs)
    if (a.head >= 1 && a.head <= n && a.dependent >= 1 && a.dependent <= n)
      next[static_cast<std::size_t>(a.head)].push_back(a.dependent);
  std::vector<int> color(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> path;
  std::vector<int> cycle;
  std::function<bool(int)> dfs = [&](int u) {
    color[static_cast<std::size_t>(u)] = 1;
    path.push_back(u);
    for (int v : next[static_cast<std::size_t>(u)]) {
      if (color[static_cast<std::size_t>(v)] == 1) {
        auto it = std::find(path.begin(), path.end(), v);
        cycle.assign(it, path.end());
        return true;
      }
      if (color[static_cast<std::size_t>(v)] == 0 && dfs(v)) return true;
    }
    path.pop_back();
    color[static_cast<std::size_t>(u)] = 2;
    return false;
  };
  for (int u = 1; u <= n; ++u)
    if (color[static_cast<std::size_t>(u)] == 0 && dfs(u)) return cycle;
  return {};
}

// ---------------------------------------------------------------------------
// CoNLL-U

std::vector<BilexicalGraph> read_conllu(std::istream& in) {
  std::vector<BilexicalGraph> out;
  BilexicalGraph cur;
  std::string pending_id;
  bool in_sentence = false;
  std::string line;
  int line_number = 0;

  auto flush = [&]() {
    if (!in_sentence) return;
    if (cur.tokens.empty()) line_fail(line_number, "empty sentence block");
    if (cur.id.empty()) cur.id = std::to_string(out.size() + 1);
    std::sort(cur.arcs.begin(), cur.arcs.end());
    cur.arcs.erase(std::unique(cur.arcs.begin(), cur.arcs.end()), cur.arcs.end());
    auto cycle = cur.find_cycle();
    if (!cycle.empty()) {
      std::string nodes;
      for (int p : cycle) nodes += (nodes.empty() ? "" : ",") + std::to_string(p);
      throw DataError("cyclic dependency graph '" + cur.id + "' (positions " + nodes + ")");
    }
    out.push_back(std::move(cur));
    cur = BilexicalGraph{};
    in_sentence = false;
  };

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (line.find("sent_id") != std::string::npos && eq != std::string::npos) {
        std::string v = line.substr(eq + 1);
        v.erase(0, v.find_first_not_of(' '));
        pending_id = v;
      }
      continue;
    }
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 10) line_fail(line_number, "expected 10 columns, got " + std::to_string(cols.size()));
    const std::string& idcol = cols[0];
    // Multi-word token ranges (a-b) and empty nodes (a.b) are skipped.
    if (idcol.find('-') != std::string::npos || idcol.find('.') != std::string::npos) continue;

    if (!in_sentence) {
      in_sentence = true;
      cur.id = pending_id;
      pending_id.clear();
    }
    Token t;
    t.position = parse_position(idcol, line_number);
    if (t.position != static_cast<int>(cur.tokens.size()) + 1)
      line_fail(line_number, "non-contiguous token id " + idcol);
    t.text = cols[1];
    t.pos = cols[3] == "_" ? "" : cols[3];
    t.dep = cols[7] == "_" ? "" : cols[7];
    t.is_punct = looks_like_punct(t.text, cols[3]);
    annotate_token(t);
    cur.tokens.push_back(t);

    if (cols[6] != "_") {
      int head = parse_position(cols[6], line_number);
      cur.arcs.push_back({head, t.position, cols[7] == "_" ? "dep" : cols[7]});
    }
    if (cols[8] != "_") {
      for (const std::string& dep : split(cols[8], '|')) {
        auto colon = dep.find(':');
        if (colon == std::string::npos) line_fail(line_number, "bad DEPS entry '" + dep + "'");
        std::string h = dep.substr(0, colon);
        if (h.find('.') != std::string::npos) continue;  // empty-node head, skipped
        cur.arcs.push_back({parse_position(h, line_number), t.position, dep.substr(colon + 1)});
      }
    }
  }
  ++line_number;
  flush();

  // Arc targets must be valid positions.
  for (const BilexicalGraph& g : out)
    for (const Arc& a : g.arcs)
      if (a.dependent < 1 || a.dependent > static_cast<int>(g.tokens.size()) || a.head < 0 ||
          a.head > static_cast<int>(g.tokens.size()))
        throw DataError("arc out of range in sentence '" + g.id + "'");
  return out;
}

std::vector<BilexicalGraph> read_conllu_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_conllu(in);
}

void write_conllu(std::ostream& out, const std::vector<BilexicalGraph>& graphs) {
  for (const BilexicalGraph& g : graphs) {
    std::map<int, std::vector<Arc>> by_dep;
    for (const Arc& a : g.arcs) by_dep[a.dependent].push_back(a);
    for (auto& [dep, arcs] : by_dep) std::sort(arcs.begin(), arcs.end());
    for (const Token& t : g.tokens) {
      std::string head = "_", rel = "_", deps = "_";
      auto it = by_dep.find(t.position);
      if (it != by_dep.end()) {
        const std::vector<Arc>& arcs = it->second;
        head = std::to_string(arcs.front().head);
        rel = arcs.front().label;
        if (arcs.size() > 1) {
          std::vector<std::string> parts;
          for (const Arc& a : arcs) parts.push_back(std::to_string(a.head) + ":" + a.label);
          deps = join(parts, "|");
        }
      }
      out << t.position << '\t' << t.text << "\t_\t" << (t.pos.empty() ? "_" : t.pos)
          << "\t_\t_\t" << head << '\t' << rel << '\t' << deps << "\t_\n";
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// SDP 2015

std::vector<BilexicalGraph> read_sdp(std::istream& in) {
  std::vector<BilexicalGraph> out;
  BilexicalGraph cur;
  bool in_sentence = false;
  std::vector<int> preds;                       // predicate positions, in order
  std::vector<std::vector<std::string>> args;   // per token: arg cells
  std::string line;
  int line_number = 0;

  auto flush = [&]() {
    if (!in_sentence) return;
    if (cur.tokens.empty()) line_fail(line_number, "empty sentence block");
    if (cur.id.empty()) cur.id = std::to_string(out.size() + 1);
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i].size() != preds.size())
        throw DataError("sentence '" + cur.id + "': argument columns do not match predicate count");
      for (std::size_t j = 0; j < preds.size(); ++j)
        if (args[i][j] != "_")
          cur.arcs.push_back({preds[j], static_cast<int>(i) + 1, args[i][j]});
    }
    std::sort(cur.arcs.begin(), cur.arcs.end());
    auto cycle = cur.find_cycle();
    if (!cycle.empty()) throw DataError("cyclic dependency graph '" + cur.id + "'");
    // In-degree-0 participants that are not tops become explicit root arcs,
    // so the arc set round-trips through the unified format.
    std::vector<bool> has_head(cur.tokens.size() + 1, false),
        participates(cur.tokens.size() + 1, false);
    for (const Arc& a : cur.arcs) {
      has_head[static_cast<std::size_t>(a.dependent)] = true;
      participates[static_cast<std::size_t>(a.dependent)] = true;
      participates[static_cast<std::size_t>(a.head)] = true;
    }
    for (std::size_t p = 1; p <= cur.tokens.size(); ++p)
      if (participates[p] && !has_head[p] && !cur.tops.count(static_cast<int>(p)))
        cur.arcs.push_back({0, static_cast<int>(p), "root"});
    std::sort(cur.arcs.begin(), cur.arcs.end());
    out.push_back(std::move(cur));
    cur = BilexicalGraph{};
    preds.clear();
    args.clear();
    in_sentence = false;
  };

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      if (starts_with(line, "#SDP")) continue;  // file header
      flush();
      cur.id = line.substr(1);
      in_sentence = true;
      continue;
    }
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() < 7) line_fail(line_number, "expected at least 7 columns");
    in_sentence = true;
    Token t;
    t.position = parse_position(cols[0], line_number);
    if (t.position != static_cast<int>(cur.tokens.size()) + 1)
      line_fail(line_number, "non-contiguous token id " + cols[0]);
    t.text = cols[1];
    t.pos = cols[3] == "_" ? "" : cols[3];
    t.is_punct = looks_like_punct(t.text, cols[3]);
    annotate_token(t);
    cur.tokens.push_back(t);
    if (cols[4] == "+") cur.tops.insert(t.position);
    if (cols[5] == "+") preds.push_back(t.position);
    args.emplace_back(cols.begin() + 7, cols.end());
  }
  ++line_number;
  flush();
  return out;
}

std::vector<BilexicalGraph> read_sdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_sdp(in);
}

void write_sdp(std::ostream& out, const std::vector<BilexicalGraph>& graphs) {
  out << "#SDP 2015\n";
  for (const BilexicalGraph& g : graphs) {
    out << '#' << g.id << '\n';
    std::vector<int> preds;
    for (const Token& t : g.tokens) {
      bool heads_something = false;
      for (const Arc& a : g.arcs)
        if (a.head == t.position) heads_something = true;
      if (heads_something) preds.push_back(t.position);
    }
    std::map<std::pair<int, int>, std::string> cell;  // (dependent, head) -> label
    for (const Arc& a : g.arcs)
      if (a.head != 0) cell.emplace(std::make_pair(a.dependent, a.head), a.label);
    for (const Token& t : g.tokens) {
      out << t.position << '\t' << t.text << "\t_\t" << (t.pos.empty() ? "_" : t.pos) << '\t'
          << (g.tops.count(t.position) ? '+' : '-') << '\t';
      out << (std::find(preds.begin(), preds.end(), t.position) != preds.end() ? '+' : '-')
          << "\t_";
      for (int p : preds) {
        auto it = cell.find({t.position, p});
        out << '\t' << (it == cell.end() ? "_" : it->second);
      }
      out << '\n';
    }
    out << '\n';
  }
}

}  // namespace dagparse
