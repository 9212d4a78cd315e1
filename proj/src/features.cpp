#include "dagparse/features.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dagparse {

using nlohmann::json;

const char* slot_name(Slot s) {
  static const char* names[kSlotCount] = {
      "s0",  "s1",  "s2",  "s3",  "b0",  "b1",  "b2",  "b3",  "s0l", "s0r", "s1l", "s1r", "s0ll",
      "s0lr", "s0rl", "s0rr", "s1ll", "s1lr", "s1rl", "s1rr", "s0L", "s0R", "s1L", "s1R", "b0L", "b0R"};
  return names[static_cast<int>(s)];
}

namespace {

int slot_index(const std::string& name) {
  for (int i = 0; i < kSlotCount; ++i)
    if (name == slot_name(static_cast<Slot>(i))) return i;
  return -1;
}

bool code_is_numeric(char code, bool edge_row) {
  if (edge_row) return code == 'x' || code == 'd';
  switch (code) {
    case 'h': case 'x': case 'y': case 'q':
    case 'P': case 'C': case 'I': case 'E': case 'M': case 'N':
      return true;
    default:
      return false;
  }
}

}  // namespace

FeatureConfig FeatureConfig::full() {
  FeatureConfig c;
  c.node_rows = {
      {"s0", "wtdencpT#^$xhqyPCIEMN"},
      {"s1", "wtdencT#^$xhyN"},
      {"s2", "wtdencT#^$xhy"},
      {"s3", "wtdencT#^$xhyN"},
      {"b0", "wtdncT#^$hPCIEMN"},
      {"b1", "wtdncT#^$"},
      {"b2", "wtdncT#^$"},
      {"b3", "wtdncT#^$"},
      {"s0l", "wenc#^$"}, {"s0r", "wenc#^$"}, {"s1l", "wenc#^$"}, {"s1r", "wenc#^$"},
      {"s0ll", "wenc#^$"}, {"s0lr", "wenc#^$"}, {"s0rl", "wenc#^$"}, {"s0rr", "wenc#^$"},
      {"s1ll", "wenc#^$"}, {"s1lr", "wenc#^$"}, {"s1rl", "wenc#^$"}, {"s1rr", "wenc#^$"},
      {"s0L", "wen#^$"}, {"s0R", "wen#^$"}, {"s1L", "wen#^$"}, {"s1R", "wen#^$"},
      {"b0L", "wen#^$"}, {"b0R", "wen#^$"},
  };
  c.edge_rows = {
      {"s0>s1", "xd"},
      {"s0>b0", "xde"},
      {"s1>s0", "x"},
      {"b0>s0", "xe"},
  };
  c.action_rows = {{"a0", "eA"}, {"a1", "eA"}};
  c.node_ratio = true;
  return c;
}

FeatureConfig FeatureConfig::compact() {
  FeatureConfig c;
  c.node_rows = {{"s0", "wtdexh"}, {"s1", "wtdexh"}, {"b0", "wtd"}};
  c.edge_rows = {{"s0>s1", "xd"}, {"s1>s0", "x"}};
  c.action_rows = {{"a0", "eA"}};
  c.node_ratio = true;
  return c;
}

FeatureConfig FeatureConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("feature config: ") + e.what());
  }
  FeatureConfig c;
  auto read_rows = [&](const char* key) {
    std::vector<std::pair<std::string, std::string>> rows;
    for (const json& row : j.value(key, json::array()))
      rows.emplace_back(row.at(0).get<std::string>(), row.at(1).get<std::string>());
    return rows;
  };
  c.node_rows = read_rows("node_rows");
  c.edge_rows = read_rows("edge_rows");
  c.action_rows = read_rows("action_rows");
  c.node_ratio = j.value("node_ratio", true);
  for (const auto& [name, codes] : c.node_rows)
    if (slot_index(name) < 0) throw DataError("feature config: unknown slot '" + name + "'");
  return c;
}

FeatureConfig FeatureConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string FeatureConfig::to_json_text() const {
  json j;
  auto rows_json = [](const std::vector<std::pair<std::string, std::string>>& rows) {
    json out = json::array();
    for (const auto& [name, codes] : rows) out.push_back({name, codes});
    return out;
  };
  j["node_rows"] = rows_json(node_rows);
  j["edge_rows"] = rows_json(edge_rows);
  j["action_rows"] = rows_json(action_rows);
  j["node_ratio"] = node_ratio;
  return j.dump();
}

const std::vector<FeatureTemplate>& FeatureConfig::templates() const {
  if (!templates_.empty()) return templates_;
  for (const auto& [name, codes] : node_rows) {
    int slot = slot_index(name);
    for (char code : codes)
      templates_.push_back({name + "." + code, code, slot, code_is_numeric(code, false)});
  }
  for (const auto& [pair, codes] : edge_rows)
    for (char code : codes)
      templates_.push_back({pair + "." + code, code, -1, code_is_numeric(code, true)});
  for (const auto& [action, codes] : action_rows)
    for (char code : codes) templates_.push_back({action + "." + code, code, -1, false});
  if (node_ratio) templates_.push_back({"node_ratio", 0, -1, true});
  return templates_;
}

const std::vector<std::string>& default_head_priority() {
  static const std::vector<std::string> order = {"C", "N", "H", "P", "S", "A", "D",
                                                 "T", "E", "R", "F", "G", "L", "U"};
  return order;
}

namespace {

int priority_rank(const std::string& label, const std::vector<std::string>& priority) {
  for (std::size_t i = 0; i < priority.size(); ++i)
    if (priority[i] == label) return static_cast<int>(i);
  return static_cast<int>(priority.size());
}

int yield_min(const UnifiedGraph& g, int node) {
  std::vector<int> y = g.terminal_yield(node);
  return y.empty() ? std::numeric_limits<int>::max() : y.front();
}

}  // namespace

int head_terminal(const UnifiedGraph& g, int node, const std::vector<std::string>& priority) {
  int guard = g.node_count() + 1;
  while (guard-- > 0) {
    if (g.node(node).kind == NodeKind::Terminal) return node;
    int best = -1;
    std::tuple<int, int, int> best_key;
    for (int ei : g.child_edges(node)) {
      const Edge& e = g.edge(ei);
      if (e.remote) continue;
      std::tuple<int, int, int> key{priority_rank(e.label, priority), yield_min(g, e.child), ei};
      if (best < 0 || key < best_key) {
        best = e.child;
        best_key = key;
      }
    }
    if (best < 0) return -1;  // no terminal descendant (implicit or childless)
    node = best;
  }
  return -1;
}

std::pair<int, int> gap_features(const UnifiedGraph& g, int node) {
  std::vector<int> y = g.terminal_yield(node);
  if (y.size() < 2) return {0, 0};
  int gaps = 0, missing = 0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    int run = y[i] - y[i - 1] - 1;
    if (run > 0) {
      ++gaps;
      missing += run;
    }
  }
  return {gaps >= 2 ? 2 : gaps, missing};
}

namespace {

struct SlotNodes {
  std::array<int, kSlotCount> node;
};

int ordered_child(const UnifiedGraph& g, int node, bool rightmost) {
  if (node < 0) return -1;
  int best = -1;
  std::pair<int, int> best_key;
  for (int ei : g.child_edges(node)) {
    const Edge& e = g.edge(ei);
    if (e.remote) continue;
    std::pair<int, int> key{yield_min(g, e.child), ei};
    if (best < 0 || (rightmost ? best_key < key : key < best_key)) {
      best = e.child;
      best_key = key;
    }
  }
  return best;
}

int ordered_parent(const UnifiedGraph& g, int node, bool rightmost) {
  if (node < 0) return -1;
  int best = -1;
  std::pair<int, int> best_key;
  for (int ei : g.parent_edges(node)) {
    const Edge& e = g.edge(ei);
    std::pair<int, int> key{yield_min(g, e.parent), ei};
    if (best < 0 || (rightmost ? best_key < key : key < best_key)) {
      best = e.parent;
      best_key = key;
    }
  }
  return best;
}

SlotNodes resolve_slots(const ParserState& state) {
  const UnifiedGraph& g = state.graph;
  SlotNodes s;
  s.node.fill(-1);
  auto set = [&](Slot slot, int node) { s.node[static_cast<std::size_t>(slot)] = node; };
  set(Slot::S0, state.s(0));
  set(Slot::S1, state.s(1));
  set(Slot::S2, state.s(2));
  set(Slot::S3, state.s(3));
  set(Slot::B0, state.b(0));
  set(Slot::B1, state.b(1));
  set(Slot::B2, state.b(2));
  set(Slot::B3, state.b(3));
  int s0 = state.s(0), s1 = state.s(1), b0 = state.b(0);
  int s0l = ordered_child(g, s0, false), s0r = ordered_child(g, s0, true);
  int s1l = ordered_child(g, s1, false), s1r = ordered_child(g, s1, true);
  set(Slot::S0l, s0l);
  set(Slot::S0r, s0r);
  set(Slot::S1l, s1l);
  set(Slot::S1r, s1r);
  set(Slot::S0ll, ordered_child(g, s0l, false));
  set(Slot::S0lr, ordered_child(g, s0l, true));
  set(Slot::S0rl, ordered_child(g, s0r, false));
  set(Slot::S0rr, ordered_child(g, s0r, true));
  set(Slot::S1ll, ordered_child(g, s1l, false));
  set(Slot::S1lr, ordered_child(g, s1l, true));
  set(Slot::S1rl, ordered_child(g, s1r, false));
  set(Slot::S1rr, ordered_child(g, s1r, true));
  set(Slot::S0L, ordered_parent(g, s0, false));
  set(Slot::S0R, ordered_parent(g, s0, true));
  set(Slot::S1L, ordered_parent(g, s1, false));
  set(Slot::S1R, ordered_parent(g, s1, true));
  set(Slot::B0L, ordered_parent(g, b0, false));
  set(Slot::B0R, ordered_parent(g, b0, true));
  return s;
}

}  // namespace

FeatureVector extract(const ParserState& state, const FeatureConfig& config,
                      const std::vector<std::string>& head_priority) {
  const UnifiedGraph& g = state.graph;
  const std::vector<FeatureTemplate>& templates = config.templates();
  SlotNodes slots = resolve_slots(state);

  FeatureVector out;
  out.values.resize(templates.size());
  out.slot_node.fill(-1);
  out.head_position.fill(0);
  for (int i = 0; i < kSlotCount; ++i) {
    int node = slots.node[static_cast<std::size_t>(i)];
    out.slot_node[static_cast<std::size_t>(i)] = node;
    if (node >= 0) {
      int ht = head_terminal(g, node, head_priority);
      if (ht >= 0) out.head_position[static_cast<std::size_t>(i)] = g.node(ht).terminal_position;
    }
  }

  // Separator punctuation between max(yield(s1)) and min(yield(s0)).
  std::string sep_punct;
  int sep_count = 0;
  {
    int s0 = state.s(0), s1 = state.s(1);
    if (s0 >= 0 && s1 >= 0) {
      std::vector<int> y0 = g.terminal_yield(s0);
      std::vector<int> y1 = g.terminal_yield(s1);
      if (!y0.empty() && !y1.empty()) {
        for (int p = y1.back() + 1; p < y0.front(); ++p) {
          if (p < 1 || p > static_cast<int>(g.tokens.size())) continue;
          const Token& t = g.tokens[static_cast<std::size_t>(p - 1)];
          if (t.is_punct) {
            if (sep_punct.empty()) sep_punct = t.text;
            ++sep_count;
          }
        }
      }
    }
  }

  auto categorical = [](FeatureValue& v, const std::string& s) {
    v.none = s.empty();
    v.cat = s;
  };
  auto numeric = [](FeatureValue& v, double x) {
    v.none = false;
    v.num = x;
  };

  std::size_t ti = 0;
  for (const auto& [row_name, codes] : config.node_rows) {
    int slot = slot_index(row_name);
    int node = slots.node[static_cast<std::size_t>(slot)];
    int head = node >= 0 ? head_terminal(g, node, head_priority) : -1;
    const Token* tok =
        head >= 0 ? &g.tokens[static_cast<std::size_t>(g.node(head).terminal_position - 1)] : nullptr;
    for (char code : codes) {
      FeatureValue& v = out.values[ti++];
      if (node < 0) {
        v = FeatureValue{};  // NONE
        continue;
      }
      switch (code) {
        case 'w': if (tok) categorical(v, tok->text); break;
        case 't': if (tok) categorical(v, tok->pos); break;
        case 'd': if (tok) categorical(v, tok->dep); break;
        case 'T': if (tok) categorical(v, tok->ne_type); break;
        case '#': if (tok) categorical(v, tok->shape); break;
        case '^': if (tok) categorical(v, utf8_prefix(tok->text, 1)); break;
        case '$': if (tok) categorical(v, utf8_suffix(tok->text, 3)); break;
        case 'N':
          if (tok) numeric(v, tok->ne_iob == 'B' ? 1 : tok->ne_iob == 'I' ? 2 : 0);
          break;
        case 'e': {
          const auto& parents = g.parent_edges(node);
          if (!parents.empty()) categorical(v, g.edge(parents.front()).label);
          break;
        }
        case 'n': categorical(v, g.node(node).label); break;
        case 'c': categorical(v, g.node(node).category); break;
        case 'h': numeric(v, g.node_height(node)); break;
        case 'x': numeric(v, gap_features(g, node).first); break;
        case 'y': numeric(v, gap_features(g, node).second); break;
        case 'p': categorical(v, sep_punct); break;
        case 'q': numeric(v, sep_count); break;
        case 'P': numeric(v, g.count_parents(node)); break;
        case 'C': numeric(v, g.count_children(node)); break;
        case 'I': numeric(v, g.count_implicit_children(node)); break;
        case 'E': numeric(v, g.count_remote_children(node)); break;
        case 'M': numeric(v, g.count_remote_parents(node)); break;
        default:
          throw DataError(std::string("feature config: unknown node code '") + code + "'");
      }
    }
  }

  for (const auto& [pair_name, codes] : config.edge_rows) {
    auto gt = pair_name.find('>');
    if (gt == std::string::npos) throw DataError("feature config: bad edge row '" + pair_name + "'");
    auto endpoint = [&](const std::string& name) {
      if (name == "s0") return state.s(0);
      if (name == "s1") return state.s(1);
      if (name == "b0") return state.b(0);
      throw DataError("feature config: bad edge endpoint '" + name + "'");
    };
    int from = endpoint(pair_name.substr(0, gt));
    int to = endpoint(pair_name.substr(gt + 1));
    int edge = -1;
    if (from >= 0 && to >= 0) {
      for (int ei : g.child_edges(from))
        if (g.edge(ei).child == to) {
          edge = ei;
          break;
        }
    }
    for (char code : codes) {
      FeatureValue& v = out.values[ti++];
      if (from < 0 || to < 0) {
        v = FeatureValue{};
        continue;
      }
      switch (code) {
        case 'x': numeric(v, edge >= 0 ? 1 : 0); break;
        case 'e':
          if (edge >= 0) categorical(v, g.edge(edge).label);
          break;
        case 'd': {
          int hf = head_terminal(g, from, head_priority);
          int ht2 = head_terminal(g, to, head_priority);
          if (hf >= 0 && ht2 >= 0)
            numeric(v, std::abs(g.node(hf).terminal_position - g.node(ht2).terminal_position));
          break;
        }
        default:
          throw DataError(std::string("feature config: unknown edge code '") + code + "'");
      }
    }
  }

  for (const auto& [action_name, codes] : config.action_rows) {
    int back = action_name == "a0" ? 0 : action_name == "a1" ? 1 : -1;
    if (back < 0) throw DataError("feature config: bad action row '" + action_name + "'");
    const Transition* t = nullptr;
    if (static_cast<int>(state.history.size()) > back)
      t = &state.history[state.history.size() - 1 - static_cast<std::size_t>(back)];
    for (char code : codes) {
      FeatureValue& v = out.values[ti++];
      if (!t) {
        v = FeatureValue{};
        continue;
      }
      switch (code) {
        case 'A': categorical(v, kind_name(t->kind)); break;
        case 'e': categorical(v, t->label); break;
        default:
          throw DataError(std::string("feature config: unknown action code '") + code + "'");
      }
    }
  }

  if (config.node_ratio) {
    FeatureValue& v = out.values[ti++];
    v.none = false;
    v.num = static_cast<double>(g.count_nonterminals()) /
            static_cast<double>(std::max<std::size_t>(g.tokens.size(), 1));
  }
  return out;
}

}  // namespace dagparse
