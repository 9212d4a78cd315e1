#include "dagparse/eval.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dagparse {

namespace {

using EdgeKey = std::tuple<std::vector<int>, std::string>;  // (child yield, label)

// Multiset of matchable edge keys per remote partition.
std::pair<std::map<EdgeKey, int>, std::map<EdgeKey, int>> edge_multisets(const UnifiedGraph& g,
                                                                         bool labeled) {
  std::map<EdgeKey, int> primary, remote;
  for (const Edge& e : g.edges()) {
    EdgeKey key{g.terminal_yield(e.child), labeled ? e.label : std::string()};
    (e.remote ? remote : primary)[key] += 1;
  }
  return {std::move(primary), std::move(remote)};
}

long intersect_count(const std::map<EdgeKey, int>& a, const std::map<EdgeKey, int>& b) {
  long matched = 0;
  for (const auto& [key, count] : a) {
    auto it = b.find(key);
    if (it != b.end()) matched += std::min(count, it->second);
  }
  return matched;
}

long total_count(const std::map<EdgeKey, int>& m) {
  long t = 0;
  for (const auto& [key, count] : m) t += count;
  return t;
}

Prf make_prf(long matched, long predicted, long gold) {
  Prf out;
  out.matched = matched;
  out.predicted = predicted;
  out.gold = gold;
  if (predicted == 0 && gold == 0) {
    out.precision = out.recall = out.f1 = 1.0;  // both empty: vacuous match
    return out;
  }
  out.degenerate = predicted == 0 || gold == 0;
  out.precision = predicted ? static_cast<double>(matched) / static_cast<double>(predicted) : 0.0;
  out.recall = gold ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
  double pr = out.precision + out.recall;
  out.f1 = pr > 0 ? 2.0 * out.precision * out.recall / pr : 0.0;
  return out;
}

struct Counts {
  long matched = 0, predicted = 0, gold = 0;
};

void accumulate(Counts& primary, Counts& remote, const UnifiedGraph& pred,
                const UnifiedGraph& gold, bool labeled) {
  if (pred.tokens.size() != gold.tokens.size())
    throw DataError("score: token mismatch between prediction and gold ('" + pred.id + "')");
  for (std::size_t i = 0; i < pred.tokens.size(); ++i)
    if (pred.tokens[i].text != gold.tokens[i].text)
      throw DataError("score: token text mismatch at position " + std::to_string(i + 1) +
                      " ('" + pred.id + "')");
  auto [pp, pr] = edge_multisets(pred, labeled);
  auto [gp, gr] = edge_multisets(gold, labeled);
  primary.matched += intersect_count(pp, gp);
  primary.predicted += total_count(pp);
  primary.gold += total_count(gp);
  remote.matched += intersect_count(pr, gr);
  remote.predicted += total_count(pr);
  remote.gold += total_count(gr);
}

}  // namespace

Scores score(const UnifiedGraph& pred, const UnifiedGraph& gold, bool labeled) {
  Counts p, r;
  accumulate(p, r, pred, gold, labeled);
  return {make_prf(p.matched, p.predicted, p.gold), make_prf(r.matched, r.predicted, r.gold)};
}

Scores corpus_score(const std::vector<UnifiedGraph>& pred, const std::vector<UnifiedGraph>& gold,
                    bool labeled) {
  std::map<std::string, const UnifiedGraph*> gold_by_id;
  for (const UnifiedGraph& g : gold) {
    if (gold_by_id.count(g.id)) throw DataError("corpus_score: duplicate gold id '" + g.id + "'");
    gold_by_id[g.id] = &g;
  }
  if (pred.size() != gold.size()) throw DataError("corpus_score: corpora differ in size");
  Counts p, r;
  for (const UnifiedGraph& pg : pred) {
    auto it = gold_by_id.find(pg.id);
    if (it == gold_by_id.end()) throw DataError("corpus_score: no gold graph with id '" + pg.id + "'");
    accumulate(p, r, pg, *it->second, labeled);
  }
  return {make_prf(p.matched, p.predicted, p.gold), make_prf(r.matched, r.predicted, r.gold)};
}

double l1_distance(const std::vector<std::vector<Token>>& corpus_a,
                   const std::vector<std::vector<Token>>& corpus_b, bool lowercase) {
  auto distribution = [&](const std::vector<std::vector<Token>>& corpus) {
    std::map<std::string, double> freq;
    double total = 0;
    for (const auto& sentence : corpus)
      for (const Token& t : sentence) {
        std::string w = t.text;
        if (lowercase)
          std::transform(w.begin(), w.end(), w.begin(),
                         [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        freq[w] += 1;
        total += 1;
      }
    if (total == 0) throw DataError("l1_distance: empty corpus");
    for (auto& [w, c] : freq) c /= total;
    return freq;
  };
  std::map<std::string, double> pa = distribution(corpus_a);
  std::map<std::string, double> pb = distribution(corpus_b);
  double d = 0;
  for (const auto& [w, p] : pa) {
    auto it = pb.find(w);
    d += std::abs(p - (it == pb.end() ? 0.0 : it->second));
  }
  for (const auto& [w, p] : pb)
    if (!pa.count(w)) d += p;
  return d;
}

Scores scheme_overlap(const std::vector<UnifiedGraph>& x, const std::vector<UnifiedGraph>& y) {
  return corpus_score(x, y, /*labeled=*/false);
}

std::string scores_to_json(const Scores& s) {
  nlohmann::json j;
  auto fill = [](const Prf& p) {
    return nlohmann::json{{"precision", p.precision}, {"recall", p.recall},     {"f1", p.f1},
                          {"matched", p.matched},     {"predicted", p.predicted}, {"gold", p.gold},
                          {"degenerate", p.degenerate}};
  };
  j["primary"] = fill(s.primary);
  j["remote"] = fill(s.remote);
  j["average_f1"] = s.average_f1();
  return j.dump();
}

std::string scores_to_table(const Scores& s) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "          P       R       F1\n";
  os << "primary   " << s.primary.precision << "   " << s.primary.recall << "   " << s.primary.f1
     << "\n";
  os << "remote    " << s.remote.precision << "   " << s.remote.recall << "   " << s.remote.f1
     << "\n";
  return os.str();
}

}  // namespace dagparse
