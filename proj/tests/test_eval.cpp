#include "doctest.h"

#include "dagparse/convert.hpp"
#include "dagparse/eval.hpp"
#include "testutil.hpp"

using namespace dagparse;

namespace {

std::vector<Token> make_tokens(int n) {
  std::vector<Token> out;
  for (int i = 1; i <= n; ++i) {
    Token t;
    t.position = i;
    t.text = "w" + std::to_string(i);
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("score is 1.0 on identical graphs") {
  Rng rng(2);
  test::GenOptions opt;
  opt.max_tokens = 10;
  for (int i = 0; i < 30; ++i) {
    UnifiedGraph g = test::random_graph(rng, opt, "id");
    Scores s = score(g, g, true);
    CHECK(s.primary.f1 == 1.0);
    CHECK(s.remote.f1 == 1.0);
  }
}

TEST_CASE("partial match arithmetic") {
  // gold: three primary edges root->t1 (A), root->t2 (B), root->t3 (C).
  std::vector<Token> tokens = make_tokens(3);
  UnifiedGraph gold = UnifiedGraph::over_tokens(tokens, "g");
  gold.add_edge(gold.root(), gold.terminal(1), "A", false);
  gold.add_edge(gold.root(), gold.terminal(2), "B", false);
  gold.add_edge(gold.root(), gold.terminal(3), "C", false);
  // pred: two match, one label differs.
  UnifiedGraph pred = UnifiedGraph::over_tokens(tokens, "g");
  pred.add_edge(pred.root(), pred.terminal(1), "A", false);
  pred.add_edge(pred.root(), pred.terminal(2), "B", false);
  pred.add_edge(pred.root(), pred.terminal(3), "X", false);
  Scores labeled = score(pred, gold, true);
  CHECK(labeled.primary.precision == doctest::Approx(2.0 / 3.0));
  CHECK(labeled.primary.recall == doctest::Approx(2.0 / 3.0));
  CHECK(labeled.primary.f1 == doctest::Approx(2.0 / 3.0));
  // Unlabeled mode forgives the label mismatch.
  Scores unlabeled = score(pred, gold, false);
  CHECK(unlabeled.primary.f1 == doctest::Approx(1.0));
  // Remote partition has no edges on either side: vacuous 1.0.
  CHECK(labeled.remote.f1 == 1.0);
  CHECK_FALSE(labeled.remote.degenerate);
}

TEST_CASE("degenerate denominators score zero with a flag") {
  std::vector<Token> tokens = make_tokens(1);
  UnifiedGraph gold = UnifiedGraph::over_tokens(tokens, "g");
  gold.add_edge(gold.root(), gold.terminal(1), "A", false);
  UnifiedGraph pred = UnifiedGraph::over_tokens(tokens, "g");
  Scores s = score(pred, gold, true);
  CHECK(s.primary.f1 == 0.0);
  CHECK(s.primary.degenerate);
}

TEST_CASE("token mismatch is an error") {
  UnifiedGraph a = UnifiedGraph::over_tokens(make_tokens(2), "x");
  UnifiedGraph b = UnifiedGraph::over_tokens(make_tokens(3), "x");
  CHECK_THROWS_AS(score(a, b, true), DataError);
}

TEST_CASE("corpus micro-average pools counts") {
  std::vector<Token> tokens = make_tokens(2);
  UnifiedGraph gold1 = UnifiedGraph::over_tokens(tokens, "1");
  gold1.add_edge(gold1.root(), gold1.terminal(1), "A", false);
  gold1.add_edge(gold1.root(), gold1.terminal(2), "B", false);
  UnifiedGraph gold2 = gold1;
  gold2.id = "2";
  UnifiedGraph pred1 = gold1;  // perfect
  UnifiedGraph pred2 = UnifiedGraph::over_tokens(tokens, "2");  // empty prediction
  Scores s = corpus_score({pred1, pred2}, {gold1, gold2}, true);
  CHECK(s.primary.precision == doctest::Approx(1.0));  // 2 matched / 2 predicted
  CHECK(s.primary.recall == doctest::Approx(0.5));     // 2 matched / 4 gold
  // Order-permuted corpora with id matching give the same score.
  Scores swapped = corpus_score({pred2, pred1}, {gold1, gold2}, true);
  CHECK(swapped.primary.f1 == doctest::Approx(s.primary.f1));
}

TEST_CASE("precision and recall swap when pred and gold swap") {
  Rng rng(4);
  test::GenOptions opt;
  opt.max_tokens = 8;
  UnifiedGraph a = test::random_graph(rng, opt, "s");
  UnifiedGraph b = test::random_graph(rng, opt, "s");
  while (b.tokens.size() != a.tokens.size()) b = test::random_graph(rng, opt, "s");
  for (std::size_t i = 0; i < a.tokens.size(); ++i) b.tokens[i] = a.tokens[i];
  Scores ab = score(a, b, true);
  Scores ba = score(b, a, true);
  CHECK(ab.primary.precision == doctest::Approx(ba.primary.recall));
  CHECK(ab.primary.recall == doctest::Approx(ba.primary.precision));
}

TEST_CASE("l1 distance basics and properties") {
  std::vector<std::vector<Token>> a = {make_tokens(3)};
  CHECK(l1_distance(a, a) == doctest::Approx(0.0));

  std::vector<Token> other;
  Token t;
  t.position = 1;
  t.text = "zzz";
  other.push_back(t);
  std::vector<std::vector<Token>> b = {other};
  CHECK(l1_distance(a, b) == doctest::Approx(2.0));

  // {a:0.5, b:0.5} vs {a:1.0} -> 1.0
  Token wa, wb;
  wa.position = 1;
  wa.text = "a";
  wb.position = 2;
  wb.text = "b";
  std::vector<std::vector<Token>> ab = {{wa, wb}};
  std::vector<std::vector<Token>> aonly = {{wa}};
  CHECK(l1_distance(ab, aonly) == doctest::Approx(1.0));

  // Symmetry, range, triangle inequality on random corpora.
  Rng rng(9);
  auto random_corpus = [&]() {
    std::vector<std::vector<Token>> corpus;
    int sentences = 1 + rng.below_int(4);
    for (int s = 0; s < sentences; ++s) {
      std::vector<Token> sent;
      int len = 1 + rng.below_int(6);
      for (int i = 1; i <= len; ++i) {
        Token tok;
        tok.position = i;
        tok.text = "w" + std::to_string(static_cast<int>(rng.below(7)));
        sent.push_back(tok);
      }
      corpus.push_back(std::move(sent));
    }
    return corpus;
  };
  for (int i = 0; i < 25; ++i) {
    auto x = random_corpus(), y = random_corpus(), z = random_corpus();
    double xy = l1_distance(x, y), yx = l1_distance(y, x);
    CHECK(xy == doctest::Approx(yx));
    CHECK(xy >= 0);
    CHECK(xy <= 2.0 + 1e-12);
    CHECK(l1_distance(x, z) <= xy + l1_distance(y, z) + 1e-12);
  }
}

TEST_CASE("scheme overlap on a hand-counted fixture") {
  // Three sentences; X is a UD-style conversion, Y a hand hierarchy.
  std::vector<UnifiedGraph> xs, ys;
  for (int s = 1; s <= 3; ++s) {
    std::vector<Token> tokens = make_tokens(3);
    BilexicalGraph bg;
    bg.id = std::to_string(s);
    bg.tokens = tokens;
    bg.arcs = {{0, 2, "root"}, {2, 1, "det"}, {2, 3, "obj"}};
    xs.push_back(from_bilexical(bg));

    UnifiedGraph y = UnifiedGraph::over_tokens(tokens, std::to_string(s));
    int unit = y.add_node({.id = "u", .kind = NodeKind::Nonterminal});
    y.add_edge(y.root(), unit, "H", false);
    y.add_edge(unit, y.terminal(1), "E", false);
    y.add_edge(unit, y.terminal(2), "C", false);
    y.add_edge(y.root(), y.terminal(3), "U", false);
    ys.push_back(std::move(y));
  }
  // Per sentence, by hand:
  //   X edges (child yields): p1->t1 {1}; p2->t2 {2}; p3->t3 {3};
  //     n2->p2 head {2}; n2->p1 det {1}; n2->p3 obj {3}; root->n2 {1,2,3}.
  //     7 edges, yield multiset {1}x2 {2}x2 {3}x2 {1,2,3}x1.
  //   Y edges: root->u {1,2}; u->t1 {1}; u->t2 {2}; root->t3 {3}. 4 edges.
  // Unlabeled matches: one each of {1}, {2}, {3} -> 3 per sentence.
  Scores s = scheme_overlap(xs, ys);
  CHECK(s.primary.matched == 9);
  CHECK(s.primary.predicted == 21);
  CHECK(s.primary.gold == 12);
  CHECK(s.primary.precision == doctest::Approx(9.0 / 21.0));
  CHECK(s.primary.recall == doctest::Approx(9.0 / 12.0));
  // overlap(X, Y) precision equals overlap(Y, X) recall.
  Scores rev = scheme_overlap(ys, xs);
  CHECK(rev.primary.recall == doctest::Approx(s.primary.precision));
  CHECK(s.remote.f1 == 1.0);  // no remotes anywhere
}
