#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "dagparse/convert.hpp"
#include "dagparse/eval.hpp"
#include "dagparse/io.hpp"
#include "dagparse/oracle.hpp"
#include "testutil.hpp"

using namespace dagparse;

namespace {

UnifiedGraph tiny_gold() {
  // root -H-> x -P-> t1
  Token t;
  t.position = 1;
  t.text = "hi";
  UnifiedGraph g = UnifiedGraph::over_tokens({t}, "tiny");
  int x = g.add_node({.id = "x", .kind = NodeKind::Nonterminal});
  g.add_edge(g.root(), x, "H", false);
  g.add_edge(x, g.terminal(1), "P", false);
  return g;
}

}  // namespace

TEST_CASE("initial state offers Shift") {
  UnifiedGraph gold = tiny_gold();
  TaskConfig task = test::generic_task(gold);
  Oracle oracle(gold, task);
  ParserState st = initial_state(gold.tokens, gold.id);
  auto set = oracle.optimal_set(st);
  REQUIRE(set.size() == 1);
  CHECK(set[0].kind == TransitionKind::Shift);
}

TEST_CASE("finished-coverage state yields exactly Finish") {
  UnifiedGraph gold = tiny_gold();
  TaskConfig task = test::generic_task(gold);
  Oracle oracle(gold, task);
  ParserState st = initial_state(gold.tokens, gold.id);
  apply(st, {TransitionKind::Shift, ""}, task);
  apply(st, {TransitionKind::Node, "P"}, task);
  apply(st, {TransitionKind::Reduce, ""}, task);
  apply(st, {TransitionKind::Shift, ""}, task);
  apply(st, {TransitionKind::RightEdge, "H"}, task);
  auto set = oracle.optimal_set(st);
  REQUIRE(set.size() == 1);
  CHECK(set[0].kind == TransitionKind::Finish);
}

TEST_CASE("due gold edge between s0 and s1 is offered") {
  // gold: root -A-> t1, root -A-> t2 ... use two terminals under root.
  std::vector<Token> tokens(2);
  tokens[0].position = 1;
  tokens[0].text = "a";
  tokens[1].position = 2;
  tokens[1].text = "b";
  UnifiedGraph gold = UnifiedGraph::over_tokens(tokens, "two");
  gold.add_edge(gold.root(), gold.terminal(1), "A", false);
  gold.add_edge(gold.root(), gold.terminal(2), "B", false);
  TaskConfig task = test::generic_task(gold);
  Oracle oracle(gold, task);
  ParserState st = initial_state(gold.tokens, gold.id);
  apply(st, {TransitionKind::Shift, ""}, task);
  // s1 = root, s0 = t1, gold edge root -A-> t1.
  auto set = oracle.optimal_set(st);
  bool has_right_a = false;
  for (const Transition& t : set)
    if (t.kind == TransitionKind::RightEdge && t.label == "A") has_right_a = true;
  CHECK(has_right_a);
}

TEST_CASE("oracle_parse reconstructs the single-edge graph") {
  std::vector<Token> tokens(1);
  tokens[0].position = 1;
  tokens[0].text = "x";
  UnifiedGraph gold = UnifiedGraph::over_tokens(tokens, "single");
  gold.add_edge(gold.root(), gold.terminal(1), "A", false);
  TaskConfig task = test::generic_task(gold);
  OracleParse parsed = oracle_parse(gold, task);
  CHECK(parsed.sequence.back().kind == TransitionKind::Finish);
  Scores s = score(parsed.graph, gold, true);
  CHECK(s.primary.f1 == 1.0);
  CHECK(s.remote.f1 == 1.0);
}

TEST_CASE("oracle_parse reconstructs the converted UCCA example with Node and remote steps") {
  std::ifstream in(test::fixture_path("fig1a.ucca.jsonl"));
  std::string line;
  std::getline(in, line);
  UnifiedGraph gold = from_ucca(deserialize_graph(line));
  TaskConfig task = TaskConfig::load(std::string(CONFIGS_DIR) + "/ucca.json");
  OracleParse parsed = oracle_parse(gold, task);
  Scores s = score(parsed.graph, gold, true);
  CHECK(s.primary.f1 == 1.0);
  CHECK(s.remote.f1 == 1.0);
  bool has_node = false, has_remote = false;
  for (const Transition& t : parsed.sequence) {
    if (t.kind == TransitionKind::Node) has_node = true;
    if (t.kind == TransitionKind::LeftRemote || t.kind == TransitionKind::RightRemote)
      has_remote = true;
  }
  CHECK(has_node);
  CHECK(has_remote);
}

TEST_CASE("oracle_parse reconstructs all converter fixtures") {
  std::vector<UnifiedGraph> corpus;
  for (const auto& g : read_conllu_file(test::fixture_path("fig1d.conllu")))
    corpus.push_back(from_bilexical(g));
  for (const auto& g : read_conllu_file(test::fixture_path("roundtrip.conllu")))
    corpus.push_back(from_bilexical(g));
  for (const auto& g : read_sdp_file(test::fixture_path("fig1c.sdp")))
    corpus.push_back(from_bilexical(g));
  for (const auto& g : read_sdp_file(test::fixture_path("two_tops.sdp")))
    corpus.push_back(from_bilexical(g));
  for (const auto& g : read_concept_graphs_file(test::fixture_path("fig1b.concept.jsonl")))
    corpus.push_back(from_concept_graph(g));
  TaskConfig task = test::generic_task(corpus);
  for (const UnifiedGraph& gold : corpus) {
    OracleParse parsed = oracle_parse(gold, task);
    Scores s = score(parsed.graph, gold, true);
    CHECK(s.primary.f1 == 1.0);
    CHECK(s.remote.f1 == 1.0);
    auto match = test::match_against_gold(parsed.graph, gold, true);
    REQUIRE(match.has_value());
    CHECK(match->complete());
  }
}

TEST_CASE("oracle_parse reconstructs random graphs, labeled and unlabeled") {
  Rng rng(5);
  test::GenOptions opt;
  opt.max_tokens = 12;
  for (int i = 0; i < 60; ++i) {
    UnifiedGraph gold = test::random_graph(rng, opt, "r" + std::to_string(i));
    TaskConfig task = test::generic_task(gold);
    OracleParse parsed = oracle_parse(gold, task);
    auto match = test::match_against_gold(parsed.graph, gold, true);
    REQUIRE(match.has_value());
    CHECK(match->complete());
    // Swap termination keeps parses quadratic in the node count.
    long n = gold.node_count();
    CHECK(static_cast<long>(parsed.sequence.size()) <= 2 * n * n + 20);

    TaskConfig unlabeled = task;
    unlabeled.labeled = false;
    OracleParse shape = oracle_parse(gold, unlabeled);
    auto shape_match = test::match_against_gold(shape.graph, gold, false);
    REQUIRE(shape_match.has_value());
    CHECK(shape_match->complete());
  }
}

TEST_CASE("any tie-break reconstructs gold: every optimal member keeps it reachable") {
  Rng rng(71);
  test::GenOptions opt;
  opt.max_tokens = 10;
  for (int i = 0; i < 40; ++i) {
    UnifiedGraph gold = test::random_graph(rng, opt, "tb" + std::to_string(i));
    TaskConfig task = test::generic_task(gold);
    Rng chooser(1000 + static_cast<std::uint64_t>(i));
    auto random_pick = [&](const std::vector<Transition>& options) -> const Transition& {
      return options[chooser.below(options.size())];
    };
    OracleParse parsed = oracle_parse(gold, task, random_pick);
    auto match = test::match_against_gold(parsed.graph, gold, true);
    REQUIRE(match.has_value());
    CHECK(match->complete());
  }
}

TEST_CASE("oracle_parse is deterministic") {
  Rng rng(17);
  test::GenOptions opt;
  opt.max_tokens = 10;
  UnifiedGraph gold = test::random_graph(rng, opt, "det");
  TaskConfig task = test::generic_task(gold);
  OracleParse a = oracle_parse(gold, task);
  OracleParse b = oracle_parse(gold, task);
  CHECK(a.sequence == b.sequence);
}

TEST_CASE("optimal_set errors on a foreign state") {
  UnifiedGraph gold = tiny_gold();
  TaskConfig task = test::generic_task(gold);
  Oracle oracle(gold, task);
  std::vector<Token> other(2);
  other[0].position = 1;
  other[0].text = "x";
  other[1].position = 2;
  other[1].text = "y";
  ParserState st = initial_state(other, "other");
  CHECK_THROWS_AS(oracle.optimal_set(st), DataError);
}

// The independent brute-force check: on small instances, every transition the
// oracle offers keeps gold reachable, every rejected one either loses
// reachability or is non-productive, and the offered set is never empty along
// the optimal closure.
TEST_CASE("oracle agrees with exhaustive reachability on small instances") {
  Rng rng(31);
  test::GenOptions opt;
  opt.min_tokens = 1;
  opt.max_tokens = 4;
  opt.max_nonterminals = 2;
  opt.remote_attempts_per_token = 0.6;

  long states_checked = 0, disagreements = 0;
  for (int i = 0; i < 60; ++i) {
    UnifiedGraph gold = test::random_graph(rng, opt, "bfs" + std::to_string(i));
    TaskConfig task = test::generic_task(gold);
    test::BfsAgreement report = test::check_oracle_against_bfs(gold, task);
    states_checked += report.states_checked;
    disagreements += report.disagreements;
    for (const std::string& note : report.notes) {
      CAPTURE(note);
      CHECK_MESSAGE(false, "oracle/BFS disagreement");
    }
  }
  CHECK(disagreements == 0);
  CHECK(states_checked > 100);
}
