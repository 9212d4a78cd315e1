#include "doctest.h"

#include <fstream>
#include <sstream>

#include "dagparse/bilexical.hpp"
#include "testutil.hpp"

using namespace dagparse;

TEST_CASE("conllu reader on the motivating UD sentence") {
  auto graphs = read_conllu_file(test::fixture_path("fig1d.conllu"));
  REQUIRE(graphs.size() == 1);
  const BilexicalGraph& g = graphs[0];
  CHECK(g.tokens.size() == 7);
  CHECK(g.tokens[0].text == "After");
  CHECK(g.tokens[2].is_punct);
  std::set<Arc> arcs(g.arcs.begin(), g.arcs.end());
  CHECK(arcs.count({2, 1, "case"}));
  CHECK(arcs.count({5, 4, "nsubj"}));
  CHECK(arcs.count({5, 2, "obl"}));
  CHECK(arcs.count({5, 3, "punct"}));
  CHECK(arcs.count({0, 5, "root"}));
  CHECK(arcs.count({7, 6, "case"}));
  CHECK(arcs.count({5, 7, "obl"}));
  CHECK(g.arcs.size() == 7);
}

TEST_CASE("conllu reader skips multi-word ranges and comments") {
  std::istringstream in(
      "# sent_id = mwt\n"
      "1-2\tdel\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tde\t_\tADP\t_\t_\t2\tcase\t_\t_\n"
      "2\tel\t_\tDET\t_\t_\t0\troot\t_\t_\n"
      "\n");
  auto graphs = read_conllu(in);
  REQUIRE(graphs.size() == 1);
  CHECK(graphs[0].id == "mwt");
  CHECK(graphs[0].tokens.size() == 2);
  CHECK(graphs[0].arcs.size() == 2);
}

TEST_CASE("conllu reader reports malformed lines") {
  std::istringstream in("1\tonly-three\tcols\n\n");
  CHECK_THROWS_AS(read_conllu(in), DataError);
}

TEST_CASE("conllu reader rejects an empty sentence block") {
  std::istringstream in("# sent_id = empty\n\n1\tok\t_\t_\t_\t_\t0\troot\t_\t_\n\n");
  // The comment starts no sentence, so only one sentence exists.
  auto graphs = read_conllu(in);
  CHECK(graphs.size() == 1);
}

TEST_CASE("conllu write-read identity on the supported subset") {
  auto graphs = read_conllu_file(test::fixture_path("roundtrip.conllu"));
  std::ostringstream out;
  write_conllu(out, graphs);
  std::istringstream back(out.str());
  auto again = read_conllu(back);
  REQUIRE(again.size() == graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    CHECK(again[i].arcs == graphs[i].arcs);
    CHECK(again[i].tokens.size() == graphs[i].tokens.size());
  }
  std::ostringstream out2;
  write_conllu(out2, again);
  CHECK(out.str() == out2.str());
}

TEST_CASE("sdp reader on the DM example") {
  auto graphs = read_sdp_file(test::fixture_path("fig1c.sdp"));
  REQUIRE(graphs.size() == 1);
  const BilexicalGraph& g = graphs[0];
  CHECK(g.id == "fig1c");
  CHECK(g.tokens.size() == 7);
  CHECK(g.tops == std::set<int>{5});
  std::set<Arc> arcs(g.arcs.begin(), g.arcs.end());
  CHECK(arcs.count({1, 2, "ARG2"}));
  CHECK(arcs.count({1, 5, "ARG1"}));
  CHECK(arcs.count({5, 4, "ARG1"}));
  CHECK(arcs.count({5, 7, "ARG2"}));
  CHECK(arcs.count({6, 5, "ARG1"}));
  CHECK(arcs.count({6, 7, "ARG2"}));
  // In-degree-0 participants that are not tops become explicit root arcs.
  CHECK(arcs.count({0, 1, "root"}));
  CHECK(arcs.count({0, 6, "root"}));
  CHECK(g.arcs.size() == 8);
}

TEST_CASE("sdp record with two tops") {
  auto graphs = read_sdp_file(test::fixture_path("two_tops.sdp"));
  REQUIRE(graphs.size() == 1);
  CHECK(graphs[0].tops == std::set<int>{1, 3});
}

TEST_CASE("sdp write-read identity") {
  auto graphs = read_sdp_file(test::fixture_path("fig1c.sdp"));
  std::ostringstream out;
  write_sdp(out, graphs);
  std::istringstream back(out.str());
  auto again = read_sdp(back);
  REQUIRE(again.size() == graphs.size());
  CHECK(again[0].arcs == graphs[0].arcs);
  CHECK(again[0].tops == graphs[0].tops);
  std::ostringstream out2;
  write_sdp(out2, again);
  CHECK(out.str() == out2.str());
}

TEST_CASE("cyclic dependency input is rejected") {
  std::istringstream in(
      "1\ta\t_\tX\t_\t_\t2\tdep\t_\t_\n"
      "2\tb\t_\tX\t_\t_\t1\tdep\t_\t_\n"
      "\n");
  CHECK_THROWS_WITH_AS(read_conllu(in), doctest::Contains("cyclic"), DataError);
}
