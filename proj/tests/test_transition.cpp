#include "doctest.h"

#include "dagparse/state.hpp"
#include "dagparse/task.hpp"
#include "testutil.hpp"

using namespace dagparse;

namespace {

std::vector<Token> make_tokens(int n) {
  std::vector<Token> out;
  for (int i = 1; i <= n; ++i) {
    Token t;
    t.position = i;
    t.text = "w" + std::to_string(i);
    annotate_token(t);
    out.push_back(t);
  }
  return out;
}

TaskConfig labeled_task() {
  TaskConfig t;
  t.name = "t";
  t.labeled = true;
  t.labels = {"A", "B", "P"};
  return t;
}

}  // namespace

TEST_CASE("initial state") {
  CHECK_THROWS_AS(initial_state({}), DataError);
  ParserState one = initial_state(make_tokens(1));
  CHECK(one.stack == std::vector<int>{one.graph.root()});
  CHECK(one.buffer.size() == 1);

  ParserState st = initial_state(make_tokens(7));
  CHECK(st.buffer.size() == 7);
  CHECK(st.swap_index[static_cast<std::size_t>(st.graph.root())] == SwapIndex::of_int(0));
  CHECK(st.swap_index[static_cast<std::size_t>(st.graph.terminal(3))] == SwapIndex::of_int(3));
}

TEST_CASE("shift, node swap-index mean, and edge directions") {
  TaskConfig task = labeled_task();
  ParserState st = initial_state(make_tokens(4));
  apply(st, {TransitionKind::Shift, ""}, task);
  CHECK(st.s(0) == st.graph.terminal(1));
  apply(st, {TransitionKind::Shift, ""}, task);
  apply(st, {TransitionKind::Shift, ""}, task);
  // s0 = t3 (swap index 3), b0 = t4 (swap index 4).
  apply(st, {TransitionKind::Node, "P"}, task);
  int created = st.b(0);
  CHECK(st.graph.node(created).kind == NodeKind::Nonterminal);
  CHECK(st.swap_index[static_cast<std::size_t>(created)].to_double() == 3.5);
  CHECK(st.graph.has_edge(created, st.graph.terminal(3), "P", false));

  // LeftEdge makes s1 the child; RightEdge makes s0 the child.
  ParserState st2 = initial_state(make_tokens(2));
  apply(st2, {TransitionKind::Shift, ""}, task);
  apply(st2, {TransitionKind::Node, "P"}, task);  // parent of t1 on the buffer
  apply(st2, {TransitionKind::Shift, ""}, task);  // stack: root t1? no: root, t1 was reduced?
  // stack is [root, t1, n]; s0 = n, s1 = t1: the P edge already exists n->t1.
  CHECK(st2.s(0) == 3);  // created node index (root=0, t1=1, t2=2, n=3)
  apply(st2, {TransitionKind::LeftRemote, "A"}, task);  // s0 -> s1 remote
  CHECK(st2.graph.has_edge(3, 1, "A", true));
  apply(st2, {TransitionKind::Swap, ""}, task);  // moves s1 = t1 back to the buffer
  CHECK(st2.b(0) == 1);
  CHECK(st2.s(0) == 3);
}

TEST_CASE("reduce rules") {
  TaskConfig task = labeled_task();
  ParserState st = initial_state(make_tokens(2));
  CHECK(illegal_reason(st, {TransitionKind::Reduce, ""}, task).has_value());  // root on top
  apply(st, {TransitionKind::Shift, ""}, task);
  // t1 has no parent yet.
  CHECK(illegal_reason(st, {TransitionKind::Reduce, ""}, task) ==
        std::string("cannot reduce a parentless node"));
  apply(st, {TransitionKind::RightEdge, "A"}, task);  // root -> t1
  CHECK(legal(st, {TransitionKind::Reduce, ""}, task));
}

TEST_CASE("swap legality") {
  TaskConfig task = labeled_task();
  ParserState st = initial_state(make_tokens(3));
  CHECK_FALSE(legal(st, {TransitionKind::Swap, ""}, task));  // fewer than two non-root nodes
  apply(st, {TransitionKind::Shift, ""}, task);
  // s1 is the root.
  CHECK(illegal_reason(st, {TransitionKind::Swap, ""}, task) ==
        std::string("root cannot be swapped"));
  apply(st, {TransitionKind::Shift, ""}, task);
  CHECK(legal(st, {TransitionKind::Swap, ""}, task));
  apply(st, {TransitionKind::Swap, ""}, task);  // t1 to the buffer head
  CHECK(st.b(0) == st.graph.terminal(1));
  apply(st, {TransitionKind::Shift, ""}, task);
  // Pair (t2, t1) now has swap_index(s1)=2 > swap_index(s0)=1: no re-swap.
  CHECK(illegal_reason(st, {TransitionKind::Swap, ""}, task) ==
        std::string("pair already swapped"));
}

TEST_CASE("ucca terminal single-parent constraint") {
  TaskConfig ucca = labeled_task();
  ucca.terminal_single_parent = true;
  ParserState st = initial_state(make_tokens(2));
  apply(st, {TransitionKind::Shift, ""}, ucca);
  apply(st, {TransitionKind::RightEdge, "A"}, ucca);  // root -> t1
  CHECK(illegal_reason(st, {TransitionKind::RightRemote, "A"}, ucca) ==
        std::string("terminal may only have one parent"));
  TaskConfig generic = labeled_task();
  CHECK(legal(st, {TransitionKind::RightRemote, "B"}, generic));
}

TEST_CASE("finish requires an empty buffer and full attachment") {
  TaskConfig task = labeled_task();
  ParserState st = initial_state(make_tokens(1));
  CHECK(illegal_reason(st, {TransitionKind::Finish, ""}, task) ==
        std::string("buffer must be empty"));
  apply(st, {TransitionKind::Shift, ""}, task);
  CHECK(illegal_reason(st, {TransitionKind::Finish, ""}, task) ==
        std::string("unattached nodes remain"));
  apply(st, {TransitionKind::RightEdge, "A"}, task);
  CHECK(legal(st, {TransitionKind::Finish, ""}, task));
  apply(st, {TransitionKind::Finish, ""}, task);
  CHECK(st.finished);
  CHECK(st.graph.validate().empty());
}

TEST_CASE("label discipline follows the task") {
  TaskConfig labeled = labeled_task();
  TaskConfig unlabeled = labeled_task();
  unlabeled.labeled = false;
  ParserState st = initial_state(make_tokens(2));
  apply(st, {TransitionKind::Shift, ""}, labeled);
  CHECK(illegal_reason(st, {TransitionKind::RightEdge, ""}, labeled) ==
        std::string("labeled task requires a label"));
  CHECK(illegal_reason(st, {TransitionKind::RightEdge, "A"}, unlabeled) ==
        std::string("unlabeled task forbids labels"));
  CHECK(illegal_reason(st, {TransitionKind::Shift, "A"}, labeled) ==
        std::string("transition kind takes no label"));
}

TEST_CASE("propbank frame constraint") {
  TaskConfig task = labeled_task();
  task.labels = {"ARG0", "ARG1", "ARG2", "P"};
  task.frames = {{"want-01", {"ARG0", "ARG1"}}};
  ParserState st = initial_state(make_tokens(2));
  apply(st, {TransitionKind::Shift, ""}, task);
  apply(st, {TransitionKind::Node, "P"}, task);
  int created = st.b(0);
  st.graph.node_mut(created).label = "want-01";
  apply(st, {TransitionKind::Shift, ""}, task);  // t2? no: buffer head is the created node
  apply(st, {TransitionKind::Shift, ""}, task);  // now t2 on top, created at s1
  CHECK(st.s(0) == st.graph.terminal(2));
  CHECK(st.s(1) == created);
  CHECK(illegal_reason(st, {TransitionKind::RightEdge, "ARG2"}, task) ==
        std::string("core argument not defined for frame"));
  CHECK(legal(st, {TransitionKind::RightEdge, "ARG1"}, task));
  // Non-ARG labels are unconstrained.
  CHECK(legal(st, {TransitionKind::RightEdge, "P"}, task));
}

TEST_CASE("task flags rule out node creation and remote edges") {
  TaskConfig t = labeled_task();
  t.node_allowed = false;
  t.remote_allowed = false;
  ParserState st = initial_state(make_tokens(2));
  apply(st, {TransitionKind::Shift, ""}, t);
  CHECK(illegal_reason(st, {TransitionKind::Node, "P"}, t) ==
        std::string("node creation not allowed for task"));
  CHECK(illegal_reason(st, {TransitionKind::RightRemote, "A"}, t) ==
        std::string("remote edges not allowed for task"));
  CHECK(legal(st, {TransitionKind::RightEdge, "A"}, t));
}

TEST_CASE("transition inventory sizes") {
  TaskConfig unlabeled;
  unlabeled.name = "aux";
  unlabeled.labeled = false;
  CHECK(transition_inventory(unlabeled).size() == 9);

  TaskConfig zero;
  zero.name = "zero";
  zero.labeled = true;
  zero.labels = {};
  auto inv = transition_inventory(zero);
  REQUIRE(inv.size() == 4);
  CHECK(inv[0].kind == TransitionKind::Shift);
  CHECK(inv[1].kind == TransitionKind::Reduce);
  CHECK(inv[2].kind == TransitionKind::Swap);
  CHECK(inv[3].kind == TransitionKind::Finish);

  TaskConfig three = labeled_task();  // 3 labels
  CHECK(transition_inventory(three).size() == 4 + 5 * 3);

  TaskConfig ucca = TaskConfig::load(std::string(CONFIGS_DIR) + "/ucca.json");
  CHECK(transition_inventory(ucca).size() == 45);
  CHECK_THROWS_AS(TaskConfig::load("no/such/config.json"), DataError);
}

TEST_CASE("fuzz: invariants hold under random legal transitions") {
  Rng rng(99);
  TaskConfig task = labeled_task();
  for (int round = 0; round < 40; ++round) {
    int n = 1 + rng.below_int(6);
    ParserState st = initial_state(make_tokens(n));
    std::vector<Transition> inventory = transition_inventory(task);
    int swaps = 0;
    for (int step = 0; step < 400 && !st.finished; ++step) {
      // Bias toward finishing so complete parses happen.
      Transition finish{TransitionKind::Finish, ""};
      if (legal(st, finish, task) && rng.bernoulli(0.5)) {
        apply(st, finish, task);
        break;
      }
      std::vector<Transition> options;
      for (const Transition& t : inventory)
        if (legal(st, t, task)) options.push_back(t);
      if (options.empty()) break;
      const Transition& t = options[rng.below(options.size())];
      if (t.kind == TransitionKind::Swap) ++swaps;
      apply(st, t, task);

      // Stack and buffer are disjoint; nodes live in exactly one place.
      for (int node : st.stack) CHECK_FALSE(st.in_buffer(node));
      REQUIRE(st.swap_index.size() == static_cast<std::size_t>(st.graph.node_count()));
    }
    int total_nodes = st.graph.node_count();
    CHECK(swaps <= total_nodes * total_nodes);
    if (st.finished) CHECK(st.graph.validate().empty());
  }
}
