#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "hgsort/analysis.hpp"
#include "hgsort/cells.hpp"

using namespace hgsort;

namespace {

PortView port(std::uint64_t v, bool valid) { return {Element{v, {}}, valid, false}; }
Element el(std::uint64_t v) { return {v, {}}; }

}  // namespace

TEST_CASE("hourglass_select") {
  SUBCASE("minimum with room available") {
    const auto s = hourglass_select(port(2, true), port(5, true), false, TieBreak::left);
    CHECK(s == Selection{el(2), true, true, false});
  }
  SUBCASE("invalid left selects right even when its data is smaller") {
    const auto s = hourglass_select(port(9, false), port(7, true), false, TieBreak::left);
    CHECK(s == Selection{el(7), true, false, true});
    const auto s2 = hourglass_select(port(1, false), port(7, true), false, TieBreak::left);
    CHECK(s2 == Selection{el(7), true, false, true});
  }
  SUBCASE("full cell blocks both parents but still points at the minimum") {
    const auto s = hourglass_select(port(2, true), port(5, true), true, TieBreak::left);
    CHECK(s == Selection{el(2), true, false, false});
  }
  SUBCASE("ties follow the policy") {
    const PortView a{Element{4, 0}, true, false}, b{Element{4, 1}, true, false};
    CHECK(hourglass_select(a, b, false, TieBreak::left).r_l);
    CHECK(hourglass_select(a, b, false, TieBreak::right).r_r);
  }
  SUBCASE("missing right parent always takes the left side") {
    const auto s = hourglass_select(port(8, true), PortView{}, false, TieBreak::right);
    CHECK(s == Selection{el(8), true, true, false});
  }
  SUBCASE("both invalid still routes ready, carries no data") {
    const auto s = hourglass_select(PortView{}, PortView{}, false, TieBreak::left);
    CHECK_FALSE(s.v);
    CHECK_FALSE(s.d.has_value());
    CHECK(s.r_l + s.r_r == 1);
  }
}

TEST_CASE("hourglass_commit") {
  const Selection four{el(4), true, true, false};
  SUBCASE("fill empty first register") {
    for (bool r_out : {false, true}) {
      CHECK(hourglass_commit({}, four, r_out) == CellRegisters{el(4), {}, true, false});
    }
  }
  SUBCASE("simultaneous in/out") {
    const CellRegisters regs{el(3), {}, true, false};
    CHECK(hourglass_commit(regs, {el(9), true, true, false}, true) ==
          CellRegisters{el(9), {}, true, false});
  }
  SUBCASE("fill second register when not read") {
    const CellRegisters regs{el(3), {}, true, false};
    CHECK(hourglass_commit(regs, {el(9), true, true, false}, false) ==
          CellRegisters{el(3), el(9), true, true});
  }
  SUBCASE("shift out when full") {
    const CellRegisters regs{el(3), el(8), true, true};
    CHECK(hourglass_commit(regs, Selection{}, true) == CellRegisters{el(8), {}, true, false});
  }
  SUBCASE("full and not read holds") {
    const CellRegisters regs{el(3), el(8), true, true};
    CHECK(hourglass_commit(regs, Selection{}, false) == regs);
  }
  SUBCASE("drains to empty") {
    const CellRegisters regs{el(3), {}, true, false};
    CHECK(hourglass_commit(regs, Selection{}, true) == CellRegisters{});
  }
}

TEST_CASE("hourglass_outputs") {
  const auto full = hourglass_outputs({el(3), el(8), true, true});
  CHECK(full.d == el(3));
  CHECK(full.v);
  CHECK_FALSE(full.ready_up);
  CHECK_FALSE(hourglass_outputs({}).v);
  const auto half = hourglass_outputs({el(5), {}, true, false});
  CHECK(half.d == el(5));
  CHECK(half.v);
  CHECK(half.ready_up);
}

TEST_CASE("select then commit keeps register invariants and never drops a value") {
  // Random reachable-shaped states: registers ordered, inputs not below d1
  // (parents stream nondecreasing values).
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20000; ++trial) {
    CellRegisters regs;
    const int fill = static_cast<int>(rng() % 3);
    std::uint64_t a = rng() % 10, b = a + rng() % 10;
    if (fill >= 1) { regs.d0 = el(a); regs.v0 = true; }
    if (fill == 2) { regs.d1 = el(b); regs.v1 = true; }
    const std::uint64_t floor = fill == 2 ? b : (fill == 1 ? a : 0);
    const PortView left = port(floor + rng() % 10, rng() % 2);
    const PortView right = port(floor + rng() % 10, rng() % 2);
    const bool r_out = rng() % 2;
    const auto tie = rng() % 2 ? TieBreak::left : TieBreak::right;

    const Selection sel = hourglass_select(left, right, regs.v1, tie);
    CHECK(int(sel.r_l) + int(sel.r_r) <= 1);
    if (regs.v1) CHECK_FALSE((sel.r_l || sel.r_r));
    const CellRegisters next = hourglass_commit(regs, sel, r_out);
    CHECK((!next.v1 || next.v0));
    if (next.v0 && next.v1) CHECK(next.d0->value <= next.d1->value);

    const bool input_txn = sel.v && !regs.v1;
    const bool output_txn = regs.v0 && r_out;
    const int before = int(regs.v0) + int(regs.v1);
    const int after = int(next.v0) + int(next.v1);
    CHECK(after == before + int(input_txn) - int(output_txn));
  }
}

TEST_CASE("registered_step") {
  const RegisteredInput four{el(4), true, false}, seven{el(7), true, false};
  const RegisteredInput empty{{}, false, true}, pending{{}, false, false};

  SUBCASE("takes the minimum and clears its source") {
    const auto s = registered_step({}, four, seven, false, TieBreak::left);
    CHECK(s == RegisteredStep{{el(4), true, false}, true, false});
  }
  SUBCASE("a consumed cycle is read-only") {
    const RegisteredNodeState full{el(4), true, false};
    const auto s = registered_step(full, four, seven, true, TieBreak::left);
    CHECK(s == RegisteredStep{{el(4), false, false}, false, false});
  }
  SUBCASE("both subtrees exhausted marks empty") {
    const auto s = registered_step({}, empty, empty, false, TieBreak::left);
    CHECK(s == RegisteredStep{{{}, false, true}, false, false});
  }
  SUBCASE("one side exhausted forwards the other") {
    CHECK(registered_step({}, four, empty, false, TieBreak::left).clear1);
    CHECK(registered_step({}, empty, seven, false, TieBreak::left).clear2);
  }
  SUBCASE("waits while a subtree may still deliver") {
    const auto s = registered_step({}, four, pending, false, TieBreak::left);
    CHECK(s == RegisteredStep{{}, false, false});
  }
  SUBCASE("full and not consumed holds") {
    const RegisteredNodeState full{el(1), true, false};
    CHECK(registered_step(full, four, seven, false, TieBreak::left).node == full);
  }
  SUBCASE("ties") {
    const RegisteredInput a{Element{4, 0}, true, false}, b{Element{4, 1}, true, false};
    CHECK(registered_step({}, a, b, false, TieBreak::left).clear1);
    CHECK(registered_step({}, a, b, false, TieBreak::right).clear2);
  }
}

TEST_CASE("leaf_step") {
  const LeafState seven{el(7), true};
  CHECK(leaf_step(seven, true) == LeafState{el(7), false});
  CHECK(leaf_step(seven, false) == seven);
  CHECK(leaf_step(LeafState{}, true) == LeafState{});
}

TEST_CASE("comb_extract") {
  std::vector<LeafState> leaves{{el(3), true}, {el(1), true}, {el(2), true}};
  const auto ex = comb_extract(leaves, TieBreak::left);
  CHECK(ex.winner == el(1));
  CHECK(ex.winner_leaf == 1);
  CHECK(ex.path_depth == 4);

  std::vector<LeafState> ties{{el(5), true}, {el(5), true}};
  CHECK(comb_extract(ties, TieBreak::left).winner_leaf == 0);
  CHECK(comb_extract(ties, TieBreak::right).winner_leaf == 1);

  std::vector<std::uint64_t> got;
  for (int k = 0; k < 3; ++k) {
    const auto e = comb_extract(leaves, TieBreak::left);
    got.push_back(e.winner.value);
    leaves[e.winner_leaf] = leaf_step(leaves[e.winner_leaf], true);
  }
  CHECK(got == std::vector<std::uint64_t>{1, 2, 3});
  CHECK_THROWS_AS((void)comb_extract(leaves, TieBreak::left), std::invalid_argument);
}

TEST_CASE("repeated comb_extract equals the stable sort, exhaustively up to n = 8") {
  // Every value pattern over {0..n-1} (with repeats) for n <= 5, and all
  // permutations of a duplicate-bearing multiset up to n = 8.
  auto check = [](const std::vector<std::uint64_t>& values) {
    const auto input = make_elements(values, true);
    std::vector<LeafState> leaves;
    for (const auto& e : input) leaves.push_back({e, true});
    const auto expected = oracle_stable_sort(input);
    for (std::size_t k = 0; k < input.size(); ++k) {
      const auto ex = comb_extract(leaves, TieBreak::left);
      REQUIRE(ex.winner == expected[k]);
      leaves[ex.winner_leaf] = leaf_step(leaves[ex.winner_leaf], true);
    }
  };
  for (std::size_t n = 1; n <= 5; ++n) {
    std::vector<std::uint64_t> v(n, 0);
    for (;;) {
      check(v);
      std::size_t i = 0;
      while (i < n && ++v[i] == n) v[i++] = 0;
      if (i == n) break;
    }
  }
  for (std::size_t n = 6; n <= 8; ++n) {
    std::vector<std::uint64_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i / 2;
    do {
      check(v);
    } while (std::next_permutation(v.begin(), v.end()));
  }
}
