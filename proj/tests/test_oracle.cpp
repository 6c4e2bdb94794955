#include <doctest.h>

#include "dlf/finisher.hpp"
#include "dlf/oracle.hpp"
#include "support.hpp"

using namespace dlf;

TEST_CASE("lower bound") {
  CHECK(la_lower_bound(Digraph(3, {})) == 0);
  CHECK(la_lower_bound(directed_path(5)) == 1);
  CHECK(la_lower_bound(directed_cycle(6)) == 2);
  CHECK(la_lower_bound(symmetric_complete(3)) == 3);
  CHECK(la_lower_bound(symmetric_complete(5)) == 5);
  // Irregular: plain max degree.
  CHECK(la_lower_bound(Digraph(3, {{0, 1}, {0, 2}})) == 2);
}

TEST_CASE("symmetric complete digraphs") {
  const auto k3 = exact_la(symmetric_complete(3));
  REQUIRE(k3.value);
  CHECK(*k3.value == 4);
  CHECK(verify_decomposition(symmetric_complete(3), k3.witness));
  const auto k5 = exact_la(symmetric_complete(5));
  REQUIRE(k5.value);
  CHECK(*k5.value == 6);
  CHECK(verify_decomposition(symmetric_complete(5), k5.witness));
  CHECK(*exact_la(symmetric_complete(2)).value == 2);
  CHECK(*exact_la(symmetric_complete(4)).value == 4);
}

TEST_CASE("cycles and paths") {
  for (std::size_t n = 2; n <= 9; ++n) CHECK(*exact_la(directed_cycle(n)).value == 2);
  CHECK(*exact_la(directed_path(7)).value == 1);
  CHECK(*exact_la(Digraph(4, {})).value == 0);
}

TEST_CASE("exact search agrees with exhaustive enumeration") {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const Digraph d = random_bounded_digraph(5, 2, 12, 40 + seed);
    const auto r = exact_la(d);
    REQUIRE(r.value);
    CHECK(*r.value == test::brute_force_la(d));
    CHECK(r.lower <= *r.value);
    CHECK(verify_decomposition(d, r.witness));
  }
}

TEST_CASE("greedy upper bound is a decomposition") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Digraph d = random_bounded_digraph(12, 4, 60, seed);
    const auto g = greedy_decomposition(d);
    CHECK(verify_decomposition(d, g));
    CHECK(test::naive_is_linear(d, g));
  }
}

TEST_CASE("budget exhaustion returns an interval") {
  SearchBudget tiny;
  tiny.node_limit = 1;
  const auto r = exact_la(symmetric_complete(5), tiny);
  CHECK_FALSE(r.value);
  CHECK(r.lower == 5);
  CHECK(r.upper >= 6);
  CHECK(verify_decomposition(symmetric_complete(5), r.witness));
  const auto j = la_result_to_json(symmetric_complete(5), r);
  CHECK(j["la"].is_null());
  CHECK(j["lower"] == 5);
}

TEST_CASE("list colorings") {
  const Digraph two(2, {{0, 1}, {1, 0}});
  CHECK(exists_linear_list_coloring(two, ListAssignment(std::vector<std::vector<Color>>{{1}, {1}}))
            .status == SearchStatus::Absent);
  const auto ok = exists_linear_list_coloring(
      two, ListAssignment(std::vector<std::vector<Color>>{{1}, {1, 2}}));
  REQUIRE(ok.status == SearchStatus::Found);
  CHECK(ok.coloring == std::vector<Color>{1, 2});

  // Lists {0..k-1} everywhere decide la <= k.
  const Digraph k3 = symmetric_complete(3);
  CHECK(exists_linear_list_coloring(k3, ListAssignment::uniform(6, 3)).status ==
        SearchStatus::Absent);
  CHECK(exists_linear_list_coloring(k3, ListAssignment::uniform(6, 4)).status ==
        SearchStatus::Found);

  Rng rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    const Digraph d = random_bounded_digraph(5, 2, 10, 700 + trial);
    const ListAssignment lists = test::random_lists(d, 3, 2, rng);
    const auto r = exists_linear_list_coloring(d, lists);
    // Exhaustive check over all list choices.
    bool any = false;
    std::vector<std::size_t> idx(d.arc_count(), 0);
    for (;;) {
      std::vector<Color> col(d.arc_count());
      for (ArcId a = 0; a < d.arc_count(); ++a) col[a] = lists.at(a)[idx[a]];
      if (test::naive_is_linear(d, col)) {
        any = true;
        break;
      }
      std::size_t i = 0;
      while (i < idx.size() && ++idx[i] == lists.size(i)) idx[i++] = 0;
      if (i == idx.size()) break;
    }
    CHECK((r.status == SearchStatus::Found) == any);
    if (r.status == SearchStatus::Found) {
      CHECK(test::naive_is_linear(d, r.coloring));
      for (ArcId a = 0; a < d.arc_count(); ++a) CHECK(lists.contains(a, r.coloring[a]));
    }
  }
}

TEST_CASE("verify_decomposition") {
  const Digraph d = directed_cycle(3);
  CHECK_FALSE(verify_decomposition(d, std::vector<Color>{0, 0, 0}));
  CHECK(verify_decomposition(d, std::vector<Color>{0, 0, 1}));
  PartialColoring partial(d);
  partial.assign(0, 1);
  CHECK_THROWS_AS(verify_decomposition(d, partial), InvalidInput);
  CHECK_THROWS_AS(verify_decomposition(d, std::vector<Color>{0}), InvalidInput);
}

TEST_CASE("list edge coloring") {
  const auto ok = exists_list_edge_coloring(make_instance(Multigraph{3, {{0, 1}, {1, 2}}}, {{1, 2}, {1}}));
  REQUIRE(ok.status == SearchStatus::Found);
  CHECK(ok.coloring == std::vector<Color>{2, 1});
  CHECK(exists_list_edge_coloring(make_instance(Multigraph{2, {{0, 1}, {0, 1}}}, {{1}, {1}})).status ==
        SearchStatus::Absent);
}
