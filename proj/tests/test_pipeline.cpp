#include <doctest.h>

#include "dlf/oracle.hpp"
#include "dlf/pipeline.hpp"
#include "support.hpp"

using namespace dlf;

namespace {

DecomposeConfig desk(std::size_t list_size, std::uint64_t seed) {
  DecomposeConfig cfg;
  cfg.list_size = list_size;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("arcless input") {
  const Digraph d(6, {});
  const auto r = decompose(d, desk(4, 1));
  CHECK(r.valid());
  CHECK(r.colors_used == 0);
}

TEST_CASE("long cycle with two colors and no reserve") {
  const Digraph d = directed_cycle(100);
  DecomposeConfig cfg = desk(2, 3);
  cfg.reserve_profile = ReserveProfile::None;
  const auto r = decompose(d, cfg);
  REQUIRE(r.valid());
  CHECK(r.colors_used <= 2);
  CHECK(verify_decomposition(d, r.coloring));
  CHECK(r.instance.g.edges.empty());
}

TEST_CASE("desk pipeline on a 32-regular Eulerian digraph") {
  const Digraph d = eulerian_orientation(random_even_regular_multigraph(200, 32, 11));
  DecomposeConfig cfg = desk(128, 11);
  const auto r = decompose(d, cfg);
  REQUIRE(r.valid());
  CHECK(verify_decomposition(d, r.coloring));
  CHECK(test::naive_is_linear(d, [&] {
    std::vector<Color> c(d.arc_count());
    for (ArcId a = 0; a < d.arc_count(); ++a) c[a] = *r.coloring.color(a);
    return c;
  }()));
  CHECK(r.colors_used <= 128);
  REQUIRE(r.plan);
  CHECK(verify_reserve(d, ListAssignment::uniform(d.arc_count(), 128), *r.plan).valid());
  // Finisher colors come from the edge's reserve intersection.
  for (std::size_t e = 0; e < r.instance.arc_of_edge.size(); ++e) {
    const ArcId a = r.instance.arc_of_edge[e];
    const Arc& arc = d.arc(a);
    const Color c = *r.coloring.color(a);
    CHECK(std::binary_search(r.plan->reserve_of[arc.tail].begin(), r.plan->reserve_of[arc.tail].end(), c));
    CHECK(std::binary_search(r.plan->reserve_of[arc.head].begin(), r.plan->reserve_of[arc.head].end(), c));
  }
  CHECK(r.nibble_colored + r.instance.g.edges.size() == d.arc_count());
}

TEST_CASE("determinism") {
  const Digraph d = eulerian_orientation(random_even_regular_multigraph(60, 8, 2));
  DecomposeConfig a = desk(96, 5);
  const auto r1 = decompose(d, a);
  const auto r2 = decompose(d, a);
  CHECK(r1.coloring == r2.coloring);
  CHECK(decompose_stats_json(a, r1).dump() == decompose_stats_json(a, r2).dump());

  DecomposeConfig s = a;
  s.nibble.exec = Exec::Serial;
  const auto r3 = decompose(d, s);
  CHECK(r3.coloring == r1.coloring);
  auto j1 = decompose_stats_json(a, r1);
  auto j3 = decompose_stats_json(s, r3);
  j1.erase("config");
  j3.erase("config");
  CHECK(j1 == j3);

  const auto other = decompose(d, desk(96, 6));
  CHECK(other.valid());
}

TEST_CASE("explicit lists and errors") {
  const Digraph d = symmetric_complete(3);
  DecomposeConfig cfg;
  cfg.reserve_profile = ReserveProfile::None;
  // Arc order (0,1),(0,2),(1,0),(1,2),(2,0),(2,1); classes 0->1->2, 1->0->2
  // and two single arcs.
  cfg.lists = ListAssignment(std::vector<std::vector<Color>>{{1}, {2}, {2}, {1}, {3}, {4}});
  const auto r = decompose(d, cfg);
  CHECK(r.valid());
  CHECK(r.colors_used == 4);

  cfg.lists = ListAssignment(std::vector<std::vector<Color>>{{1}, {1}, {1}, {1}, {1}, {1}});
  CHECK_THROWS_AS(decompose(d, cfg), BudgetExhausted);

  CHECK(parse_reserve_profile("none") == ReserveProfile::None);
  CHECK(std::string(to_string(ReserveProfile::Desk)) == "desk");
  CHECK_THROWS_AS(parse_reserve_profile("bogus"), InvalidInput);
}
