#include <doctest.h>

#include "dlf/suspicious.hpp"
#include "support.hpp"

using namespace dlf;

namespace {

ListAssignment lists_for(const Digraph& d, std::initializer_list<std::pair<Arc, std::vector<Color>>> l) {
  ListAssignment out(d.arc_count());
  for (const auto& [arc, colors] : l) out.set(*d.find_arc(arc.tail, arc.head), colors);
  return out;
}

}  // namespace

TEST_CASE("from-to examples") {
  // x=0 -> y=1 colored c, y -> z=2 uncolored listing c.
  const Digraph d(3, {{0, 1}, {1, 2}});
  const Color c = 4;
  PartialColoring g(d);
  g.assign(*d.find_arc(0, 1), c);
  const auto lists = lists_for(d, {{{1, 2}, {c}}});
  const auto one = enumerate_from_to(d, lists, g, 0, 2, c, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].vertices == std::vector<Vertex>{0, 1, 2});
  CHECK(one[0].uncolored_positions == std::vector<std::size_t>{1});
  CHECK(one == test::naive_from_to(d, lists, g, 0, 2, c, 1));
  CHECK(is_suspicious(d, lists, g, one[0]));

  CHECK(enumerate_from_to(d, ListAssignment(d.arc_count()), PartialColoring(d), 0, 2, c, 1).empty());

  PartialColoring full(d);
  full.assign(0, c);
  full.assign(1, c);
  const auto zero = enumerate_from_to(d, ListAssignment(d.arc_count()), full, 0, 2, c, 0);
  REQUIRE(zero.size() == 1);
  CHECK(zero[0].uncolored_length() == 0);
}

TEST_CASE("tail examples") {
  const Color c = 1;
  const Digraph iso(2, {});
  CHECK(enumerate_tail(iso, ListAssignment(0), PartialColoring(iso), 1, c, 1).empty());

  const Digraph single(2, {{0, 1}});
  const auto l1 = lists_for(single, {{{0, 1}, {c}}});
  const auto t1 = enumerate_tail(single, l1, PartialColoring(single), 1, c, 1);
  REQUIRE(t1.size() == 1);
  CHECK(t1[0].vertices == std::vector<Vertex>{0, 1});

  // 0 -(uncolored)-> 1 -(c)-> 2 -(uncolored)-> 3.
  const Digraph alt(4, {{0, 1}, {1, 2}, {2, 3}});
  PartialColoring g(alt);
  g.assign(*alt.find_arc(1, 2), c);
  const auto l = lists_for(alt, {{{0, 1}, {c}}, {{2, 3}, {c}}});
  const auto t2 = enumerate_tail(alt, l, g, 3, c, 2);
  REQUIRE(t2.size() == 1);
  CHECK(t2[0].vertices == std::vector<Vertex>{0, 1, 2, 3});
  CHECK(t2 == test::naive_tail(alt, l, g, 3, c, 2));
}

TEST_CASE("danger set examples") {
  const Color c = 4;
  // The 2-arc example closed by z -> x.
  const Digraph d(3, {{0, 1}, {1, 2}, {2, 0}});
  PartialColoring g(d);
  g.assign(*d.find_arc(0, 1), c);
  const auto lists = lists_for(d, {{{1, 2}, {c}}, {{2, 0}, {c}}});
  const ArcId zx = *d.find_arc(2, 0);
  const auto ds = danger_set(d, lists, g, zx, c, 3);
  const std::vector<Vertex> xyz{0, 1, 2};
  CHECK(std::any_of(ds.begin(), ds.end(), [&](const SuspiciousPath& p) {
    return p.vertices == xyz && p.uncolored_length() == 1;
  }));

  // ell_int = 1: only the tail part.
  CHECK(danger_set(d, lists, g, zx, c, 1) == enumerate_tail(d, lists, g, 2, c, 1));

  // v does not reach u: tail-only content.
  const Digraph p3(3, {{0, 1}, {1, 2}});
  const auto all_c = ListAssignment(std::vector<std::vector<Color>>{{c}, {c}});
  const ArcId uv = *p3.find_arc(1, 2);
  const auto only_tail = danger_set(p3, all_c, PartialColoring(p3), uv, c, 2);
  CHECK(only_tail == enumerate_tail(p3, all_c, PartialColoring(p3), 1, c, 2));
}

TEST_CASE("enumeration equals the all-simple-paths filter on random states") {
  Rng rng(99);
  for (int trial = 0; trial < 150; ++trial) {
    const Digraph d = random_bounded_digraph(7, 3, 18, 2000 + trial);
    const ListAssignment big = test::random_lists(d, 2, 2, rng);
    const PartialColoring g = test::random_partial(d, big, 0.4, rng);
    const ListAssignment lists = test::make_compatible(d, big, g);
    for (Color c = 0; c < 2; ++c) {
      for (Vertex u = 0; u < d.vertex_count(); ++u) {
        for (std::size_t k = 1; k <= 3; ++k) {
          CHECK(enumerate_tail(d, lists, g, u, c, k) == test::naive_tail(d, lists, g, u, c, k));
        }
        for (Vertex v = 0; v < d.vertex_count(); ++v) {
          if (v == u) continue;
          for (std::size_t k = 0; k <= 3; ++k) {
            CHECK(enumerate_from_to(d, lists, g, v, u, c, k) ==
                  test::naive_from_to(d, lists, g, v, u, c, k));
          }
        }
      }
    }
  }
}

TEST_CASE("path cap") {
  const Digraph d = symmetric_complete(6);
  const auto lists = ListAssignment::uniform(d.arc_count(), 1);
  CHECK_THROWS_AS(enumerate_tail(d, lists, PartialColoring(d), 0, 0, 3, 5), PathOverflow);
}

TEST_CASE("count bound check") {
  SUBCASE("empty state") {
    const Digraph d(4, {});
    const auto r = count_bound_check(d, ListAssignment(0), PartialColoring(d), 1);
    CHECK(r.precondition_ok());
    CHECK(r.bounds_ok());
  }
  SUBCASE("discipline violation is flagged") {
    // 0->1 colored c while 2->1 still lists c.
    const Digraph d(3, {{0, 1}, {2, 1}});
    PartialColoring g(d);
    g.assign(*d.find_arc(0, 1), 3);
    const auto lists = lists_for(d, {{{2, 1}, {3}}});
    const auto r = count_bound_check(d, lists, g, 4);
    CHECK(r.discipline_violations >= 1);
    CHECK_FALSE(r.precondition_ok());
  }
  SUBCASE("neighbor bound is checked") {
    const Digraph d = symmetric_complete(4);
    const auto lists = ListAssignment::uniform(d.arc_count(), 2);
    const auto r = count_bound_check(d, lists, PartialColoring(d), 2);
    CHECK_FALSE(r.neighbor_bound_ok);
    CHECK(r.max_neighbors == 3);
  }
}
