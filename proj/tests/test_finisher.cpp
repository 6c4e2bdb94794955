#include <doctest.h>

#include "dlf/finisher.hpp"
#include "dlf/oracle.hpp"
#include "support.hpp"

using namespace dlf;

namespace {

// Max over (e, c) of the number of other edges touching e whose list has c.
std::size_t naive_incidence(const FinishInstance& inst) {
  const auto& E = inst.g.edges;
  std::size_t best = 0;
  for (std::size_t e = 0; e < E.size(); ++e) {
    std::map<Color, std::size_t> count;
    for (std::size_t f = 0; f < E.size(); ++f) {
      if (f == e) continue;
      const bool touch = E[f].first == E[e].first || E[f].first == E[e].second ||
                         E[f].second == E[e].first || E[f].second == E[e].second;
      if (!touch) continue;
      for (Color c : inst.lists[f]) best = std::max(best, ++count[c]);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("build_instance") {
  const Digraph d(3, {{0, 1}, {1, 0}, {1, 2}});
  PartialColoring g(d);
  g.assign(*d.find_arc(1, 2), 4);
  const ListAssignment res(std::vector<std::vector<Color>>{{3, 1}, {2, 1, 7}, {}});
  const FinishInstance inst = build_instance(d, g, res);
  // The 2-cycle becomes two parallel edges.
  REQUIRE(inst.g.edges.size() == 2);
  CHECK(inst.g.edges[0] == std::pair<Vertex, Vertex>{0, 1});
  CHECK(inst.g.edges[1] == std::pair<Vertex, Vertex>{0, 1});
  CHECK(inst.arc_of_edge == std::vector<ArcId>{*d.find_arc(0, 1), *d.find_arc(1, 0)});
  CHECK(inst.lists[0] == std::vector<Color>{1, 3});
  CHECK(inst.L == 2);
  CHECK(inst.N == 1);

  PartialColoring none(d);
  CHECK_THROWS_AS(build_instance(d, none, res), InvalidInput);
  CHECK(build_instance(d, none, ListAssignment::uniform(3, 1)).N == 2);
}

TEST_CASE("finish examples") {
  SUBCASE("disjoint lists need no resampling") {
    Multigraph g{3, {{0, 1}, {1, 2}, {0, 2}}};
    const auto inst = make_instance(g, {{1}, {2}, {3}});
    const auto r = finish(inst, 1);
    CHECK(r.resamples == 0);
    CHECK(r.colors == std::vector<Color>{1, 2, 3});
    CHECK(verify_finish(inst, r.colors));
    CHECK(r.below_guarantee);
  }
  SUBCASE("parallel edges with one shared color cannot be finished") {
    Multigraph g{2, {{0, 1}, {0, 1}}};
    const auto inst = make_instance(g, {{1}, {1}});
    CHECK_THROWS_AS(finish(inst, 1, 50), BudgetExhausted);
  }
  SUBCASE("empty instance") {
    const auto r = finish(make_instance(Multigraph{4, {}}, {}), 1);
    CHECK(r.colors.empty());
  }
  SUBCASE("lists are truncated to L") {
    Multigraph g{2, {{0, 1}}};
    const auto inst = make_instance(g, {{5, 2, 9}});
    CHECK(inst.L == 3);
    auto uneven = make_instance(Multigraph{3, {{0, 1}, {1, 2}}}, {{5, 2, 9}, {4}});
    CHECK(uneven.L == 1);
    CHECK(truncated(uneven).lists[0] == std::vector<Color>{2});
    CHECK(finish(uneven, 3).colors == std::vector<Color>{2, 4});
  }
}

TEST_CASE("verify_finish") {
  Multigraph g{3, {{0, 1}, {1, 2}}};
  const auto inst = make_instance(g, {{1, 2}, {1, 2}});
  CHECK(verify_finish(inst, {1, 2}));
  CHECK_FALSE(verify_finish(inst, {1, 1}));
  CHECK_FALSE(verify_finish(inst, {1, 3}));
  CHECK_FALSE(verify_finish(inst, {1}));
}

TEST_CASE("random instances with L = 8N finish and verify") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    // Max degree k leaves at most 2(k-1) other edges at e, which bounds N.
    const std::size_t k = 2 + seed % 2, n_max = 2 * (k - 1);
    const auto inst = random_finish_instance(30, 40, k, 8 * n_max, 8 * n_max * 4, seed);
    CHECK(inst.N == naive_incidence(inst));
    CHECK(inst.N == incidence_bound(inst.g, inst.lists));
    for (auto deg : inst.g.degrees()) CHECK(deg <= k);
    const auto r = finish(inst, seed);
    CHECK_FALSE(r.below_guarantee);
    CHECK(verify_finish(inst, r.colors));
    CHECK(verify_finish(truncated(inst), r.colors));
    CHECK(finish(inst, seed).colors == r.colors);
  }
}

TEST_CASE("agreement with the exhaustive search on tiny instances") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = random_finish_instance(5, 6, 3, 2, 3, 500 + seed);
    const auto exact = exists_list_edge_coloring(inst);
    REQUIRE(exact.status != SearchStatus::Indeterminate);
    bool found = false;
    try {
      found = verify_finish(inst, finish(inst, seed, 20000).colors);
    } catch (const BudgetExhausted&) {
    }
    // The resampler never succeeds on an infeasible instance; on feasible
    // tiny ones it finds a coloring well within the budget.
    CHECK(found == (exact.status == SearchStatus::Found));
    if (exact.status == SearchStatus::Found) CHECK(verify_finish(inst, exact.coloring));
  }
}

TEST_CASE("summary JSON") {
  Multigraph g{2, {{0, 1}}};
  const auto inst = make_instance(g, {{1, 2}});
  const auto j = finish_summary_json(inst, finish(inst, 1));
  CHECK(j["edges"] == 1);
  CHECK(j["L"] == 2);
  CHECK(j["N"] == 0);
}
