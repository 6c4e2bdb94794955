#include <doctest.h>

#include <cmath>

#include "dlf/nibble.hpp"
#include "support.hpp"

using namespace dlf;

namespace {

NibbleConfig serial_desk() {
  NibbleConfig cfg;
  cfg.exec = Exec::Serial;
  return cfg;
}

}  // namespace

TEST_CASE("retention probability") {
  const Digraph iso(2, {{0, 1}});
  NibbleState s1(iso, ListAssignment::uniform(1, 4));
  const IterationParams ip1 = iteration_params(s1, serial_desk());
  CHECK(retention_probability(s1, ip1, 0.25, 0, 2) == 1.0);

  // Two out-arcs of 0 both listing color 0, lists of size 4.
  const Digraph fork(3, {{0, 1}, {0, 2}});
  NibbleState s2(fork, ListAssignment::uniform(2, 4));
  const IterationParams ip2 = iteration_params(s2, serial_desk());
  CHECK(ip2.L == 4);
  CHECK(ip2.N == 2);
  CHECK(retention_probability(s2, ip2, 0.25, 0, 0) == doctest::Approx(15.0 / 16).epsilon(1e-15));

  // A colored neighbor does not count.
  s2.gamma.assign(1, 3);
  s2.lists.clear(1);
  CHECK(retention_probability(s2, ip2, 0.25, 0, 0) == 1.0);
}

TEST_CASE("equalizing and vertex coins") {
  IterationParams ip;
  ip.L = 8;
  ip.N = 4;
  ip.retain = std::pow(1 - 0.25L / 8, 3);
  ip.keep = 1 - 0.25L * (4.0L / 8) * ip.retain * ip.retain;
  const double r2 = static_cast<double>(ip.retain * ip.retain);
  CHECK(eq_coin(ip, r2, Profile::Desk).value == doctest::Approx(0).epsilon(1e-15));
  CHECK(vq_coin(ip, 0.25, 4, Profile::Desk).value == doctest::Approx(0).epsilon(1e-15));
  CHECK(vq_coin(ip, 0.25, 0, Profile::Desk).value ==
        doctest::Approx(1 - static_cast<double>(ip.keep)).epsilon(1e-15));
  double prev = -1;
  for (std::size_t k = 4; k > 0; --k) {
    const double v = vq_coin(ip, 0.25, k - 1, Profile::Desk).value;
    CHECK(v >= prev);
    prev = v;
  }

  IterationParams q;
  q.retain = std::sqrt(0.9L);
  CHECK(eq_coin(q, 1.0, Profile::Desk).value == doctest::Approx(0.1).epsilon(1e-12));

  // P below Retain^2 makes the raw coin negative.
  const Coin clamped = eq_coin(q, 0.5, Profile::Desk);
  CHECK(clamped.value == 0);
  CHECK(clamped.clamped);
  CHECK_THROWS_AS(eq_coin(q, 0.5, Profile::Paper), ProbabilityRange);
  CHECK_FALSE(eq_coin(q, 0.9 - 1e-14, Profile::Paper).clamped);
}

TEST_CASE("iterate edge cases") {
  const Digraph d = symmetric_complete(4);
  NibbleState full(d, ListAssignment(d.arc_count()));
  for (ArcId a = 0; a < d.arc_count(); ++a) full.gamma.assign(a, static_cast<Color>(a));
  const auto [same, st] = iterate(full, serial_desk(), SeedStream(1));
  CHECK(st.uncolored_before == 0);
  CHECK(same.gamma == full.gamma);
  CHECK(same.iter == 1);

  // p = 0: no activations, Retain = Keep = 1, so both coins are zero.
  NibbleConfig zero = serial_desk();
  zero.p = 0;
  NibbleState s(d, ListAssignment::uniform(d.arc_count(), 5));
  const auto [next, st0] = iterate(s, zero, SeedStream(2));
  CHECK(st0.activations == 0);
  CHECK(next.lists == s.lists);
  CHECK(next.gamma.colored_count() == 0);
}

TEST_CASE("one iteration keeps the invariants and its stats add up") {
  const Digraph d = random_regular_digraph(40, 16, 3);
  NibbleState s(d, ListAssignment::uniform(d.arc_count(), 64));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto [next, st] = iterate(s, serial_desk(), SeedStream(seed));
    const auto rep = check_step_invariants(s, next);
    CHECK(rep.ok());
    CHECK(st.consistent());
    CHECK(st.uncolored_after == st.uncolored_before - st.retained);
    CHECK(next.gamma.colored_count() == st.retained);
    const auto [par, st2] = iterate(s, NibbleConfig{}, SeedStream(seed));
    CHECK(par.gamma == next.gamma);
    CHECK(par.lists == next.lists);
  }
}

TEST_CASE("check_step_invariants flags a broken extension") {
  const Digraph d(2, {{0, 1}});
  NibbleState before(d, ListAssignment::uniform(1, 2));
  NibbleState after = before;
  after.gamma.assign(0, 7);
  after.lists.clear(0);
  CHECK(check_step_invariants(before, after).extension_violations == 1);
  after.gamma = PartialColoring(d);
  after.lists.set(0, {0, 1, 9});
  CHECK(check_step_invariants(before, after).extension_violations == 1);
}

TEST_CASE("run") {
  SUBCASE("no arcs") {
    const Digraph d(5, {});
    const auto r = run(d, ListAssignment(0), nullptr, 1, serial_desk(), StopRule{});
    CHECK(r.stats.empty());
    CHECK(r.stop_reason == "uncolored fraction");
  }
  SUBCASE("fraction:1 stops before the first round") {
    const Digraph d = symmetric_complete(5);
    const auto r = run(d, ListAssignment::uniform(d.arc_count(), 8), nullptr, 1, serial_desk(),
                       StopRule::parse("fraction:1"));
    CHECK(r.stats.empty());
    CHECK(r.gamma.colored_count() == 0);
  }
  SUBCASE("a full desk run on an Eulerian digraph") {
    const Digraph d = eulerian_orientation(random_even_regular_multigraph(60, 32, 5));
    std::size_t observed = 0;
    const auto obs = [&](const NibbleState& b, const NibbleState& a, const IterationStats& st) {
      CHECK(check_step_invariants(b, a).ok());
      CHECK(st.consistent());
      ++observed;
    };
    const auto r = run(d, ListAssignment::uniform(d.arc_count(), 128), nullptr, 4, NibbleConfig{},
                       StopRule::parse("fraction:0.05"), nullptr, obs);
    CHECK(observed == r.stats.size());
    CHECK(validate_coloring(d, r.gamma, 1, 1, true).valid());
    CHECK(r.gamma.colored_count() >= d.arc_count() * 95 / 100);
    const auto again = run(d, ListAssignment::uniform(d.arc_count(), 128), nullptr, 4,
                           serial_desk(), StopRule::parse("fraction:0.05"));
    CHECK(again.gamma == r.gamma);
    CHECK(again.lists == r.lists);
  }
  SUBCASE("paper profile rejects lists shorter than L0") {
    const Digraph d = symmetric_complete(4);
    const auto traj = compute_trajectory(1u << 20);
    NibbleConfig cfg = serial_desk();
    cfg.profile = Profile::Paper;
    CHECK_THROWS_AS(run(d, ListAssignment::uniform(d.arc_count(), 10), &traj, 1, cfg,
                        StopRule::parse("i0")),
                    ClaimViolation);
    CHECK_THROWS_AS(run(d, ListAssignment::uniform(d.arc_count(), 10), nullptr, 1, cfg, StopRule{}),
                    InvalidInput);
  }
  SUBCASE("mismatched lists") {
    const Digraph d = symmetric_complete(3);
    CHECK_THROWS_AS(run(d, ListAssignment(2), nullptr, 1, serial_desk(), StopRule{}), InvalidInput);
  }
}

TEST_CASE("stop rules") {
  CHECK(StopRule::parse("i0").kind == StopRule::Kind::ReachI0);
  const auto f = StopRule::parse("fraction:0.25");
  CHECK(f.kind == StopRule::Kind::UncoloredFraction);
  CHECK(f.theta == 0.25);
  const auto l = StopRule::parse("list:5,max:7");
  CHECK(l.kind == StopRule::Kind::ListSize);
  CHECK(l.sigma == 5);
  CHECK(l.max_iterations == 7);
  for (const char* bad : {"", "fraction", "list:x", "fraction:0.1,max:", "nope"}) {
    CHECK_THROWS_AS(StopRule::parse(bad), InvalidInput);
  }
}

TEST_CASE("Monte Carlo estimators") {
  // Arc 0->1 with rivals 0->2 and 3->1, each listing color 0.
  const Digraph d(4, {{0, 1}, {0, 2}, {3, 1}});
  NibbleState s(d, ListAssignment(std::vector<std::vector<Color>>{{0, 1}, {0, 1, 2, 3}, {0, 5}}));
  const NibbleConfig cfg = serial_desk();
  const IterationParams ip = iteration_params(s, cfg);
  const ArcId e = *d.find_arc(0, 1);

  // Independent prediction: no rival activates with color 0, then the
  // equalizing coin lands on keep.
  const double P = std::exp(2 * std::log1p(-0.25 / static_cast<double>(ip.L)));
  const double keep_eq = std::min(1.0, static_cast<double>(ip.retain * ip.retain) / P);
  const double predicted = (1 - 0.25 / 4) * (1 - 0.25 / 2) * keep_eq;

  const std::size_t trials = 100000;
  const auto est = estimate_retention(s, ip, cfg, e, 0, trials, 9, Exec::Parallel);
  CHECK(est.predicted == doctest::Approx(predicted).epsilon(1e-12));
  CHECK(std::fabs(est.frequency() - predicted) <= 3 * test::binomial_sigma(predicted, trials));
  CHECK(estimate_retention(s, ip, cfg, e, 0, 5000, 9, Exec::Serial).retained ==
        estimate_retention(s, ip, cfg, e, 0, 5000, 9, Exec::Parallel).retained);
  CHECK(estimate_retention(s, ip, cfg, e, 0, 0, 9, Exec::Serial).frequency() == 0);
  CHECK_THROWS_AS(estimate_retention(s, ip, cfg, e, 9, 10, 9, Exec::Serial), InvalidInput);

  const auto ls = estimate_list_size(s, ip, cfg, e, 20000, 3, Exec::Parallel);
  CHECK(ls.mean() <= 2.0);
  CHECK(ls.mean() > 0);
  CHECK(ls.stddev_of_mean() > 0);
  const auto ls2 = estimate_list_size(s, ip, cfg, e, 20000, 3, Exec::Serial);
  CHECK(ls.sum == ls2.sum);

  const auto stats = retention_statistics(s, ip, cfg, {e}, 20000, 5, Exec::Parallel);
  REQUIRE(stats.size() == 1);
  CHECK(std::fabs(static_cast<double>(stats[0].retained) - stats[0].expected_retained) <=
        4 * std::sqrt(stats[0].variance) + 1);

  // Planted path 0->1->2 of uncolored arcs listing color 0: (p/2)(p/2).
  const Digraph p3(3, {{0, 1}, {1, 2}});
  NibbleState sp(p3, ListAssignment(std::vector<std::vector<Color>>{{0, 1}, {0, 1}}));
  SuspiciousPath path{{0, 1, 2}, 0, {0, 1}};
  const double q = (0.25 / 2) * (0.25 / 2);
  const auto hits = count_path_monochromatic(sp, cfg, path, trials, 13, Exec::Parallel);
  CHECK(std::fabs(static_cast<double>(hits) / trials - q) <= 3 * test::binomial_sigma(q, trials));
  CHECK(count_path_monochromatic(sp, cfg, path, 0, 13, Exec::Serial) == 0);
}

TEST_CASE("expected list size after one round on a desk state") {
  const Digraph d = random_regular_digraph(40, 16, 3);
  NibbleState s(d, ListAssignment::uniform(d.arc_count(), 64));
  const NibbleConfig cfg = serial_desk();
  const IterationParams ip = iteration_params(s, cfg);
  for (ArcId e : {0u, 100u, 400u}) {
    const auto est = estimate_list_size(s, ip, cfg, e, 10000, 17 + e, Exec::Parallel);
    CHECK(est.lower_bound == doctest::Approx(static_cast<double>(ip.L * ip.keep * ip.keep)));
    CHECK(est.mean() >= est.lower_bound - 3 * est.stddev_of_mean());
  }
}
