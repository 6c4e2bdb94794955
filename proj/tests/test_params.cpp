#include <doctest.h>

#include <cmath>

#include "dlf/params.hpp"

using namespace dlf;

namespace {

// Reference values from a 50-digit evaluation of the recursion (mpmath).
constexpr long double kL0_2p20 = 114508643.6555571782717429L;
constexpr long double kR0_2p20 = 75640045.10370478551449525L;
constexpr long double kRetain0_2p20 = 0.9977133261826812902022784L;
constexpr long double kKeep0_2p20 = 0.9977211633397617972719188L;

constexpr long double kL1_2p30 = 18875208537.639798206L;
constexpr long double kN1_2p30 = 815874656.14274489675L;
constexpr long double kR1_2p30 = 9321515487.5070897101L;
constexpr long double kLi0_2p30 = 5031389395.2910891453L;
constexpr long double kNi0_2p30 = 2990776.6397534603085L;
constexpr long double kRi0_2p30 = 2993316.6374967538252L;

bool rel_close(long double a, long double b, long double tol) {
  return std::fabs(a - b) <= tol * std::fabs(b);
}

const BoundCheck& find(const SizeBoundsReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no check " + name);
}

}  // namespace

TEST_CASE("base case at delta = 2^20") {
  const auto t = compute_trajectory(1u << 20);
  REQUIRE(!t.records.empty());
  CHECK(rel_close(t.records[0].L, kL0_2p20, 1e-15L));
  CHECK(t.records[0].N == 1048576.0L);
  CHECK(rel_close(t.records[0].R, kR0_2p20, 1e-15L));
  CHECK(rel_close(t.records[0].retain, kRetain0_2p20, 1e-15L));
  CHECK(rel_close(t.records[0].keep, kKeep0_2p20, 1e-15L));
  // L0 already sits below 3 log^7 delta.
  CHECK(t.i0 == 0);
}

TEST_CASE("base-2 logarithm base case is exact") {
  const auto t = compute_trajectory(1u << 20, LogBase::Base2);
  CHECK(t.log_delta == 20.0L);
  CHECK(t.records[0].L == 1048576.0L + 3.0L * 1024.0L * 160000.0L);
  CHECK(t.records[0].R == 2.0L * 1024.0L * 160000.0L);
}

TEST_CASE("trajectory at delta = 2^30 matches the high-precision reference") {
  const auto t = compute_trajectory(1u << 30);
  REQUIRE(t.i0 == 268);
  REQUIRE(t.records.size() == 269);
  CHECK(rel_close(t.records[1].L, kL1_2p30, 1e-14L));
  CHECK(rel_close(t.records[1].N, kN1_2p30, 1e-14L));
  CHECK(rel_close(t.records[1].R, kR1_2p30, 1e-14L));
  CHECK(rel_close(t.records[268].L, kLi0_2p30, 1e-12L));
  CHECK(rel_close(t.records[268].N, kNi0_2p30, 1e-12L));
  CHECK(rel_close(t.records[268].R, kRi0_2p30, 1e-12L));
  CHECK(t.records[267].L >= 3 * std::pow(t.log_delta, 7.0L));
  CHECK(t.records[268].L < 3 * std::pow(t.log_delta, 7.0L));

  for (Precision p : {Precision::Double, Precision::Quad}) {
    const auto u = compute_trajectory(1u << 30, LogBase::Natural, p);
    REQUIRE(u.i0 == t.i0);
    for (std::size_t i = 0; i <= t.i0; ++i) {
      CHECK(rel_close(u.records[i].L, t.records[i].L, 1e-6L));
      CHECK(rel_close(u.records[i].N, t.records[i].N, 1e-6L));
      CHECK(rel_close(u.records[i].R, t.records[i].R, 1e-6L));
    }
  }
}

TEST_CASE("recurrence identities hold on every record") {
  for (std::uint64_t delta : {1000ull, 1ull << 24, 1ull << 30}) {
    const auto t = compute_trajectory(delta);
    const long double lg = t.log_delta, p = t.p;
    for (std::size_t i = 0; i <= t.i0; ++i) {
      const auto& r = t.records[i];
      // pow on 1 - p/L loses about N ulps of the base; 1e-8 covers it.
      const long double ret = std::pow(1 - p / r.L, r.N - 1);
      CHECK(rel_close(r.retain, ret, 1e-8L));
      CHECK(rel_close(r.keep, 1 - p * (r.N / r.L) * r.retain * r.retain, 1e-15L));
      CHECK(r.retain > 0);
      CHECK(r.retain < 1);
      if (i == t.i0) break;
      const auto& n = t.records[i + 1];
      CHECK(rel_close(n.L, r.L * r.keep * r.keep - std::sqrt(r.L) * lg * lg, 1e-15L));
      CHECK(rel_close(n.N, r.N * r.keep * (1 - p * r.retain * r.retain) + std::sqrt(r.N) * lg * lg,
                      1e-15L));
      CHECK(rel_close(n.R, r.R * (1 - p * r.retain * r.retain) + std::sqrt(r.R) * lg * lg, 1e-15L));
    }
  }
}

TEST_CASE("ell") {
  const auto t = compute_trajectory(1u << 20, LogBase::Base2);
  CHECK(t.ell == 40.0L);
  CHECK(t.ell_int() == 40);
  ParameterTrajectory small;
  small.ell = 1.3L;
  CHECK(small.ell_int() == 2);
  // Delta = 2 leaves the regime: L turns negative within two steps.
  CHECK_THROWS_AS(compute_trajectory(2), TrajectoryAborted);
}

TEST_CASE("size bound report") {
  SUBCASE("delta = 2^30: the recursion does not reach the claimed sizes") {
    const auto r = check_size_bounds(compute_trajectory(1u << 30));
    CHECK_FALSE(find(r, "L,N,R at i0 > log^7").passed);
    CHECK_FALSE(find(r, "N_i > L_i/2").passed);
    CHECK(find(r, "R at i0 <= 3 log^7.5").passed);
    CHECK(find(r, "R_i/L_i <= log").passed);
    CHECK(find(r, "L_i > N_i").passed);
    CHECK_FALSE(r.all_passed());
  }
  SUBCASE("forced violation of L_i > N_i") {
    auto t = compute_trajectory(1u << 20);
    t.records[0].N = t.records[0].L;
    const auto report = check_size_bounds(t);
    const auto& c = find(report, "L_i > N_i");
    CHECK_FALSE(c.passed);
    CHECK(c.worst_margin <= 0);
  }
}

TEST_CASE("input validation and aborts") {
  CHECK_THROWS_AS(compute_trajectory(1), InvalidInput);
  CHECK_THROWS_AS(compute_trajectory(1u << 30, LogBase::Natural, Precision::Extended, 3),
                  TrajectoryAborted);
}

TEST_CASE("JSON rows") {
  const auto t = compute_trajectory(1u << 20);
  const auto j = trajectory_to_json(t);
  REQUIRE(j["rows"].size() == t.records.size());
  CHECK(j["rows"][0]["i"] == 0);
  CHECK(j["rows"][0].contains("Retain"));
  CHECK(size_report_to_json(check_size_bounds(t))["checks"].size() == 5);
}
