#include "dlf/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

extern "C" {
#include <quadmath.h>
}

namespace dlf {

namespace {

using quad = __float128;

double m_log(double x) { return std::log(x); }
long double m_log(long double x) { return std::log(x); }
quad m_log(quad x) { return logq(x); }
double m_log1p(double x) { return std::log1p(x); }
long double m_log1p(long double x) { return std::log1p(x); }
quad m_log1p(quad x) { return log1pq(x); }
double m_exp(double x) { return std::exp(x); }
long double m_exp(long double x) { return std::exp(x); }
quad m_exp(quad x) { return expq(x); }
double m_sqrt(double x) { return std::sqrt(x); }
long double m_sqrt(long double x) { return std::sqrt(x); }
quad m_sqrt(quad x) { return sqrtq(x); }

template <class T>
ParameterTrajectory run_recursion(std::uint64_t delta, LogBase base, Precision precision,
                                  std::size_t max_iterations) {
  const T d = static_cast<T>(delta);
  T lg = m_log(d);
  if (base == LogBase::Base2) lg = lg / m_log(T(2));
  const T lg2 = lg * lg, lg4 = lg2 * lg2, lg7 = lg4 * lg2 * lg;
  const T p = T(1) / T(4);
  const T threshold = T(3) * lg7;

  ParameterTrajectory traj;
  traj.delta = delta;
  traj.log_base = base;
  traj.precision = precision;
  traj.log_delta = static_cast<long double>(lg);
  traj.ell = static_cast<long double>(T(2) * lg);

  T L = d + T(3) * m_sqrt(d) * lg4;
  T N = d;
  T R = T(2) * m_sqrt(d) * lg4;
  for (std::size_t i = 0;; ++i) {
    // log1p(-p/L) needs p/L < 1; a list size below p is as meaningless as a
    // nonpositive one.
    if (!(L > p)) {
      std::ostringstream msg;
      msg << "L_" << i << " = " << static_cast<long double>(L)
          << " is not a positive list size; delta " << delta << " is below the recursion's regime";
      throw TrajectoryAborted(msg.str(), i);
    }
    const T retain = m_exp((N - T(1)) * m_log1p(-p / L));
    const T keep = T(1) - p * (N / L) * retain * retain;
    traj.records.push_back({static_cast<long double>(L), static_cast<long double>(N),
                            static_cast<long double>(R), static_cast<long double>(retain),
                            static_cast<long double>(keep)});
    if (L < threshold) {
      traj.i0 = i;
      return traj;
    }
    if (i >= max_iterations) {
      throw TrajectoryAborted("no i0 within " + std::to_string(max_iterations) + " iterations", i);
    }
    const T shrink = T(1) - p * retain * retain;
    const T nextL = L * keep * keep - m_sqrt(L) * lg2;
    const T nextN = N * keep * shrink + m_sqrt(N) * lg2;
    const T nextR = R * shrink + m_sqrt(R) * lg2;
    L = nextL;
    N = nextN;
    R = nextR;
  }
}

long double rel(long double lhs, long double rhs) {
  return rhs != 0 ? (lhs - rhs) / std::fabs(rhs) : lhs - rhs;
}

}  // namespace

const char* to_string(LogBase b) { return b == LogBase::Natural ? "nat" : "2"; }

const char* to_string(Precision p) {
  switch (p) {
    case Precision::Double: return "double";
    case Precision::Extended: return "extended";
    case Precision::Quad: return "quad";
  }
  return "unknown";
}

std::size_t ParameterTrajectory::ell_int() const {
  const long double c = std::ceil(ell);
  return c < 2 ? 2 : static_cast<std::size_t>(c);
}

long double log_in(long double x, LogBase base) {
  return base == LogBase::Natural ? std::log(x) : std::log2(x);
}

ParameterTrajectory compute_trajectory(std::uint64_t delta, LogBase base, Precision precision,
                                       std::size_t max_iterations) {
  if (delta < 2) throw InvalidInput("params", "delta must be at least 2");
  switch (precision) {
    case Precision::Double: return run_recursion<double>(delta, base, precision, max_iterations);
    case Precision::Extended:
      return run_recursion<long double>(delta, base, precision, max_iterations);
    case Precision::Quad: return run_recursion<quad>(delta, base, precision, max_iterations);
  }
  throw InvalidInput("params", "unknown precision");
}

long double retain_value(long double p, long double L, long double N) {
  return std::exp((N - 1) * std::log1p(-p / L));
}

long double keep_value(long double p, long double L, long double N, long double retain) {
  return 1 - p * (N / L) * retain * retain;
}

bool SizeBoundsReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

SizeBoundsReport check_size_bounds(const ParameterTrajectory& traj) {
  SizeBoundsReport report;
  const long double lg = traj.log_delta;
  const long double lg7 = std::pow(lg, 7.0L);
  const auto& end = traj.records.at(traj.i0);

  {
    BoundCheck c{"L,N,R at i0 > log^7", true, 0, traj.i0, ""};
    const std::pair<const char*, long double> vals[] = {{"L", end.L}, {"N", end.N}, {"R", end.R}};
    c.worst_margin = std::numeric_limits<long double>::infinity();
    for (auto [name, v] : vals) {
      long double m = rel(v, lg7);
      if (m < c.worst_margin) {
        c.worst_margin = m;
        c.detail = std::string("tightest: ") + name;
      }
      if (!(v > lg7)) c.passed = false;
    }
    report.checks.push_back(c);
  }
  {
    const long double cap = 3 * std::pow(lg, 7.5L);
    report.checks.push_back(
        {"R at i0 <= 3 log^7.5", end.R <= cap, rel(cap, end.R), traj.i0, ""});
  }

  auto along = [&](const char* name, auto lhs, auto rhs, bool strict) {
    BoundCheck c{name, true, std::numeric_limits<long double>::infinity(), 0, ""};
    for (std::size_t i = 0; i <= traj.i0 && i < traj.records.size(); ++i) {
      const auto& r = traj.records[i];
      long double a = lhs(r), b = rhs(r);
      long double m = rel(a, b);
      if (m < c.worst_margin) {
        c.worst_margin = m;
        c.worst_index = i;
      }
      if (strict ? !(a > b) : !(a >= b)) c.passed = false;
    }
    report.checks.push_back(c);
  };
  along("R_i/L_i <= log", [&](const TrajectoryRecord&) { return lg; },
        [](const TrajectoryRecord& r) { return r.R / r.L; }, false);
  along("L_i > N_i", [](const TrajectoryRecord& r) { return r.L; },
        [](const TrajectoryRecord& r) { return r.N; }, true);
  along("N_i > L_i/2", [](const TrajectoryRecord& r) { return r.N; },
        [](const TrajectoryRecord& r) { return r.L / 2; }, true);
  return report;
}

nlohmann::json trajectory_to_json(const ParameterTrajectory& traj) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto& r = traj.records[i];
    rows.push_back({{"i", i},
                    {"L", static_cast<double>(r.L)},
                    {"N", static_cast<double>(r.N)},
                    {"R", static_cast<double>(r.R)},
                    {"Retain", static_cast<double>(r.retain)},
                    {"Keep", static_cast<double>(r.keep)}});
  }
  return {{"delta", traj.delta},
          {"p", static_cast<double>(traj.p)},
          {"log_base", to_string(traj.log_base)},
          {"precision", to_string(traj.precision)},
          {"log_delta", static_cast<double>(traj.log_delta)},
          {"ell", static_cast<double>(traj.ell)},
          {"ell_int", traj.ell_int()},
          {"i0", traj.i0},
          {"rows", std::move(rows)}};
}

nlohmann::json size_report_to_json(const SizeBoundsReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json j{{"check", c.name},
                     {"passed", c.passed},
                     {"worst_margin", static_cast<double>(c.worst_margin)},
                     {"worst_index", c.worst_index}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    checks.push_back(std::move(j));
  }
  return {{"all_passed", report.all_passed()}, {"checks", std::move(checks)}};
}

}  // namespace dlf
