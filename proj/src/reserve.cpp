#include "dlf/reserve.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dlf/rng.hpp"

namespace dlf {

namespace {

bool has(const std::vector<Color>& sorted, Color c) {
  return std::binary_search(sorted.begin(), sorted.end(), c);
}

const char* condition_name(ReserveCondition c) {
  switch (c) {
    case ReserveCondition::A: return "a";
    case ReserveCondition::B: return "b";
    case ReserveCondition::C: return "c";
    case ReserveCondition::D: return "d";
  }
  return "?";
}

}  // namespace

double ReserveBounds::A(std::size_t list_size) const {
  return a_frac > 0 ? a_frac * static_cast<double>(list_size) : a_abs;
}

double ReserveBounds::B(std::size_t list_size) const {
  if (b_frac > 0) return std::max(b_min, std::floor(b_frac * static_cast<double>(list_size)));
  return b_abs;
}

ReserveBounds ReserveBounds::vacuous() { return ReserveBounds{}; }

ReserveBounds paper_reserve_bounds(std::size_t delta, LogBase base) {
  const double lg = static_cast<double>(log_in(static_cast<long double>(delta), base));
  const double root = std::sqrt(static_cast<double>(delta));
  ReserveBounds b;
  b.profile = Profile::Paper;
  b.a_abs = 3 * root * std::pow(lg, 4);
  b.b_abs = std::pow(lg, 8) / 2;
  b.c_abs = 2 * root * std::pow(lg, 4);
  return b;
}

ReserveBounds desk_reserve_bounds(std::size_t delta, const DeskReserveKnobs& knobs) {
  ReserveBounds b;
  b.profile = Profile::Desk;
  b.a_frac = knobs.a_frac;
  b.b_frac = knobs.b_frac;
  b.b_min = knobs.b_min;
  b.c_abs = std::ceil(knobs.c_frac * static_cast<double>(delta));
  return b;
}

double paper_reserve_probability(std::size_t delta, LogBase base) {
  const double lg = static_cast<double>(log_in(static_cast<long double>(delta), base));
  return std::pow(lg, 4) / std::sqrt(static_cast<double>(delta));
}

std::vector<Color> vertex_palette(const Digraph& d, const ListAssignment& big, Vertex v) {
  std::vector<Color> out;
  for (Direction dir : {Direction::Out, Direction::In}) {
    for (ArcId a : d.arcs_at(v, dir)) out.insert(out.end(), big.at(a).begin(), big.at(a).end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ReservePlan draw_reserve(const Digraph& d, const ListAssignment& big, double p_res,
                         std::uint64_t seed) {
  if (!(p_res >= 0 && p_res <= 1)) throw InvalidInput("reserve", "p_res must lie in [0,1]");
  ReservePlan plan;
  plan.p_res = p_res;
  plan.seed = seed;
  plan.reserve_of.resize(d.vertex_count());
  Rng rng = SeedStream(seed).child("reserve").engine();
  for (Vertex v = 0; v < d.vertex_count(); ++v) {
    for (Color c : vertex_palette(d, big, v)) {
      if (bernoulli(rng, p_res)) plan.reserve_of[v].push_back(c);
    }
  }
  return plan;
}

ReserveReport verify_reserve(const Digraph& d, const ListAssignment& big,
                             const ReservePlan& plan) {
  ReserveReport report;
  const auto& res = plan.reserve_of;
  const auto& bounds = plan.bounds;

  for (ArcId a = 0; a < d.arc_count(); ++a) {
    const Arc& arc = d.arc(a);
    std::size_t in_union = 0, in_both = 0;
    for (Color c : big.at(a)) {
      bool ru = has(res[arc.tail], c), rv = has(res[arc.head], c);
      in_union += ru || rv;
      in_both += ru && rv;
    }
    const double A = bounds.A(big.size(a)), B = bounds.B(big.size(a));
    if (static_cast<double>(in_union) > A) {
      report.violations.push_back({ReserveCondition::A, a, std::nullopt, std::nullopt,
                                   static_cast<double>(in_union), A});
    }
    if (static_cast<double>(in_both) < B) {
      report.violations.push_back({ReserveCondition::B, a, std::nullopt, std::nullopt,
                                   static_cast<double>(in_both), B});
    }
  }

  for (Vertex u = 0; u < d.vertex_count(); ++u) {
    for (Direction dir : {Direction::Out, Direction::In}) {
      std::map<Color, std::size_t> count;
      for (ArcId a : d.arcs_at(u, dir)) {
        const Vertex w = dir == Direction::Out ? d.arc(a).head : d.arc(a).tail;
        for (Color c : big.at(a)) {
          if (has(res[w], c)) ++count[c];
        }
      }
      for (auto [c, k] : count) {
        if (bounds.strict && !has(res[u], c)) continue;
        if (static_cast<double>(k) > bounds.C()) {
          report.violations.push_back({dir == Direction::Out ? ReserveCondition::C
                                                             : ReserveCondition::D,
                                       std::nullopt, u, c, static_cast<double>(k), bounds.C()});
        }
      }
    }
  }
  return report;
}

ReservePlan retry_until_valid(const Digraph& d, const ListAssignment& big, double p_res,
                              const ReserveBounds& bounds, std::uint64_t seed,
                              std::size_t max_tries) {
  if (max_tries == 0) throw InvalidInput("reserve", "max_tries must be at least 1");
  const SeedStream root = SeedStream(seed).child("reserve-retry");
  for (std::size_t t = 0; t < max_tries; ++t) {
    ReservePlan plan = draw_reserve(d, big, p_res, root.child(t).seed());
    plan.bounds = bounds;
    plan.attempts = t + 1;
    if (verify_reserve(d, big, plan).valid()) return plan;
  }
  throw BudgetExhausted("reserve", "no reserve plan satisfied the bounds within " +
                                       std::to_string(max_tries) + " draws");
}

std::pair<ListAssignment, ListAssignment> split_lists(const Digraph& d, const ListAssignment& big,
                                                      const ReservePlan& plan) {
  ListAssignment l0(d.arc_count()), res(d.arc_count());
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    const auto& ru = plan.reserve_of[d.arc(a).tail];
    const auto& rv = plan.reserve_of[d.arc(a).head];
    std::vector<Color> keep, both;
    for (Color c : big.at(a)) {
      bool in_u = has(ru, c), in_v = has(rv, c);
      if (!in_u && !in_v) keep.push_back(c);
      if (in_u && in_v) both.push_back(c);
    }
    l0.set(a, std::move(keep));
    res.set(a, std::move(both));
  }
  return {std::move(l0), std::move(res)};
}

nlohmann::json reserve_to_json(const ReservePlan& plan) {
  nlohmann::json r = nlohmann::json::object();
  for (std::size_t v = 0; v < plan.reserve_of.size(); ++v) r[std::to_string(v)] = plan.reserve_of[v];
  return {{"reserve", std::move(r)},
          {"p_res", plan.p_res},
          {"seed", plan.seed},
          {"attempts", plan.attempts},
          {"profile", to_string(plan.bounds.profile)}};
}

nlohmann::json reserve_report_to_json(const ReserveReport& report) {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : report.violations) {
    nlohmann::json e{{"condition", condition_name(x.condition)}, {"value", x.value}, {"bound", x.bound}};
    if (x.arc) e["arc"] = *x.arc;
    if (x.vertex) e["vertex"] = *x.vertex;
    if (x.color) e["color"] = *x.color;
    v.push_back(std::move(e));
  }
  return {{"valid", report.valid()}, {"violations", std::move(v)}};
}

}  // namespace dlf
