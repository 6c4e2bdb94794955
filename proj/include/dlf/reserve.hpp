#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dlf/coloring.hpp"
#include "dlf/params.hpp"

namespace dlf {

/// Thresholds for the four reserve conditions. For an arc e = uv with big
/// list 𝓛(e):
///   (a) |𝓛(e) ∩ (Res(u) ∪ Res(v))| <= A(|𝓛(e)|)
///   (b) |𝓛(e) ∩ Res(u) ∩ Res(v)|   >= B(|𝓛(e)|)
///   (c) |{w in N+(u) : c in Res(w) ∩ 𝓛(uw)}| <= C, and (d) the in-side twin.
/// Absolute values apply when the matching fraction is zero.
struct ReserveBounds {
  Profile profile = Profile::Desk;
  double a_abs = std::numeric_limits<double>::infinity();
  double a_frac = 0;
  double b_abs = 0;
  double b_frac = 0;
  double b_min = 0;
  double c_abs = std::numeric_limits<double>::infinity();
  /// (c)/(d) only for c in Reserve(u) (resp. Reserve(v)); otherwise every
  /// color of 𝓛(u) is checked.
  bool strict = true;

  double A(std::size_t list_size) const;
  double B(std::size_t list_size) const;
  double C() const { return c_abs; }

  static ReserveBounds vacuous();
};

struct DeskReserveKnobs {
  double p_res = 0.3;
  double a_frac = 0.9;
  double b_frac = 0.01;
  double b_min = 1;
  double c_frac = 0.9;
};

/// A = 3√Δ log⁴Δ, B = log⁸Δ / 2, C = 2√Δ log⁴Δ.
ReserveBounds paper_reserve_bounds(std::size_t delta, LogBase base);
ReserveBounds desk_reserve_bounds(std::size_t delta, const DeskReserveKnobs& knobs = {});
/// log⁴Δ / √Δ; exceeds 1 for every desk-scale Δ.
double paper_reserve_probability(std::size_t delta, LogBase base);

struct ReservePlan {
  /// Sorted color set per vertex.
  ReserveMap reserve_of;
  ReserveBounds bounds;
  double p_res = 0;
  /// Seed of the draw that produced this plan.
  std::uint64_t seed = 0;
  std::size_t attempts = 1;
};

/// Colors of 𝓛(v): the union of the big lists of arcs at v.
std::vector<Color> vertex_palette(const Digraph& d, const ListAssignment& big, Vertex v);

/// Includes each (v, c in 𝓛(v)) independently with probability p_res.
/// Throws InvalidInput unless 0 <= p_res <= 1.
ReservePlan draw_reserve(const Digraph& d, const ListAssignment& big, double p_res,
                         std::uint64_t seed);

enum class ReserveCondition : std::uint8_t { A, B, C, D };

struct ReserveViolation {
  ReserveCondition condition;
  std::optional<ArcId> arc;
  std::optional<Vertex> vertex;
  std::optional<Color> color;
  double value = 0;
  double bound = 0;
};

struct ReserveReport {
  std::vector<ReserveViolation> violations;
  bool valid() const { return violations.empty(); }
};

ReserveReport verify_reserve(const Digraph& d, const ListAssignment& big,
                             const ReservePlan& plan);

/// Draws with seeds derived from `seed` until verify_reserve passes; the
/// accepted plan records its own seed. Throws BudgetExhausted.
ReservePlan retry_until_valid(const Digraph& d, const ListAssignment& big, double p_res,
                              const ReserveBounds& bounds, std::uint64_t seed,
                              std::size_t max_tries);

/// L0(e) = 𝓛(e) \ (Res(u) ∪ Res(v)) and Res(e) = 𝓛(e) ∩ Res(u) ∩ Res(v).
std::pair<ListAssignment, ListAssignment> split_lists(const Digraph& d, const ListAssignment& big,
                                                      const ReservePlan& plan);

nlohmann::json reserve_to_json(const ReservePlan& plan);
nlohmann::json reserve_report_to_json(const ReserveReport& report);

}  // namespace dlf
