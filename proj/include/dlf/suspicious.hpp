#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <vector>

#include <json.hpp>

#include "dlf/coloring.hpp"

namespace dlf {

inline constexpr std::size_t kDefaultPathCap = 1'000'000;

/// A simple directed path v_1 ... v_s whose colored arcs all carry `color`
/// and whose uncolored arcs all list it.
struct SuspiciousPath {
  std::vector<Vertex> vertices;
  Color color = 0;
  /// Indices i such that arc (v_i, v_{i+1}) is uncolored.
  std::vector<std::size_t> uncolored_positions;

  std::size_t uncolored_length() const { return uncolored_positions.size(); }
  auto operator<=>(const SuspiciousPath&) const = default;
};

/// Checks the type invariants of `p` against (D, L, gamma).
bool is_suspicious(const Digraph& d, const ListAssignment& lists, const PartialColoring& gamma,
                   const SuspiciousPath& p);

/// P(v,u,c;k): suspicious simple paths from v to u with exactly k uncolored
/// arcs. Sorted. Throws PathOverflow past `cap` paths.
std::vector<SuspiciousPath> enumerate_from_to(const Digraph& d, const ListAssignment& lists,
                                              const PartialColoring& gamma, Vertex v, Vertex u,
                                              Color c, std::size_t k,
                                              std::size_t cap = kDefaultPathCap);

/// P(u,c;len): suspicious simple paths ending at u whose first arc is
/// uncolored, with exactly len uncolored arcs. Sorted; throws PathOverflow.
std::vector<SuspiciousPath> enumerate_tail(const Digraph& d, const ListAssignment& lists,
                                           const PartialColoring& gamma, Vertex u, Color c,
                                           std::size_t len, std::size_t cap = kDefaultPathCap);

/// P(v,u,c) for the arc uv: the union over k = 1..ell_int-1 of P(v,u,c;k)
/// together with P(u,c;ell_int). Sorted and duplicate-free.
std::vector<SuspiciousPath> danger_set(const Digraph& d, const ListAssignment& lists,
                                       const PartialColoring& gamma, ArcId uv, Color c,
                                       std::size_t ell_int, std::size_t cap = kDefaultPathCap);

struct CountBoundReport {
  /// |N±(w,c)| <= N everywhere.
  bool neighbor_bound_ok = true;
  std::size_t max_neighbors = 0;
  /// Colors still listed next to a colored arc of the same color at the same
  /// vertex and side: the list-update discipline was not applied.
  std::size_t discipline_violations = 0;
  /// max over (v,u,c) of |P(v,u,c;k)| and over (u,c) of |P(u,c;k)|, k = 1..k_max.
  std::vector<std::size_t> max_from_to;
  std::vector<std::size_t> max_tail;
  /// (k, observed) pairs exceeding N^{k-1} (from-to) or N^k (tail).
  std::vector<std::pair<std::size_t, std::size_t>> from_to_excess;
  std::vector<std::pair<std::size_t, std::size_t>> tail_excess;

  bool precondition_ok() const { return neighbor_bound_ok && discipline_violations == 0; }
  bool bounds_ok() const { return from_to_excess.empty() && tail_excess.empty(); }
};

/// Counts every P(v,u,c;k) and P(u,c;k) for k <= k_max and compares them with
/// N^{k-1} and N^k. Precondition failures are reported, not thrown.
CountBoundReport count_bound_check(const Digraph& d, const ListAssignment& lists,
                                   const PartialColoring& gamma, std::size_t N,
                                   std::size_t k_max = 3, std::size_t cap = kDefaultPathCap);

nlohmann::json path_to_json(const SuspiciousPath& p);
nlohmann::json count_report_to_json(const CountBoundReport& r);

}  // namespace dlf
