#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dlf/coloring.hpp"
#include "dlf/finisher.hpp"

namespace dlf {

struct SearchBudget {
  std::uint64_t node_limit = 50'000'000;
  std::chrono::milliseconds time_limit{60'000};
};

/// max(Δ, ceil(d n/(n-1))) when D is d-regular with d >= 1, otherwise Δ.
std::size_t la_lower_bound(const Digraph& d);

/// First-fit decomposition; an upper bound on la(D).
std::vector<Color> greedy_decomposition(const Digraph& d);

struct LaResult {
  /// Exact value when the search completed.
  std::optional<std::size_t> value;
  std::size_t lower = 0, upper = 0;
  /// Decomposition using `upper` classes.
  std::vector<Color> witness;
  std::uint64_t nodes = 0;
};

/// Iterative deepening from la_lower_bound with first-use class symmetry
/// breaking and per-class path-endpoint bookkeeping. On budget exhaustion
/// returns the proven interval [lower, upper] without a value.
LaResult exact_la(const Digraph& d, const SearchBudget& budget = {});

enum class SearchStatus : std::uint8_t { Found, Absent, Indeterminate };
const char* to_string(SearchStatus s);

struct ListColoringResult {
  SearchStatus status = SearchStatus::Indeterminate;
  std::vector<Color> coloring;
  std::uint64_t nodes = 0;
};

/// A linear L-coloring (every color class a directed linear forest).
ListColoringResult exists_linear_list_coloring(const Digraph& d, const ListAssignment& lists,
                                               const SearchBudget& budget = {});

/// True iff every color class is a directed linear forest. `coloring` must
/// be total (InvalidInput otherwise).
bool verify_decomposition(const Digraph& d, const PartialColoring& coloring);
bool verify_decomposition(const Digraph& d, const std::vector<Color>& coloring);

/// Proper list 1-edge-coloring of a multigraph by backtracking (finisher
/// ground truth on tiny instances).
ListColoringResult exists_list_edge_coloring(const FinishInstance& inst,
                                             const SearchBudget& budget = {});

nlohmann::json la_result_to_json(const Digraph& d, const LaResult& r);

}  // namespace dlf
