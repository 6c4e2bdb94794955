#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "dlf/coloring.hpp"

namespace dlf {

/// Proper list 1-edge-coloring problem on the underlying multigraph of the
/// arcs the nibble left uncolored.
struct FinishInstance {
  Multigraph g;
  /// Arc of D behind each edge (empty for free-standing instances).
  std::vector<ArcId> arc_of_edge;
  /// Sorted color list per edge.
  std::vector<std::vector<Color>> lists;
  /// Uniform list size the finisher truncates to (<= every list size).
  std::size_t L = 0;
  /// max over edges e and colors c of #{f incident with e, f != e : c in lists(f)}.
  std::size_t N = 0;
};

/// The incidence bound N by exhaustive scan.
std::size_t incidence_bound(const Multigraph& g, const std::vector<std::vector<Color>>& lists);

/// Instance over the given edges and lists: L = min list size, N by scan.
FinishInstance make_instance(Multigraph g, std::vector<std::vector<Color>> lists);

/// Edges are the gamma-uncolored arcs (a 2-cycle gives two parallel edges),
/// lists come from `res`. Throws InvalidInput when an uncolored arc has an
/// empty reserve list.
FinishInstance build_instance(const Digraph& d, const PartialColoring& gamma,
                              const ListAssignment& res);

struct FinishResult {
  std::vector<Color> colors;
  std::size_t resamples = 0;
  /// L < 8N: the local-lemma condition does not cover this instance.
  bool below_guarantee = false;
};

/// Lists truncated to their inst.L smallest colors.
FinishInstance truncated(const FinishInstance& inst);

/// Uniform initial colors from the truncated lists, then repeatedly resample
/// both edges of the violated pair with the smallest (edge, color). Throws
/// BudgetExhausted after `max_resamples` (0 means 100 |E| L).
FinishResult finish(const FinishInstance& inst, std::uint64_t seed, std::size_t max_resamples = 0);

/// Every edge colored from its list; no two edges sharing an endpoint agree.
bool verify_finish(const FinishInstance& inst, const std::vector<Color>& colors);

/// Random instance: a multigraph with maximum degree `max_deg` on n vertices
/// with up to `edges` edges (multiplicity <= 2), lists drawn as random
/// `list_size`-subsets of {0..palette-1}.
FinishInstance random_finish_instance(std::size_t n, std::size_t edges, std::size_t max_deg,
                                      std::size_t list_size, std::size_t palette,
                                      std::uint64_t seed);

nlohmann::json finish_summary_json(const FinishInstance& inst, const FinishResult& r);

}  // namespace dlf
