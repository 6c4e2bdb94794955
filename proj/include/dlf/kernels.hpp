#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dlf/coloring.hpp"

namespace dlf {

enum class Exec : std::uint8_t { Serial, Parallel };

/// Colors assigned in the assignment round, indexed by ArcId; only
/// gamma-uncolored arcs carry a value.
using Assignment = std::vector<std::optional<Color>>;

/// Arcs that are c-monochromatic right after the assignment round: arcs
/// colored c by gamma plus uncolored arcs assigned c, indexed by (head, c).
class MonoIndex {
 public:
  MonoIndex(const Digraph& d, const PartialColoring& gamma, const Assignment& assigned);

  /// Does some path of the danger set P(v,u,c) of the arc uv (horizon ell)
  /// consist only of gamma-colored c arcs and arcs assigned c, with at least
  /// one of the latter?
  bool danger_monochromatic(Vertex u, Vertex v, Color c, std::size_t ell) const;

 private:
  struct Entry {
    Vertex tail;
    bool assigned;
  };
  bool search(Vertex x, Vertex v, Color c, std::size_t k, std::size_t ell,
              std::vector<Vertex>& path) const;

  std::unordered_map<OccupancyKey, std::vector<Entry>, OccupancyKeyHash> into_;
};

/// Per-arc outcome of the cycle-prevention check. For a gamma-uncolored arc
/// e = xy:
///   x[e]      colors c in L(e) whose danger set went monochromatic;
///   z_head[e] colors c in Reserve(y) (contribute e to Z+(x,c));
///   z_tail[e] colors c in Reserve(x) (contribute e to Z-(y,c)).
struct ThreatSets {
  std::vector<std::vector<Color>> x;
  std::vector<std::vector<Color>> z_head;
  std::vector<std::vector<Color>> z_tail;
};

/// Restricted search over the monochromatic arcs. Exec::Parallel splits the
/// arcs over OpenMP threads against the same frozen inputs; the result does
/// not depend on the policy.
ThreatSets detect_threats(const Digraph& d, const ListAssignment& lists,
                          const PartialColoring& gamma, const Assignment& assigned,
                          const ReserveMap* reserve, std::size_t ell, Exec exec);

/// Reference: enumerates every danger set with the suspicious-path module
/// and keeps the colors for which some member path is fully assigned.
ThreatSets detect_threats_reference(const Digraph& d, const ListAssignment& lists,
                                    const PartialColoring& gamma, const Assignment& assigned,
                                    const ReserveMap* reserve, std::size_t ell);

int kernel_threads();

}  // namespace dlf
