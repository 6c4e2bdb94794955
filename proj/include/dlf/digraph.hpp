#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dlf/types.hpp"

namespace dlf {

struct Arc {
  Vertex tail;
  Vertex head;
  auto operator<=>(const Arc&) const = default;
};

/// Loopless digraph without parallel arcs; 2-cycles are allowed.
///
/// Vertices are 0..n-1. Arcs are stored sorted by (tail, head), so an ArcId
/// is stable for a given arc set regardless of input order. Immutable after
/// construction.
class Digraph {
 public:
  Digraph() = default;

  /// Throws InvalidInput on loops, duplicates, or out-of-range endpoints.
  Digraph(std::size_t n, std::vector<Arc> arcs);

  std::size_t vertex_count() const { return n_; }
  std::size_t arc_count() const { return arcs_.size(); }

  const Arc& arc(ArcId a) const { return arcs_[a]; }
  std::span<const Arc> arcs() const { return arcs_; }

  std::span<const ArcId> out_arcs(Vertex v) const {
    return {out_ids_.data() + out_off_[v], out_ids_.data() + out_off_[v + 1]};
  }
  std::span<const ArcId> in_arcs(Vertex v) const {
    return {in_ids_.data() + in_off_[v], in_ids_.data() + in_off_[v + 1]};
  }
  std::span<const ArcId> arcs_at(Vertex v, Direction d) const {
    return d == Direction::Out ? out_arcs(v) : in_arcs(v);
  }

  std::size_t out_degree(Vertex v) const { return out_off_[v + 1] - out_off_[v]; }
  std::size_t in_degree(Vertex v) const { return in_off_[v + 1] - in_off_[v]; }

  std::optional<ArcId> find_arc(Vertex tail, Vertex head) const;

  bool operator==(const Digraph& other) const {
    return n_ == other.n_ && arcs_ == other.arcs_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_off_{0};
  std::vector<ArcId> out_ids_;
  std::vector<std::size_t> in_off_{0};
  std::vector<ArcId> in_ids_;
};

/// Loopless multigraph; parallel edges allowed. Edges are unordered pairs
/// stored with the smaller endpoint first.
struct Multigraph {
  std::size_t n = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;

  std::vector<std::size_t> degrees() const;

  /// Multiset equality of the edge lists.
  bool same_edges(const Multigraph& other) const;
};

std::size_t max_degree(const Digraph& d);

/// Underlying multigraph: every arc becomes an unordered edge; a 2-cycle
/// becomes a pair of parallel edges.
Multigraph underlying_multigraph(const Digraph& d);

Digraph symmetric_complete(std::size_t n);
Digraph directed_path(std::size_t n);
Digraph directed_cycle(std::size_t n);

/// d-regular digraph (every d+ = d- = d) on n vertices.
///
/// Built layer by layer: each layer is a uniformly random permutation of the
/// vertices matching out-slots to in-slots, redrawn when it would create a
/// loop or a parallel arc. A dead end restarts from the empty digraph. Every
/// layer draw counts against `max_attempts`.
Digraph random_regular_digraph(std::size_t n, std::size_t d, std::uint64_t seed,
                               std::size_t max_attempts = 1000);

/// Random digraph on n vertices with every in/out-degree at most `max_deg`,
/// obtained by proposing `proposals` random arcs and keeping the feasible ones.
Digraph random_bounded_digraph(std::size_t n, std::size_t max_deg, std::size_t proposals,
                               std::uint64_t seed);

/// Random 2k-regular multigraph with edge multiplicity at most 2, built as
/// the union of k random Hamiltonian cycles (n >= 3). A cycle hitting a pair
/// that already has two edges is repaired by 2-opt moves before it is redrawn.
Multigraph random_even_regular_multigraph(std::size_t n, std::size_t k, std::uint64_t seed,
                                          std::size_t max_attempts = 1000);

/// Orientation with d+(v) = d-(v) = deg(v)/2 for all v.
///
/// Doubled edges are forced into 2-cycles; the remaining simple part is
/// oriented along an Euler tour of each component. Throws InvalidInput when a
/// vertex has odd degree or an edge has multiplicity above two (any
/// orientation would then repeat an arc).
Digraph eulerian_orientation(const Multigraph& g);

enum class GraphFormat { EdgeList, Json };

Digraph parse_digraph(std::string_view text, GraphFormat format);
std::string serialize_digraph(const Digraph& d, GraphFormat format);

}  // namespace dlf
