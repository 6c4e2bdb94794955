#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "dlf/digraph.hpp"

namespace dlf {

/// Per-arc color lists, indexed by ArcId. Each list is kept sorted and
/// duplicate-free.
class ListAssignment {
 public:
  ListAssignment() = default;
  explicit ListAssignment(std::size_t arc_count) : lists_(arc_count) {}
  explicit ListAssignment(std::vector<std::vector<Color>> lists);

  /// Every arc gets {0, ..., size-1}.
  static ListAssignment uniform(std::size_t arc_count, std::size_t size);

  std::size_t arc_count() const { return lists_.size(); }
  std::span<const Color> at(ArcId a) const { return lists_[a]; }
  std::size_t size(ArcId a) const { return lists_[a].size(); }
  bool contains(ArcId a, Color c) const;

  void set(ArcId a, std::vector<Color> colors);
  /// Returns true when c was present.
  bool remove(ArcId a, Color c);
  void clear(ArcId a) { lists_[a].clear(); }
  /// Keeps the `keep` smallest tokens.
  void truncate_smallest(ArcId a, std::size_t keep);

  bool operator==(const ListAssignment&) const = default;

 private:
  std::vector<std::vector<Color>> lists_;
};

struct OccupancyKey {
  Vertex vertex;
  Color color;
  Direction dir;
  bool operator==(const OccupancyKey&) const = default;
};

struct OccupancyKeyHash {
  std::size_t operator()(const OccupancyKey& k) const noexcept {
    std::uint64_t h = (std::uint64_t{k.vertex} << 33) ^ (std::uint64_t{k.color} << 1) ^
                      static_cast<std::uint64_t>(k.dir);
    h ^= h >> 31;
    h *= 0x9e3779b97f4a7c15ULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

using Occupancy = std::unordered_map<OccupancyKey, std::size_t, OccupancyKeyHash>;

/// Partial arc coloring with a maintained (vertex, color, direction)
/// occupancy index. Direction::Out counts colored arcs leaving the vertex.
class PartialColoring {
 public:
  PartialColoring() = default;
  explicit PartialColoring(const Digraph& d) : arcs_(d.arcs().begin(), d.arcs().end()),
                                              color_of_(d.arc_count()) {}

  std::size_t arc_count() const { return color_of_.size(); }
  std::optional<Color> color(ArcId a) const { return color_of_[a]; }
  bool is_colored(ArcId a) const { return color_of_[a].has_value(); }
  std::size_t colored_count() const { return colored_; }

  void assign(ArcId a, Color c);
  void unassign(ArcId a);

  std::size_t occupancy(Vertex v, Color c, Direction dir) const;
  const Occupancy& occupancy_index() const { return occupancy_; }

  /// Occupancy rebuilt from scratch; equal to occupancy_index() at all times.
  Occupancy recount() const;

  bool operator==(const PartialColoring& o) const { return color_of_ == o.color_of_; }

 private:
  std::vector<Arc> arcs_;
  std::vector<std::optional<Color>> color_of_;
  Occupancy occupancy_;
  std::size_t colored_ = 0;
};

enum class ViolationKind {
  DegreeIn,
  DegreeOut,
  MonochromaticDicycle,
  OffList,
  // compatibility of lists with a partial coloring
  BlockedColorListed,
  ReturnPathColorListed,
};

const char* to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::optional<Vertex> vertex;
  std::optional<Color> color;
  std::optional<ArcId> arc;
  /// Witness cycle or path as a vertex sequence (cycles repeat no vertex).
  std::vector<Vertex> walk;
};

struct ColoringReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  std::size_t count(ViolationKind k) const;
};

/// In (V, S) every vertex has in/out-degree <= 1 and there is no directed
/// cycle. Throws InvalidInput if some arc of S is not an arc of D.
bool is_directed_linear_forest(const Digraph& d, std::span<const Arc> arcs);

/// Reports every (vertex, color) exceeding the in-bound s or out-bound t,
/// one witness cycle per nontrivial strongly connected component of each
/// color class (when `acyclic`), and every off-list colored arc (when lists
/// are given). For s = t = 1 the cycles of a class are disjoint, so every
/// monochromatic cycle is reported.
ColoringReport validate_coloring(const Digraph& d, const PartialColoring& gamma, std::size_t s,
                                 std::size_t t, bool acyclic,
                                 const ListAssignment* lists = nullptr);

/// Directed path from `from` to `to` whose arcs are all colored c.
bool has_monochromatic_dipath(const Digraph& d, const PartialColoring& gamma, Vertex from,
                              Vertex to, Color c);
std::optional<std::vector<Vertex>> monochromatic_dipath(const Digraph& d,
                                                        const PartialColoring& gamma,
                                                        Vertex from, Vertex to, Color c);

/// N^-(v,c) for In (uncolored arcs into v listing c), N^+(v,c) for Out.
std::vector<ArcId> color_neighbors(const Digraph& d, const ListAssignment& lists,
                                   const PartialColoring& gamma, Vertex v, Color c, Direction dir);

/// Per-vertex reserve color sets, each sorted.
using ReserveMap = std::vector<std::vector<Color>>;

/// R^+(v,c) for Out: uncolored arcs v->u with c in Reserve(u).
/// R^-(v,c) for In: uncolored arcs u->v with c in Reserve(u).
std::vector<ArcId> reserve_neighbors(const Digraph& d, const PartialColoring& gamma,
                                     const ReserveMap& reserve, Vertex v, Color c, Direction dir);

/// gamma-compatibility of the lists: a colored arc uv (color c) forbids c on
/// every other uncolored arc leaving u or entering v; an uncolored arc uv may not list
/// c when a c-monochromatic path v -> u exists.
ColoringReport is_compatible(const Digraph& d, const ListAssignment& lists,
                             const PartialColoring& gamma);

// JSON: {"colors": {"u,v": c | null}} and {"lists": {"u,v": [c, ...]}}.
nlohmann::json coloring_to_json(const Digraph& d, const PartialColoring& gamma);
PartialColoring coloring_from_json(const Digraph& d, const nlohmann::json& j);
nlohmann::json lists_to_json(const Digraph& d, const ListAssignment& lists);
ListAssignment lists_from_json(const Digraph& d, const nlohmann::json& j);
nlohmann::json report_to_json(const ColoringReport& report);

}  // namespace dlf
