#pragma once

// Naive reference implementations used as oracles by the unit and
// acceptance tests. They share no code with the library beyond the data
// types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "dlf/coloring.hpp"
#include "dlf/rng.hpp"
#include "dlf/suspicious.hpp"

namespace dlf::test {

/// Every simple directed path (at least one arc) of D, as vertex sequences.
inline std::vector<std::vector<Vertex>> all_simple_paths(const Digraph& d) {
  std::vector<std::vector<Vertex>> out;
  std::vector<Vertex> path;
  std::vector<char> on(d.vertex_count(), 0);
  std::function<void(Vertex)> grow = [&](Vertex x) {
    for (const Arc& a : d.arcs()) {
      if (a.tail != x || on[a.head]) continue;
      path.push_back(a.head);
      on[a.head] = 1;
      out.push_back(path);
      grow(a.head);
      on[a.head] = 0;
      path.pop_back();
    }
  };
  for (Vertex s = 0; s < d.vertex_count(); ++s) {
    path = {s};
    on[s] = 1;
    grow(s);
    on[s] = 0;
  }
  return out;
}

/// Filters a path for color c: colored arcs must carry c, uncolored arcs
/// must list c. Returns the uncolored positions, or nothing.
inline std::optional<std::vector<std::size_t>> suspicious_positions(
    const Digraph& d, const ListAssignment& lists, const PartialColoring& gamma,
    const std::vector<Vertex>& path, Color c) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const ArcId a = *d.find_arc(path[i], path[i + 1]);
    if (auto col = gamma.color(a)) {
      if (*col != c) return std::nullopt;
    } else {
      if (!std::binary_search(lists.at(a).begin(), lists.at(a).end(), c)) return std::nullopt;
      pos.push_back(i);
    }
  }
  return pos;
}

inline std::vector<SuspiciousPath> naive_from_to(const Digraph& d, const ListAssignment& lists,
                                                 const PartialColoring& gamma, Vertex v,
                                                 Vertex u, Color c, std::size_t k) {
  std::vector<SuspiciousPath> out;
  for (const auto& p : all_simple_paths(d)) {
    if (p.front() != v || p.back() != u) continue;
    auto pos = suspicious_positions(d, lists, gamma, p, c);
    if (pos && pos->size() == k) out.push_back({p, c, *pos});
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<SuspiciousPath> naive_tail(const Digraph& d, const ListAssignment& lists,
                                              const PartialColoring& gamma, Vertex u, Color c,
                                              std::size_t len) {
  std::vector<SuspiciousPath> out;
  for (const auto& p : all_simple_paths(d)) {
    if (p.back() != u) continue;
    auto pos = suspicious_positions(d, lists, gamma, p, c);
    if (pos && pos->size() == len && !pos->empty() && pos->front() == 0) {
      out.push_back({p, c, *pos});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// True iff the arcs of each color class form vertex-disjoint directed
/// paths, checked by walking: every class has in/out-degree <= 1 and every
/// walk from a source ends; remaining arcs would lie on cycles.
inline bool naive_is_linear(const Digraph& d, const std::vector<Color>& color) {
  std::map<Color, std::vector<Arc>> classes;
  for (ArcId a = 0; a < d.arc_count(); ++a) classes[color[a]].push_back(d.arc(a));
  for (const auto& [c, arcs] : classes) {
    std::map<Vertex, Vertex> next;
    std::map<Vertex, int> indeg;
    for (const Arc& a : arcs) {
      if (next.count(a.tail)) return false;
      next[a.tail] = a.head;
      if (++indeg[a.head] > 1) return false;
    }
    std::size_t walked = 0;
    for (const auto& [start, unused] : next) {
      if (indeg.count(start)) continue;
      for (Vertex x = start; next.count(x); x = next[x]) ++walked;
    }
    if (walked != arcs.size()) return false;
  }
  return true;
}

/// la by enumerating every k-coloring for k = 1, 2, ... (tiny inputs only).
inline std::size_t brute_force_la(const Digraph& d) {
  const std::size_t m = d.arc_count();
  if (m == 0) return 0;
  for (std::size_t k = 1;; ++k) {
    std::vector<Color> col(m, 0);
    for (;;) {
      if (naive_is_linear(d, col)) return k;
      std::size_t i = 0;
      while (i < m && ++col[i] == k) col[i++] = 0;
      if (i == m) break;
    }
  }
}

/// Random list assignment with lists drawn from {0..palette-1}.
inline ListAssignment random_lists(const Digraph& d, std::size_t palette, std::size_t max_size,
                                   Rng& rng) {
  std::vector<std::vector<Color>> lists(d.arc_count());
  for (auto& l : lists) {
    const std::size_t s = 1 + uniform_index(rng, max_size);
    for (std::size_t i = 0; i < s; ++i) l.push_back(static_cast<Color>(uniform_index(rng, palette)));
  }
  return ListAssignment(std::move(lists));
}

/// Random partial coloring drawn from the lists that keeps (1,1) and
/// acyclicity: arcs are offered in random order and kept when legal.
inline PartialColoring random_partial(const Digraph& d, const ListAssignment& lists, double density,
                                      Rng& rng) {
  PartialColoring gamma(d);
  std::vector<ArcId> order(d.arc_count());
  for (ArcId a = 0; a < d.arc_count(); ++a) order[a] = a;
  shuffle(order.begin(), order.end(), rng);
  for (ArcId a : order) {
    if (lists.size(a) == 0 || !bernoulli(rng, density)) continue;
    const Color c = lists.at(a)[uniform_index(rng, lists.size(a))];
    const Arc& arc = d.arc(a);
    if (gamma.occupancy(arc.tail, c, Direction::Out) || gamma.occupancy(arc.head, c, Direction::In)) {
      continue;
    }
    if (has_monochromatic_dipath(d, gamma, arc.head, arc.tail, c)) continue;
    gamma.assign(a, c);
  }
  return gamma;
}

/// Removes every listed color that violates compatibility with gamma, and
/// empties the lists of colored arcs.
inline ListAssignment make_compatible(const Digraph& d, ListAssignment lists,
                                      const PartialColoring& gamma) {
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    if (gamma.is_colored(a)) {
      lists.clear(a);
      continue;
    }
    const Arc& arc = d.arc(a);
    std::vector<Color> keep;
    for (Color c : lists.at(a)) {
      if (gamma.occupancy(arc.tail, c, Direction::Out) || gamma.occupancy(arc.head, c, Direction::In)) {
        continue;
      }
      if (has_monochromatic_dipath(d, gamma, arc.head, arc.tail, c)) continue;
      keep.push_back(c);
    }
    lists.set(a, keep);
  }
  return lists;
}

/// Binomial standard deviation of a frequency estimate.
inline double binomial_sigma(double p, std::size_t trials) {
  return std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

}  // namespace dlf::test
