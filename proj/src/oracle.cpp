#include "dlf/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dlf {

namespace {

// k classes, each a set of vertex-disjoint directed paths. other[j][x] is
// the opposite endpoint of the path that has x as an endpoint (x itself
// when x is isolated in class j).
class PathClasses {
 public:
  PathClasses(std::size_t n, std::size_t k)
      : n_(n), out_(n * k, 0), in_(n * k, 0), other_(n * k) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t v = 0; v < n; ++v) other_[j * n + v] = static_cast<Vertex>(v);
    }
  }

  bool feasible(std::size_t j, Vertex u, Vertex v) const {
    const std::size_t b = j * n_;
    // u ends a path starting at other[u]; closing it onto v makes a cycle.
    return !out_[b + u] && !in_[b + v] && other_[b + u] != v;
  }

  struct Undo {
    std::size_t j;
    Vertex u, v, s, t, old_s, old_t;
  };

  Undo add(std::size_t j, Vertex u, Vertex v) {
    const std::size_t b = j * n_;
    const Vertex s = other_[b + u], t = other_[b + v];
    Undo undo{j, u, v, s, t, other_[b + s], other_[b + t]};
    out_[b + u] = 1;
    in_[b + v] = 1;
    other_[b + s] = t;
    other_[b + t] = s;
    return undo;
  }

  void remove(const Undo& x) {
    const std::size_t b = x.j * n_;
    other_[b + x.s] = x.old_s;
    other_[b + x.t] = x.old_t;
    out_[b + x.u] = 0;
    in_[b + x.v] = 0;
  }

 private:
  std::size_t n_;
  std::vector<char> out_, in_;
  std::vector<Vertex> other_;
};

struct Exhausted {};

class Search {
 public:
  // `options[a]` lists the class indices arc a may take; `symmetric` means
  // classes are interchangeable (first-use rule applies).
  Search(const Digraph& d, std::size_t k, std::vector<std::vector<std::size_t>> options,
         bool symmetric, const SearchBudget& budget)
      : d_(d), k_(k), options_(std::move(options)), symmetric_(symmetric), budget_(budget),
        classes_(d.vertex_count(), k), assigned_(d.arc_count(), kNone),
        start_(std::chrono::steady_clock::now()) {}

  // Throws Exhausted on budget exhaustion.
  bool solve() { return dfs(0, 0); }
  const std::vector<std::size_t>& solution() const { return assigned_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  bool allowed(ArcId a, std::size_t j, std::size_t used) const {
    if (symmetric_ && j > used) return false;
    const Arc& arc = d_.arc(a);
    return classes_.feasible(j, arc.tail, arc.head);
  }

  bool dfs(std::size_t placed, std::size_t used) {
    if (++nodes_ > budget_.node_limit) throw Exhausted{};
    if ((nodes_ & 0xfff) == 0 && std::chrono::steady_clock::now() - start_ > budget_.time_limit) {
      throw Exhausted{};
    }
    if (placed == d_.arc_count()) return true;
    // Most constrained unassigned arc first.
    ArcId best = 0;
    std::size_t best_count = kNone;
    for (ArcId a = 0; a < d_.arc_count(); ++a) {
      if (assigned_[a] != kNone) continue;
      std::size_t cnt = 0;
      for (std::size_t j : options_[a]) cnt += allowed(a, j, used);
      if (cnt < best_count) {
        best_count = cnt;
        best = a;
        if (cnt == 0) return false;
      }
    }
    const Arc& arc = d_.arc(best);
    for (std::size_t j : options_[best]) {
      if (!allowed(best, j, used)) continue;
      auto undo = classes_.add(j, arc.tail, arc.head);
      assigned_[best] = j;
      if (dfs(placed + 1, std::max(used, j + 1))) return true;
      assigned_[best] = kNone;
      classes_.remove(undo);
    }
    return false;
  }

  const Digraph& d_;
  std::size_t k_;
  std::vector<std::vector<std::size_t>> options_;
  bool symmetric_;
  SearchBudget budget_;
  PathClasses classes_;
  std::vector<std::size_t> assigned_;
  std::uint64_t nodes_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::size_t la_lower_bound(const Digraph& d) {
  const std::size_t delta = max_degree(d);
  const std::size_t n = d.vertex_count();
  if (d.arc_count() == 0 || n < 2) return delta;
  bool regular = true;
  for (Vertex v = 0; v < n && regular; ++v) {
    regular = d.out_degree(v) == delta && d.in_degree(v) == delta;
  }
  if (!regular) return delta;
  return std::max(delta, (delta * n + (n - 2)) / (n - 1));
}

std::vector<Color> greedy_decomposition(const Digraph& d) {
  const std::size_t m = d.arc_count();
  PathClasses classes(d.vertex_count(), std::max<std::size_t>(m, 1));
  std::vector<Color> out(m);
  std::size_t used = 0;
  for (ArcId a = 0; a < m; ++a) {
    const Arc& arc = d.arc(a);
    std::size_t j = 0;
    while (j < used && !classes.feasible(j, arc.tail, arc.head)) ++j;
    classes.add(j, arc.tail, arc.head);
    used = std::max(used, j + 1);
    out[a] = static_cast<Color>(j);
  }
  return out;
}

LaResult exact_la(const Digraph& d, const SearchBudget& budget) {
  LaResult r;
  r.lower = la_lower_bound(d);
  r.witness = greedy_decomposition(d);
  r.upper = 0;
  for (Color c : r.witness) r.upper = std::max<std::size_t>(r.upper, c + 1);
  if (d.arc_count() == 0) {
    r.value = 0;
    return r;
  }
  SearchBudget remaining = budget;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t k = r.lower; k < r.upper; ++k) {
    std::vector<std::vector<std::size_t>> options(d.arc_count());
    for (auto& o : options) {
      o.resize(k);
      for (std::size_t j = 0; j < k; ++j) o[j] = j;
    }
    Search search(d, k, std::move(options), true, remaining);
    try {
      const bool ok = search.solve();
      r.nodes += search.nodes();
      if (ok) {
        r.upper = k;
        for (ArcId a = 0; a < d.arc_count(); ++a) r.witness[a] = static_cast<Color>(search.solution()[a]);
        break;
      }
      r.lower = k + 1;
    } catch (const Exhausted&) {
      r.nodes += search.nodes();
      return r;
    }
    remaining.node_limit -= std::min(remaining.node_limit, search.nodes());
    const auto spent = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t0);
    remaining.time_limit = budget.time_limit - std::min(budget.time_limit, spent);
  }
  r.value = r.upper;
  r.lower = r.upper;
  return r;
}

const char* to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::Absent: return "absent";
    case SearchStatus::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

ListColoringResult exists_linear_list_coloring(const Digraph& d, const ListAssignment& lists,
                                               const SearchBudget& budget) {
  std::vector<Color> palette;
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    palette.insert(palette.end(), lists.at(a).begin(), lists.at(a).end());
  }
  std::sort(palette.begin(), palette.end());
  palette.erase(std::unique(palette.begin(), palette.end()), palette.end());
  std::vector<std::vector<std::size_t>> options(d.arc_count());
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    for (Color c : lists.at(a)) {
      options[a].push_back(static_cast<std::size_t>(
          std::lower_bound(palette.begin(), palette.end(), c) - palette.begin()));
    }
  }
  ListColoringResult r;
  Search search(d, std::max<std::size_t>(palette.size(), 1), std::move(options), false, budget);
  try {
    const bool ok = search.solve();
    r.nodes = search.nodes();
    r.status = ok ? SearchStatus::Found : SearchStatus::Absent;
    if (ok) {
      for (std::size_t j : search.solution()) r.coloring.push_back(palette[j]);
    }
  } catch (const Exhausted&) {
    r.nodes = search.nodes();
    r.status = SearchStatus::Indeterminate;
  }
  return r;
}

bool verify_decomposition(const Digraph& d, const PartialColoring& coloring) {
  if (coloring.colored_count() != d.arc_count()) {
    throw InvalidInput("oracle", "decomposition leaves arcs uncolored");
  }
  return validate_coloring(d, coloring, 1, 1, true).valid();
}

bool verify_decomposition(const Digraph& d, const std::vector<Color>& coloring) {
  if (coloring.size() != d.arc_count()) {
    throw InvalidInput("oracle", "decomposition must color every arc");
  }
  PartialColoring gamma(d);
  for (ArcId a = 0; a < d.arc_count(); ++a) gamma.assign(a, coloring[a]);
  return verify_decomposition(d, gamma);
}

ListColoringResult exists_list_edge_coloring(const FinishInstance& inst,
                                             const SearchBudget& budget) {
  const auto& g = inst.g;
  const std::size_t m = g.edges.size();
  std::vector<Color> color(m);
  std::set<std::pair<Vertex, Color>> taken;
  ListColoringResult r;
  const auto t0 = std::chrono::steady_clock::now();
  auto dfs = [&](auto&& self, std::size_t e) -> bool {
    if (++r.nodes > budget.node_limit ||
        std::chrono::steady_clock::now() - t0 > budget.time_limit) {
      throw Exhausted{};
    }
    if (e == m) return true;
    const auto [x, y] = g.edges[e];
    for (Color c : inst.lists[e]) {
      if (taken.count({x, c}) || taken.count({y, c})) continue;
      taken.insert({x, c});
      taken.insert({y, c});
      color[e] = c;
      if (self(self, e + 1)) return true;
      taken.erase({x, c});
      taken.erase({y, c});
    }
    return false;
  };
  try {
    if (dfs(dfs, 0)) {
      r.status = SearchStatus::Found;
      r.coloring = color;
    } else {
      r.status = SearchStatus::Absent;
    }
  } catch (const Exhausted&) {
    r.status = SearchStatus::Indeterminate;
  }
  return r;
}

nlohmann::json la_result_to_json(const Digraph& d, const LaResult& r) {
  PartialColoring gamma(d);
  for (ArcId a = 0; a < d.arc_count(); ++a) gamma.assign(a, r.witness[a]);
  nlohmann::json j{{"lower", r.lower}, {"upper", r.upper}, {"nodes", r.nodes},
                   {"witness", coloring_to_json(d, gamma)}};
  j["la"] = r.value ? nlohmann::json(*r.value) : nlohmann::json(nullptr);
  return j;
}

}  // namespace dlf
