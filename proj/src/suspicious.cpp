#include "dlf/suspicious.hpp"

#include <algorithm>
#include <set>

namespace dlf {

namespace {

// Backward depth-first walk over suspicious simple paths ending at `end`.
// Colored c-arcs are free; uncolored arcs listing c consume one unit of the
// uncolored budget. `visit` sees every path (vertices in reverse order, the
// uncolored count, whether the newest arc is uncolored) and returns false to
// stop extending that path.
template <class Visit>
class BackwardWalk {
 public:
  BackwardWalk(const Digraph& d, const ListAssignment& lists, const PartialColoring& gamma,
               Color c, std::size_t max_k, Visit& visit)
      : d_(d), lists_(lists), gamma_(gamma), c_(c), max_k_(max_k), visit_(visit),
        on_path_(d.vertex_count(), 0) {}

  void run(Vertex end) {
    rev_.assign(1, end);
    unc_.clear();
    on_path_[end] = 1;
    extend(end, 0);
    on_path_[end] = 0;
  }

 private:
  void extend(Vertex x, std::size_t k) {
    for (ArcId a : d_.in_arcs(x)) {
      const Vertex y = d_.arc(a).tail;
      if (on_path_[y]) continue;
      bool uncolored;
      if (auto col = gamma_.color(a)) {
        if (*col != c_) continue;
        uncolored = false;
      } else {
        if (!lists_.contains(a, c_)) continue;
        uncolored = true;
      }
      const std::size_t k2 = k + (uncolored ? 1 : 0);
      if (k2 > max_k_) continue;
      rev_.push_back(y);
      unc_.push_back(uncolored);
      on_path_[y] = 1;
      if (visit_(rev_, unc_, k2)) extend(y, k2);
      on_path_[y] = 0;
      unc_.pop_back();
      rev_.pop_back();
    }
  }

  const Digraph& d_;
  const ListAssignment& lists_;
  const PartialColoring& gamma_;
  Color c_;
  std::size_t max_k_;
  Visit& visit_;
  std::vector<char> on_path_;
  std::vector<Vertex> rev_;
  // unc_[j] describes the arc (rev_[j+1], rev_[j]).
  std::vector<char> unc_;
};

SuspiciousPath materialize(const std::vector<Vertex>& rev, const std::vector<char>& unc, Color c) {
  SuspiciousPath p;
  p.color = c;
  p.vertices.assign(rev.rbegin(), rev.rend());
  const std::size_t m = unc.size();
  for (std::size_t i = 0; i < m; ++i) {
    // Forward arc i is (rev[m-i], rev[m-i-1]), described by unc[m-1-i].
    if (unc[m - 1 - i]) p.uncolored_positions.push_back(i);
  }
  return p;
}

void check_cap(std::size_t size, std::size_t cap) {
  if (size > cap) {
    throw PathOverflow("suspicious", "more than " + std::to_string(cap) + " suspicious paths");
  }
}

}  // namespace

bool is_suspicious(const Digraph& d, const ListAssignment& lists, const PartialColoring& gamma,
                   const SuspiciousPath& p) {
  if (p.vertices.size() < 2) return false;
  std::set<Vertex> seen(p.vertices.begin(), p.vertices.end());
  if (seen.size() != p.vertices.size()) return false;
  std::vector<std::size_t> unc;
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    auto a = d.find_arc(p.vertices[i], p.vertices[i + 1]);
    if (!a) return false;
    if (auto col = gamma.color(*a)) {
      if (*col != p.color) return false;
    } else {
      if (!lists.contains(*a, p.color)) return false;
      unc.push_back(i);
    }
  }
  return unc == p.uncolored_positions;
}

std::vector<SuspiciousPath> enumerate_from_to(const Digraph& d, const ListAssignment& lists,
                                              const PartialColoring& gamma, Vertex v, Vertex u,
                                              Color c, std::size_t k, std::size_t cap) {
  std::vector<SuspiciousPath> out;
  if (u == v) return out;
  auto visit = [&](const std::vector<Vertex>& rev, const std::vector<char>& unc, std::size_t cnt) {
    if (rev.back() != v) return true;
    if (cnt == k) {
      out.push_back(materialize(rev, unc, c));
      check_cap(out.size(), cap);
    }
    return false;  // v must stay the first vertex
  };
  BackwardWalk<decltype(visit)> walk(d, lists, gamma, c, k, visit);
  walk.run(u);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SuspiciousPath> enumerate_tail(const Digraph& d, const ListAssignment& lists,
                                           const PartialColoring& gamma, Vertex u, Color c,
                                           std::size_t len, std::size_t cap) {
  std::vector<SuspiciousPath> out;
  auto visit = [&](const std::vector<Vertex>& rev, const std::vector<char>& unc, std::size_t cnt) {
    if (cnt < len) return true;
    // cnt == len: any longer path starts with a colored arc or exceeds len.
    if (unc.back()) {
      out.push_back(materialize(rev, unc, c));
      check_cap(out.size(), cap);
    }
    return false;
  };
  BackwardWalk<decltype(visit)> walk(d, lists, gamma, c, len, visit);
  walk.run(u);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SuspiciousPath> danger_set(const Digraph& d, const ListAssignment& lists,
                                       const PartialColoring& gamma, ArcId uv, Color c,
                                       std::size_t ell_int, std::size_t cap) {
  const Vertex u = d.arc(uv).tail, v = d.arc(uv).head;
  std::vector<SuspiciousPath> out;
  for (std::size_t k = 1; k + 1 <= ell_int; ++k) {
    auto part = enumerate_from_to(d, lists, gamma, v, u, c, k, cap);
    out.insert(out.end(), part.begin(), part.end());
    check_cap(out.size(), cap);
  }
  auto tail = enumerate_tail(d, lists, gamma, u, c, ell_int, cap);
  out.insert(out.end(), tail.begin(), tail.end());
  check_cap(out.size(), cap);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CountBoundReport count_bound_check(const Digraph& d, const ListAssignment& lists,
                                   const PartialColoring& gamma, std::size_t N,
                                   std::size_t k_max, std::size_t cap) {
  CountBoundReport report;
  report.max_from_to.assign(k_max + 1, 0);
  report.max_tail.assign(k_max + 1, 0);

  for (Vertex w = 0; w < d.vertex_count(); ++w) {
    for (Direction dir : {Direction::In, Direction::Out}) {
      std::map<Color, std::size_t> listed;
      std::set<Color> taken;
      for (ArcId a : d.arcs_at(w, dir)) {
        if (auto col = gamma.color(a)) {
          taken.insert(*col);
        } else {
          for (Color c : lists.at(a)) ++listed[c];
        }
      }
      for (auto [c, cnt] : listed) {
        report.max_neighbors = std::max(report.max_neighbors, cnt);
        if (cnt > N) report.neighbor_bound_ok = false;
        if (taken.count(c)) report.discipline_violations += cnt;
      }
    }
  }

  auto power = [](std::size_t base, std::size_t e) {
    long double r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= static_cast<long double>(base);
    return r;
  };

  for (Vertex u = 0; u < d.vertex_count(); ++u) {
    std::set<Color> colors;
    for (ArcId a : d.in_arcs(u)) {
      if (auto col = gamma.color(a)) {
        colors.insert(*col);
      } else {
        colors.insert(lists.at(a).begin(), lists.at(a).end());
      }
    }
    for (Color c : colors) {
      // from_to[start][k] and tail[k] for paths ending at u.
      std::map<Vertex, std::vector<std::size_t>> from_to;
      std::vector<std::size_t> tail(k_max + 1, 0);
      std::size_t total = 0;
      auto visit = [&](const std::vector<Vertex>& rev, const std::vector<char>& unc,
                       std::size_t k) {
        if (k >= 1) {
          auto& row = from_to[rev.back()];
          if (row.empty()) row.assign(k_max + 1, 0);
          ++row[k];
          if (unc.back()) ++tail[k];
          check_cap(++total, cap);
        }
        return true;
      };
      BackwardWalk<decltype(visit)> walk(d, lists, gamma, c, k_max, visit);
      walk.run(u);
      for (std::size_t k = 1; k <= k_max; ++k) {
        report.max_tail[k] = std::max(report.max_tail[k], tail[k]);
        if (static_cast<long double>(tail[k]) > power(N, k)) report.tail_excess.emplace_back(k, tail[k]);
        for (const auto& [start, row] : from_to) {
          report.max_from_to[k] = std::max(report.max_from_to[k], row[k]);
          if (static_cast<long double>(row[k]) > power(N, k - 1)) {
            report.from_to_excess.emplace_back(k, row[k]);
          }
        }
      }
    }
  }
  return report;
}

nlohmann::json path_to_json(const SuspiciousPath& p) {
  return {{"vertices", p.vertices}, {"color", p.color}, {"uncolored", p.uncolored_positions}};
}

nlohmann::json count_report_to_json(const CountBoundReport& r) {
  auto excess = [](const auto& v) {
    nlohmann::json j = nlohmann::json::array();
    for (auto [k, n] : v) j.push_back({{"k", k}, {"count", n}});
    return j;
  };
  return {{"precondition_ok", r.precondition_ok()},
          {"neighbor_bound_ok", r.neighbor_bound_ok},
          {"max_neighbors", r.max_neighbors},
          {"discipline_violations", r.discipline_violations},
          {"bounds_ok", r.bounds_ok()},
          {"max_from_to", r.max_from_to},
          {"max_tail", r.max_tail},
          {"from_to_excess", excess(r.from_to_excess)},
          {"tail_excess", excess(r.tail_excess)}};
}

}  // namespace dlf
