#include "dlf/finisher.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "dlf/rng.hpp"

namespace dlf {

namespace {

std::vector<std::vector<std::size_t>> incidence(const Multigraph& g) {
  std::vector<std::vector<std::size_t>> at(g.n);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    at[g.edges[i].first].push_back(i);
    at[g.edges[i].second].push_back(i);
  }
  return at;
}

// Edges sharing an endpoint with e, each once.
std::vector<std::size_t> neighbors(const Multigraph& g,
                                   const std::vector<std::vector<std::size_t>>& at,
                                   std::size_t e) {
  std::vector<std::size_t> out;
  for (Vertex x : {g.edges[e].first, g.edges[e].second}) {
    for (std::size_t f : at[x]) {
      if (f != e) out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::size_t incidence_bound(const Multigraph& g, const std::vector<std::vector<Color>>& lists) {
  const auto at = incidence(g);
  std::size_t best = 0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    std::map<Color, std::size_t> count;
    for (std::size_t f : neighbors(g, at, e)) {
      for (Color c : lists[f]) best = std::max(best, ++count[c]);
    }
  }
  return best;
}

FinishInstance make_instance(Multigraph g, std::vector<std::vector<Color>> lists) {
  FinishInstance inst;
  for (auto& l : lists) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
  inst.N = incidence_bound(g, lists);
  inst.L = lists.empty() ? 0 : lists[0].size();
  for (const auto& l : lists) inst.L = std::min(inst.L, l.size());
  inst.g = std::move(g);
  inst.lists = std::move(lists);
  return inst;
}

FinishInstance build_instance(const Digraph& d, const PartialColoring& gamma,
                              const ListAssignment& res) {
  Multigraph g;
  g.n = d.vertex_count();
  std::vector<std::vector<Color>> lists;
  std::vector<ArcId> arcs;
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    if (gamma.is_colored(a)) continue;
    if (res.size(a) == 0) {
      throw InvalidInput("finisher", "uncolored arc " + std::to_string(d.arc(a).tail) + "->" +
                                         std::to_string(d.arc(a).head) +
                                         " has an empty reserve list");
    }
    const Arc& arc = d.arc(a);
    g.edges.emplace_back(std::min(arc.tail, arc.head), std::max(arc.tail, arc.head));
    lists.emplace_back(res.at(a).begin(), res.at(a).end());
    arcs.push_back(a);
  }
  FinishInstance inst = make_instance(std::move(g), std::move(lists));
  inst.arc_of_edge = std::move(arcs);
  return inst;
}

FinishInstance truncated(const FinishInstance& inst) {
  FinishInstance t = inst;
  for (auto& l : t.lists) {
    if (l.size() > t.L) l.resize(t.L);
  }
  return t;
}

FinishResult finish(const FinishInstance& inst, std::uint64_t seed, std::size_t max_resamples) {
  const FinishInstance t = truncated(inst);
  const Multigraph& g = t.g;
  const std::size_t m = g.edges.size();
  FinishResult result;
  result.below_guarantee = t.L < 8 * t.N;
  if (m == 0) return result;
  if (t.L == 0) throw InvalidInput("finisher", "empty color list");
  if (max_resamples == 0) max_resamples = 100 * m * t.L;

  const auto at = incidence(g);
  std::vector<std::vector<std::size_t>> nbr(m);
  for (std::size_t e = 0; e < m; ++e) nbr[e] = neighbors(g, at, e);

  Rng rng = SeedStream(seed).child("finisher").engine();
  std::vector<Color> color(m);
  auto draw = [&](std::size_t e) { color[e] = t.lists[e][uniform_index(rng, t.lists[e].size())]; };
  for (std::size_t e = 0; e < m; ++e) draw(e);

  auto partner = [&](std::size_t e) -> std::optional<std::size_t> {
    for (std::size_t f : nbr[e]) {
      if (color[f] == color[e]) return f;
    }
    return std::nullopt;
  };
  std::set<std::size_t> violated;
  for (std::size_t e = 0; e < m; ++e) {
    if (partner(e)) violated.insert(e);
  }
  auto refresh = [&](std::size_t e) {
    for (std::size_t x : nbr[e]) {
      if (partner(x)) violated.insert(x);
      else violated.erase(x);
    }
    if (partner(e)) violated.insert(e);
    else violated.erase(e);
  };

  while (!violated.empty()) {
    if (result.resamples >= max_resamples) {
      throw BudgetExhausted("finisher", "no proper coloring within " +
                                            std::to_string(max_resamples) + " resamples");
    }
    // Lowest edge index first; its lowest-index partner shares the color.
    const std::size_t e1 = *violated.begin();
    const std::size_t e2 = *partner(e1);
    draw(e1);
    draw(e2);
    ++result.resamples;
    refresh(e1);
    refresh(e2);
  }
  result.colors = std::move(color);
  return result;
}

bool verify_finish(const FinishInstance& inst, const std::vector<Color>& colors) {
  const Multigraph& g = inst.g;
  if (colors.size() != g.edges.size()) return false;
  std::set<std::pair<Vertex, Color>> seen;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (!std::binary_search(inst.lists[e].begin(), inst.lists[e].end(), colors[e])) return false;
    if (!seen.insert({g.edges[e].first, colors[e]}).second) return false;
    if (!seen.insert({g.edges[e].second, colors[e]}).second) return false;
  }
  return true;
}

FinishInstance random_finish_instance(std::size_t n, std::size_t edges, std::size_t max_deg,
                                      std::size_t list_size, std::size_t palette,
                                      std::uint64_t seed) {
  if (n < 2 || list_size > palette) throw InvalidInput("finisher", "bad instance parameters");
  Rng rng = SeedStream(seed).child("finish-instance").engine();
  Multigraph g;
  g.n = n;
  std::vector<std::size_t> deg(n, 0);
  std::map<std::pair<Vertex, Vertex>, int> mult;
  for (std::size_t tries = 0; g.edges.size() < edges && tries < 50 * edges; ++tries) {
    auto a = static_cast<Vertex>(uniform_index(rng, n));
    auto b = static_cast<Vertex>(uniform_index(rng, n));
    if (a == b || deg[a] >= max_deg || deg[b] >= max_deg) continue;
    auto key = std::minmax(a, b);
    if (mult[key] >= 2) continue;
    ++mult[key];
    ++deg[a];
    ++deg[b];
    g.edges.emplace_back(key.first, key.second);
  }
  std::vector<Color> pool(palette);
  std::iota(pool.begin(), pool.end(), Color{0});
  std::vector<std::vector<Color>> lists;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    shuffle(pool.begin(), pool.end(), rng);
    lists.emplace_back(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(list_size));
  }
  return make_instance(std::move(g), std::move(lists));
}

nlohmann::json finish_summary_json(const FinishInstance& inst, const FinishResult& r) {
  return {{"edges", inst.g.edges.size()},
          {"L", inst.L},
          {"N", inst.N},
          {"below_guarantee", r.below_guarantee},
          {"resamples", r.resamples}};
}

}  // namespace dlf
