#include "dlf/coloring.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace dlf {

ListAssignment::ListAssignment(std::vector<std::vector<Color>> lists) : lists_(std::move(lists)) {
  for (auto& l : lists_) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
  }
}

ListAssignment ListAssignment::uniform(std::size_t arc_count, std::size_t size) {
  std::vector<Color> base(size);
  for (std::size_t i = 0; i < size; ++i) base[i] = static_cast<Color>(i);
  ListAssignment out;
  out.lists_.assign(arc_count, base);
  return out;
}

bool ListAssignment::contains(ArcId a, Color c) const {
  return std::binary_search(lists_[a].begin(), lists_[a].end(), c);
}

void ListAssignment::set(ArcId a, std::vector<Color> colors) {
  std::sort(colors.begin(), colors.end());
  colors.erase(std::unique(colors.begin(), colors.end()), colors.end());
  lists_[a] = std::move(colors);
}

bool ListAssignment::remove(ArcId a, Color c) {
  auto& l = lists_[a];
  auto it = std::lower_bound(l.begin(), l.end(), c);
  if (it == l.end() || *it != c) return false;
  l.erase(it);
  return true;
}

void ListAssignment::truncate_smallest(ArcId a, std::size_t keep) {
  if (lists_[a].size() > keep) lists_[a].resize(keep);
}

void PartialColoring::assign(ArcId a, Color c) {
  if (color_of_[a]) unassign(a);
  color_of_[a] = c;
  ++colored_;
  ++occupancy_[{arcs_[a].tail, c, Direction::Out}];
  ++occupancy_[{arcs_[a].head, c, Direction::In}];
}

void PartialColoring::unassign(ArcId a) {
  if (!color_of_[a]) return;
  const Color c = *color_of_[a];
  color_of_[a].reset();
  --colored_;
  for (OccupancyKey k : {OccupancyKey{arcs_[a].tail, c, Direction::Out},
                         OccupancyKey{arcs_[a].head, c, Direction::In}}) {
    auto it = occupancy_.find(k);
    if (--it->second == 0) occupancy_.erase(it);
  }
}

std::size_t PartialColoring::occupancy(Vertex v, Color c, Direction dir) const {
  auto it = occupancy_.find({v, c, dir});
  return it == occupancy_.end() ? 0 : it->second;
}

Occupancy PartialColoring::recount() const {
  Occupancy occ;
  for (ArcId a = 0; a < color_of_.size(); ++a) {
    if (!color_of_[a]) continue;
    ++occ[{arcs_[a].tail, *color_of_[a], Direction::Out}];
    ++occ[{arcs_[a].head, *color_of_[a], Direction::In}];
  }
  return occ;
}

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::DegreeIn: return "degree-in";
    case ViolationKind::DegreeOut: return "degree-out";
    case ViolationKind::MonochromaticDicycle: return "monochromatic-dicycle";
    case ViolationKind::OffList: return "off-list";
    case ViolationKind::BlockedColorListed: return "blocked-color-listed";
    case ViolationKind::ReturnPathColorListed: return "return-path-color-listed";
  }
  return "unknown";
}

std::size_t ColoringReport::count(ViolationKind k) const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [k](const Violation& v) { return v.kind == k; }));
}

bool is_directed_linear_forest(const Digraph& d, std::span<const Arc> arcs) {
  const std::size_t n = d.vertex_count();
  std::vector<int> succ(n, -1), indeg(n, 0);
  for (const Arc& a : arcs) {
    if (!d.find_arc(a.tail, a.head)) {
      throw InvalidInput("coloring", "arc " + std::to_string(a.tail) + "->" +
                                         std::to_string(a.head) + " is not in the digraph");
    }
  }
  for (const Arc& a : arcs) {
    if (succ[a.tail] != -1 || indeg[a.head] != 0) return false;
    succ[a.tail] = static_cast<int>(a.head);
    indeg[a.head] = 1;
  }
  // With all degrees <= 1 the arcs form disjoint paths and cycles; walking
  // from every path start covers exactly the path arcs.
  std::size_t covered = 0;
  for (Vertex v = 0; v < n; ++v) {
    if (indeg[v] != 0) continue;
    for (int x = succ[v]; x != -1; x = succ[x]) ++covered;
  }
  return covered == arcs.size();
}

namespace {

// Iterative Tarjan; returns the component id per local vertex.
std::vector<int> strongly_connected(const std::vector<std::vector<int>>& adj, int& count) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  int next_index = 0;
  count = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, i] = frames.back();
      if (i < adj[v].size()) {
        int w = adj[v][i++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = count;
        } while (w != v);
        ++count;
      }
      int done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
    }
  }
  return comp;
}

// Shortest cycle through `s` inside its component.
std::vector<int> cycle_through(const std::vector<std::vector<int>>& adj, const std::vector<int>& comp,
                               int s) {
  std::vector<int> parent(adj.size(), -2);
  std::queue<int> q;
  q.push(s);
  parent[s] = -1;
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    for (int y : adj[x]) {
      if (comp[y] != comp[s]) continue;
      if (y == s) {
        std::vector<int> cyc;
        for (int z = x; z != -1; z = parent[z]) cyc.push_back(z);
        std::reverse(cyc.begin(), cyc.end());
        return cyc;
      }
      if (parent[y] == -2) {
        parent[y] = x;
        q.push(y);
      }
    }
  }
  return {};
}

}  // namespace

ColoringReport validate_coloring(const Digraph& d, const PartialColoring& gamma, std::size_t s,
                                 std::size_t t, bool acyclic, const ListAssignment* lists) {
  ColoringReport report;

  std::vector<std::pair<OccupancyKey, std::size_t>> over;
  for (const auto& [key, cnt] : gamma.occupancy_index()) {
    const std::size_t bound = key.dir == Direction::In ? s : t;
    if (cnt > bound) over.emplace_back(key, cnt);
  }
  std::sort(over.begin(), over.end(), [](const auto& a, const auto& b) {
    return std::tie(a.first.vertex, a.first.color, a.first.dir) <
           std::tie(b.first.vertex, b.first.color, b.first.dir);
  });
  for (const auto& [key, cnt] : over) {
    report.violations.push_back({key.dir == Direction::In ? ViolationKind::DegreeIn
                                                          : ViolationKind::DegreeOut,
                                 key.vertex, key.color, std::nullopt, {}});
  }

  if (acyclic) {
    std::map<Color, std::vector<ArcId>> classes;
    for (ArcId a = 0; a < d.arc_count(); ++a) {
      if (auto c = gamma.color(a)) classes[*c].push_back(a);
    }
    for (const auto& [c, members] : classes) {
      std::vector<Vertex> verts;
      for (ArcId a : members) {
        verts.push_back(d.arc(a).tail);
        verts.push_back(d.arc(a).head);
      }
      std::sort(verts.begin(), verts.end());
      verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
      auto local = [&](Vertex v) {
        return static_cast<int>(std::lower_bound(verts.begin(), verts.end(), v) - verts.begin());
      };
      std::vector<std::vector<int>> adj(verts.size());
      for (ArcId a : members) adj[local(d.arc(a).tail)].push_back(local(d.arc(a).head));
      int ncomp = 0;
      auto comp = strongly_connected(adj, ncomp);
      std::vector<int> size(ncomp, 0), first(ncomp, -1);
      for (int v = 0; v < static_cast<int>(verts.size()); ++v) {
        ++size[comp[v]];
        if (first[comp[v]] == -1) first[comp[v]] = v;
      }
      for (int k = 0; k < ncomp; ++k) {
        if (size[k] < 2) continue;
        Violation viol{ViolationKind::MonochromaticDicycle, std::nullopt, c, std::nullopt, {}};
        for (int x : cycle_through(adj, comp, first[k])) viol.walk.push_back(verts[x]);
        viol.vertex = viol.walk.front();
        report.violations.push_back(std::move(viol));
      }
    }
  }

  if (lists) {
    for (ArcId a = 0; a < d.arc_count(); ++a) {
      auto c = gamma.color(a);
      if (c && !lists->contains(a, *c)) {
        report.violations.push_back(
            {ViolationKind::OffList, d.arc(a).tail, *c, a, {d.arc(a).tail, d.arc(a).head}});
      }
    }
  }
  return report;
}

std::optional<std::vector<Vertex>> monochromatic_dipath(const Digraph& d,
                                                        const PartialColoring& gamma,
                                                        Vertex from, Vertex to, Color c) {
  if (from == to) return std::vector<Vertex>{from};
  std::vector<int> parent(d.vertex_count(), -2);
  std::queue<Vertex> q;
  q.push(from);
  parent[from] = -1;
  while (!q.empty()) {
    Vertex x = q.front();
    q.pop();
    for (ArcId a : d.out_arcs(x)) {
      if (gamma.color(a) != c) continue;
      Vertex y = d.arc(a).head;
      if (parent[y] != -2) continue;
      parent[y] = static_cast<int>(x);
      if (y == to) {
        std::vector<Vertex> path;
        for (int z = static_cast<int>(y); z != -1; z = parent[z]) path.push_back(z);
        std::reverse(path.begin(), path.end());
        return path;
      }
      q.push(y);
    }
  }
  return std::nullopt;
}

bool has_monochromatic_dipath(const Digraph& d, const PartialColoring& gamma, Vertex from,
                              Vertex to, Color c) {
  return monochromatic_dipath(d, gamma, from, to, c).has_value();
}

std::vector<ArcId> color_neighbors(const Digraph& d, const ListAssignment& lists,
                                   const PartialColoring& gamma, Vertex v, Color c,
                                   Direction dir) {
  std::vector<ArcId> out;
  for (ArcId a : d.arcs_at(v, dir)) {
    if (!gamma.is_colored(a) && lists.contains(a, c)) out.push_back(a);
  }
  return out;
}

std::vector<ArcId> reserve_neighbors(const Digraph& d, const PartialColoring& gamma,
                                     const ReserveMap& reserve, Vertex v, Color c,
                                     Direction dir) {
  std::vector<ArcId> out;
  for (ArcId a : d.arcs_at(v, dir)) {
    if (gamma.is_colored(a)) continue;
    const Vertex other = dir == Direction::Out ? d.arc(a).head : d.arc(a).tail;
    if (std::binary_search(reserve[other].begin(), reserve[other].end(), c)) out.push_back(a);
  }
  return out;
}

ColoringReport is_compatible(const Digraph& d, const ListAssignment& lists,
                             const PartialColoring& gamma) {
  ColoringReport report;
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    auto c = gamma.color(a);
    if (!c) continue;
    const Arc& arc = d.arc(a);
    for (ArcId e : d.out_arcs(arc.tail)) {
      if (e != a && !gamma.is_colored(e) && lists.contains(e, *c)) {
        report.violations.push_back(
            {ViolationKind::BlockedColorListed, arc.tail, *c, e, {arc.tail, arc.head}});
      }
    }
    for (ArcId e : d.in_arcs(arc.head)) {
      if (e != a && !gamma.is_colored(e) && lists.contains(e, *c)) {
        report.violations.push_back(
            {ViolationKind::BlockedColorListed, arc.head, *c, e, {arc.tail, arc.head}});
      }
    }
  }

  // c-colored successors per (vertex, color), so return-path searches only
  // touch arcs of the queried color.
  std::unordered_map<OccupancyKey, std::vector<Vertex>, OccupancyKeyHash> succ;
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    if (auto c = gamma.color(a)) succ[{d.arc(a).tail, *c, Direction::Out}].push_back(d.arc(a).head);
  }
  std::vector<int> parent(d.vertex_count(), -2);
  std::vector<Vertex> touched;
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    if (gamma.is_colored(a)) continue;
    const Vertex u = d.arc(a).tail, v = d.arc(a).head;
    for (Color c : lists.at(a)) {
      std::queue<Vertex> q;
      q.push(v);
      parent[v] = -1;
      touched.assign(1, v);
      bool found = false;
      while (!q.empty() && !found) {
        Vertex x = q.front();
        q.pop();
        auto it = succ.find({x, c, Direction::Out});
        if (it == succ.end()) continue;
        for (Vertex y : it->second) {
          if (parent[y] != -2) continue;
          parent[y] = static_cast<int>(x);
          touched.push_back(y);
          if (y == u) {
            found = true;
            break;
          }
          q.push(y);
        }
      }
      if (found) {
        Violation viol{ViolationKind::ReturnPathColorListed, v, c, a, {}};
        for (int z = static_cast<int>(u); z != -1; z = parent[z]) viol.walk.push_back(z);
        std::reverse(viol.walk.begin(), viol.walk.end());
        report.violations.push_back(std::move(viol));
      }
      for (Vertex x : touched) parent[x] = -2;
    }
  }
  return report;
}

namespace {

std::string arc_key(const Arc& a) { return std::to_string(a.tail) + "," + std::to_string(a.head); }

ArcId arc_from_key(const Digraph& d, const std::string& key) {
  auto comma = key.find(',');
  if (comma == std::string::npos) throw InvalidInput("coloring", "bad arc key '" + key + "'");
  try {
    auto u = std::stoul(key.substr(0, comma));
    auto v = std::stoul(key.substr(comma + 1));
    if (auto a = d.find_arc(static_cast<Vertex>(u), static_cast<Vertex>(v))) return *a;
  } catch (const std::logic_error&) {
    throw InvalidInput("coloring", "bad arc key '" + key + "'");
  }
  throw InvalidInput("coloring", "arc " + key + " is not in the digraph");
}

}  // namespace

nlohmann::json coloring_to_json(const Digraph& d, const PartialColoring& gamma) {
  nlohmann::json colors = nlohmann::json::object();
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    auto c = gamma.color(a);
    colors[arc_key(d.arc(a))] = c ? nlohmann::json(*c) : nlohmann::json(nullptr);
  }
  return {{"colors", std::move(colors)}};
}

PartialColoring coloring_from_json(const Digraph& d, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("colors") || !j["colors"].is_object()) {
    throw InvalidInput("coloring", "expected {\"colors\": {\"u,v\": c | null}}");
  }
  PartialColoring gamma(d);
  for (const auto& [key, value] : j["colors"].items()) {
    ArcId a = arc_from_key(d, key);
    if (value.is_null()) continue;
    if (!value.is_number_unsigned()) throw InvalidInput("coloring", "color must be a nonnegative integer");
    gamma.assign(a, value.get<Color>());
  }
  return gamma;
}

nlohmann::json lists_to_json(const Digraph& d, const ListAssignment& lists) {
  nlohmann::json out = nlohmann::json::object();
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    out[arc_key(d.arc(a))] = std::vector<Color>(lists.at(a).begin(), lists.at(a).end());
  }
  return {{"lists", std::move(out)}};
}

ListAssignment lists_from_json(const Digraph& d, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("lists") || !j["lists"].is_object()) {
    throw InvalidInput("coloring", "expected {\"lists\": {\"u,v\": [c, ...]}}");
  }
  ListAssignment lists(d.arc_count());
  for (const auto& [key, value] : j["lists"].items()) {
    if (!value.is_array()) throw InvalidInput("coloring", "list for " + key + " must be an array");
    lists.set(arc_from_key(d, key), value.get<std::vector<Color>>());
  }
  return lists;
}

nlohmann::json report_to_json(const ColoringReport& report) {
  nlohmann::json v = nlohmann::json::array();
  for (const Violation& viol : report.violations) {
    nlohmann::json e{{"kind", to_string(viol.kind)}};
    if (viol.vertex) e["vertex"] = *viol.vertex;
    if (viol.color) e["color"] = *viol.color;
    if (viol.arc) e["arc"] = *viol.arc;
    if (!viol.walk.empty()) e["witness"] = viol.walk;
    v.push_back(std::move(e));
  }
  return {{"valid", report.valid()}, {"violations", std::move(v)}};
}

}  // namespace dlf
