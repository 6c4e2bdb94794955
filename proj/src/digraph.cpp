#include "dlf/digraph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dlf/rng.hpp"

namespace dlf {

namespace {

void build_csr(std::size_t n, const std::vector<Arc>& arcs, bool by_tail,
               std::vector<std::size_t>& off, std::vector<ArcId>& ids) {
  off.assign(n + 1, 0);
  for (const Arc& a : arcs) ++off[(by_tail ? a.tail : a.head) + 1];
  std::partial_sum(off.begin(), off.end(), off.begin());
  ids.resize(arcs.size());
  std::vector<std::size_t> cursor(off.begin(), off.end() - 1);
  for (ArcId id = 0; id < arcs.size(); ++id) {
    const Arc& a = arcs[id];
    ids[cursor[by_tail ? a.tail : a.head]++] = id;
  }
}

}  // namespace

Digraph::Digraph(std::size_t n, std::vector<Arc> arcs) : n_(n), arcs_(std::move(arcs)) {
  for (const Arc& a : arcs_) {
    if (a.tail >= n_ || a.head >= n_) {
      throw InvalidInput("digraph", "arc (" + std::to_string(a.tail) + "," +
                                        std::to_string(a.head) + ") out of range for n=" +
                                        std::to_string(n_));
    }
    if (a.tail == a.head) {
      throw InvalidInput("digraph", "loop at vertex " + std::to_string(a.tail));
    }
  }
  std::sort(arcs_.begin(), arcs_.end());
  auto dup = std::adjacent_find(arcs_.begin(), arcs_.end());
  if (dup != arcs_.end()) {
    throw InvalidInput("digraph", "parallel arc (" + std::to_string(dup->tail) + "," +
                                      std::to_string(dup->head) + ")");
  }
  build_csr(n_, arcs_, true, out_off_, out_ids_);
  build_csr(n_, arcs_, false, in_off_, in_ids_);
}

std::optional<ArcId> Digraph::find_arc(Vertex tail, Vertex head) const {
  auto it = std::lower_bound(arcs_.begin(), arcs_.end(), Arc{tail, head});
  if (it == arcs_.end() || *it != Arc{tail, head}) return std::nullopt;
  return static_cast<ArcId>(it - arcs_.begin());
}

std::vector<std::size_t> Multigraph::degrees() const {
  std::vector<std::size_t> deg(n, 0);
  for (auto [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

bool Multigraph::same_edges(const Multigraph& other) const {
  if (n != other.n || edges.size() != other.edges.size()) return false;
  auto norm = [](std::vector<std::pair<Vertex, Vertex>> e) {
    for (auto& [u, v] : e) {
      if (u > v) std::swap(u, v);
    }
    std::sort(e.begin(), e.end());
    return e;
  };
  return norm(edges) == norm(other.edges);
}

std::size_t max_degree(const Digraph& d) {
  std::size_t best = 0;
  for (Vertex v = 0; v < d.vertex_count(); ++v) {
    best = std::max({best, d.out_degree(v), d.in_degree(v)});
  }
  return best;
}

Multigraph underlying_multigraph(const Digraph& d) {
  Multigraph g;
  g.n = d.vertex_count();
  g.edges.reserve(d.arc_count());
  for (const Arc& a : d.arcs()) {
    g.edges.emplace_back(std::min(a.tail, a.head), std::max(a.tail, a.head));
  }
  return g;
}

Digraph symmetric_complete(std::size_t n) {
  std::vector<Arc> arcs;
  arcs.reserve(n * (n > 0 ? n - 1 : 0));
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = 0; v < n; ++v) {
      if (u != v) arcs.push_back({u, v});
    }
  }
  return Digraph(n, std::move(arcs));
}

Digraph directed_path(std::size_t n) {
  std::vector<Arc> arcs;
  for (Vertex v = 0; v + 1 < n; ++v) arcs.push_back({v, v + 1});
  return Digraph(n, std::move(arcs));
}

Digraph directed_cycle(std::size_t n) {
  if (n < 2) return Digraph(n, {});
  std::vector<Arc> arcs;
  for (Vertex v = 0; v < n; ++v) arcs.push_back({v, static_cast<Vertex>((v + 1) % n)});
  return Digraph(n, std::move(arcs));
}

Digraph random_regular_digraph(std::size_t n, std::size_t d, std::uint64_t seed,
                               std::size_t max_attempts) {
  if (n == 0) throw InvalidInput("digraph", "random_regular_digraph needs n >= 1");
  if (d >= n && d > 0) {
    throw InvalidInput("digraph", "random_regular_digraph needs d < n");
  }
  Rng rng = SeedStream(seed).child("random_regular_digraph").engine();
  std::vector<char> used(n * n, 0);
  auto allowed = [&](Vertex u, Vertex w) { return u != w && !used[u * n + w]; };

  std::size_t attempts = 0;
  std::vector<Vertex> target(n);
  std::size_t layer = 0;
  while (layer < d) {
    if (++attempts > max_attempts) {
      throw BudgetExhausted("digraph", "random_regular_digraph: no " + std::to_string(d) +
                                           "-regular digraph on " + std::to_string(n) +
                                           " vertices within " +
                                           std::to_string(max_attempts) + " attempts");
    }
    // Random out-slot -> in-slot matching for this layer, then local repair
    // by transpositions; a layer that cannot be repaired is rejected.
    std::iota(target.begin(), target.end(), Vertex{0});
    shuffle(target.begin(), target.end(), rng);
    auto pick = [&](Rng& r) { return static_cast<Vertex>(uniform_index(r, n)); };
    std::size_t budget = 20 * n * (d + 1);
    std::vector<Vertex> bad;
    for (Vertex v = 0; v < n; ++v) {
      if (!allowed(v, target[v])) bad.push_back(v);
    }
    while (!bad.empty() && budget > 0) {
      --budget;
      Vertex v = bad.back();
      if (allowed(v, target[v])) {
        bad.pop_back();
        continue;
      }
      Vertex u = pick(rng);
      if (u == v || !allowed(v, target[u])) continue;
      std::swap(target[u], target[v]);
      bad.pop_back();
      if (!allowed(u, target[u])) bad.push_back(u);
    }
    bool ok = bad.empty();
    if (!ok) {
      // Restart the whole construction: earlier layers may have boxed us in.
      std::fill(used.begin(), used.end(), 0);
      layer = 0;
      continue;
    }
    for (Vertex v = 0; v < n; ++v) used[v * n + target[v]] = 1;
    ++layer;
  }

  std::vector<Arc> arcs;
  arcs.reserve(n * d);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex w = 0; w < n; ++w) {
      if (used[u * n + w]) arcs.push_back({u, w});
    }
  }
  return Digraph(n, std::move(arcs));
}

Digraph random_bounded_digraph(std::size_t n, std::size_t max_deg, std::size_t proposals,
                               std::uint64_t seed) {
  std::vector<Arc> arcs;
  if (n < 2) return Digraph(n, {});
  Rng rng = SeedStream(seed).child("random_bounded_digraph").engine();
  auto pick = [&](Rng& r) { return static_cast<Vertex>(uniform_index(r, n)); };
  std::vector<std::size_t> outd(n, 0), ind(n, 0);
  std::vector<char> used(n * n, 0);
  for (std::size_t i = 0; i < proposals; ++i) {
    Vertex u = pick(rng), v = pick(rng);
    if (u == v || used[u * n + v] || outd[u] >= max_deg || ind[v] >= max_deg) continue;
    used[u * n + v] = 1;
    ++outd[u];
    ++ind[v];
    arcs.push_back({u, v});
  }
  return Digraph(n, std::move(arcs));
}

Multigraph random_even_regular_multigraph(std::size_t n, std::size_t k, std::uint64_t seed,
                                          std::size_t max_attempts) {
  if (n < 3 && k > 0) {
    throw InvalidInput("digraph", "random_even_regular_multigraph needs n >= 3");
  }
  Rng rng = SeedStream(seed).child("random_even_regular_multigraph").engine();
  std::vector<std::uint8_t> mult(n * n, 0);
  Multigraph g;
  g.n = n;
  std::vector<Vertex> order(n);
  std::size_t attempts = 0;
  for (std::size_t layer = 0; layer < k;) {
    if (++attempts > max_attempts) {
      throw BudgetExhausted("digraph", "random_even_regular_multigraph: retry budget exhausted");
    }
    std::iota(order.begin(), order.end(), Vertex{0});
    shuffle(order.begin(), order.end(), rng);
    auto full = [&](std::size_t i) {
      Vertex a = order[i], b = order[(i + 1) % n];
      return mult[std::min(a, b) * n + std::max(a, b)] >= 2;
    };
    // 2-opt repair: a saturated edge at position i is swapped together with
    // a random edge j for the two edges the reversal of order[i+1..j] creates.
    bool ok = false;
    for (std::size_t step = 0; step < 50 * n; ++step) {
      std::size_t i = 0;
      while (i < n && !full(i)) ++i;
      if (i == n) {
        ok = true;
        break;
      }
      std::size_t j = uniform_index(rng, n);
      std::size_t lo = std::min(i, j), hi = std::max(i, j);
      if (hi - lo < 2 || (lo == 0 && hi == n - 1)) continue;
      Vertex a = order[lo], b = order[lo + 1], c = order[hi], e = order[(hi + 1) % n];
      if (mult[std::min(a, c) * n + std::max(a, c)] >= 2 ||
          mult[std::min(b, e) * n + std::max(b, e)] >= 2) {
        continue;
      }
      std::reverse(order.begin() + static_cast<std::ptrdiff_t>(lo + 1),
                   order.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < n; ++i) {
      Vertex a = std::min(order[i], order[(i + 1) % n]);
      Vertex b = std::max(order[i], order[(i + 1) % n]);
      ++mult[a * n + b];
      g.edges.emplace_back(a, b);
    }
    ++layer;
  }
  return g;
}

Digraph eulerian_orientation(const Multigraph& g) {
  const std::size_t n = g.n;
  auto deg = g.degrees();
  for (Vertex v = 0; v < n; ++v) {
    if (deg[v] % 2 != 0) {
      throw InvalidInput("digraph", "eulerian_orientation: vertex " + std::to_string(v) +
                                        " has odd degree " + std::to_string(deg[v]));
    }
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(g.edges.size());
  for (auto [u, v] : g.edges) {
    if (u == v) throw InvalidInput("digraph", "eulerian_orientation: loop in multigraph");
    if (u >= n || v >= n) throw InvalidInput("digraph", "eulerian_orientation: vertex out of range");
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges.begin(), edges.end());

  std::vector<Arc> arcs;
  arcs.reserve(edges.size());
  std::vector<std::pair<Vertex, Vertex>> simple;
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    const std::size_t m = j - i;
    auto [u, v] = edges[i];
    if (m > 2) {
      throw InvalidInput("digraph", "eulerian_orientation: edge {" + std::to_string(u) + "," +
                                        std::to_string(v) + "} has multiplicity " +
                                        std::to_string(m) + "; parallel arcs unavoidable");
    }
    if (m == 2) {
      arcs.push_back({u, v});
      arcs.push_back({v, u});
    } else {
      simple.push_back(edges[i]);
    }
    i = j;
  }

  // Hierholzer on the simple remainder; every degree there is still even.
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> adj(n);
  for (std::size_t e = 0; e < simple.size(); ++e) {
    adj[simple[e].first].emplace_back(simple[e].second, e);
    adj[simple[e].second].emplace_back(simple[e].first, e);
  }
  std::vector<char> done(simple.size(), 0);
  std::vector<std::size_t> next(n, 0);
  for (Vertex start = 0; start < n; ++start) {
    if (next[start] == adj[start].size()) continue;
    // Walk closed trails; each traversed edge is oriented in walking direction.
    std::vector<Vertex> stack{start};
    while (!stack.empty()) {
      Vertex x = stack.back();
      while (next[x] < adj[x].size() && done[adj[x][next[x]].second]) ++next[x];
      if (next[x] == adj[x].size()) {
        stack.pop_back();
        continue;
      }
      auto [y, e] = adj[x][next[x]++];
      done[e] = 1;
      arcs.push_back({x, y});
      stack.push_back(y);
    }
  }
  return Digraph(n, std::move(arcs));
}

namespace {

std::size_t parse_uint(std::string_view tok, std::size_t line, std::size_t offset) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("expected a nonnegative integer, got '" + std::string(tok) + "'", line,
                     offset);
  }
  return value;
}

Digraph parse_edge_list(std::string_view text) {
  std::optional<std::size_t> n;
  std::vector<Arc> arcs;
  std::vector<std::size_t> arc_line;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, eol - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::pair<std::string_view, std::size_t>> toks;
    for (std::size_t i = 0; i < line.size();) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      if (j > i) toks.emplace_back(line.substr(i, j - i), pos + i);
      i = j;
    }
    if (!toks.empty()) {
      if (!n) {
        if (toks.size() != 1) {
          throw ParseError("first line must hold the vertex count only", line_no, toks[1].second);
        }
        n = parse_uint(toks[0].first, line_no, toks[0].second);
      } else {
        if (toks.size() != 2) {
          throw ParseError("arc line must be 'u v'", line_no, toks.front().second);
        }
        auto u = parse_uint(toks[0].first, line_no, toks[0].second);
        auto v = parse_uint(toks[1].first, line_no, toks[1].second);
        if (u >= *n || v >= *n) {
          throw ParseError("vertex out of range", line_no, toks[0].second);
        }
        if (u == v) throw ParseError("loop arc " + std::to_string(u) + "->" + std::to_string(v),
                                     line_no, toks[0].second);
        arcs.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
        arc_line.push_back(line_no);
      }
    }
    pos = eol + 1;
  }
  if (!n) throw ParseError("missing vertex count", line_no, text.size());

  std::vector<std::size_t> order(arcs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return arcs[a] < arcs[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (arcs[order[i]] == arcs[order[i - 1]]) {
      throw ParseError("duplicate arc " + std::to_string(arcs[order[i]].tail) + "->" +
                           std::to_string(arcs[order[i]].head),
                       arc_line[order[i]], 0);
    }
  }
  return Digraph(*n, std::move(arcs));
}

Digraph parse_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0, e.byte);
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("arcs") || !j["n"].is_number_unsigned() ||
      !j["arcs"].is_array()) {
    throw ParseError("expected {\"n\": int, \"arcs\": [[u,v],...]}", 0, 0);
  }
  const auto n = j["n"].get<std::size_t>();
  std::vector<Arc> arcs;
  std::size_t idx = 0;
  for (const auto& a : j["arcs"]) {
    if (!a.is_array() || a.size() != 2 || !a[0].is_number_unsigned() ||
        !a[1].is_number_unsigned()) {
      throw ParseError("arc entry must be [u, v]", 0, idx);
    }
    auto u = a[0].get<std::size_t>(), v = a[1].get<std::size_t>();
    if (u >= n || v >= n) throw ParseError("vertex out of range", 0, idx);
    if (u == v) throw ParseError("loop arc " + std::to_string(u) + "->" + std::to_string(v), 0, idx);
    arcs.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    ++idx;
  }
  auto sorted = arcs;
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end()) {
    throw ParseError("duplicate arc " + std::to_string(dup->tail) + "->" + std::to_string(dup->head),
                     0, 0);
  }
  return Digraph(n, std::move(arcs));
}

}  // namespace

Digraph parse_digraph(std::string_view text, GraphFormat format) {
  return format == GraphFormat::EdgeList ? parse_edge_list(text) : parse_json(text);
}

std::string serialize_digraph(const Digraph& d, GraphFormat format) {
  if (format == GraphFormat::Json) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const Arc& a : d.arcs()) arcs.push_back({a.tail, a.head});
    nlohmann::json j{{"n", d.vertex_count()}, {"arcs", std::move(arcs)}};
    return j.dump() + "\n";
  }
  std::ostringstream out;
  out << d.vertex_count() << '\n';
  for (const Arc& a : d.arcs()) out << a.tail << ' ' << a.head << '\n';
  return out.str();
}

}  // namespace dlf
