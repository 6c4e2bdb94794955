#include "dlf/kernels.hpp"

#include <algorithm>

#ifdef DLF_HAVE_OPENMP
#include <omp.h>
#endif

#include "dlf/suspicious.hpp"

namespace dlf {

MonoIndex::MonoIndex(const Digraph& d, const PartialColoring& gamma, const Assignment& assigned) {
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    const Arc& arc = d.arc(a);
    if (auto c = gamma.color(a)) {
      into_[{arc.head, *c, Direction::In}].push_back({arc.tail, false});
    } else if (assigned[a]) {
      into_[{arc.head, *assigned[a], Direction::In}].push_back({arc.tail, true});
    }
  }
}

bool MonoIndex::danger_monochromatic(Vertex u, Vertex v, Color c, std::size_t ell) const {
  std::vector<Vertex> path{u};
  return search(u, v, c, 0, ell, path);
}

// Backward from the current first vertex x; k assigned arcs used so far.
bool MonoIndex::search(Vertex x, Vertex v, Color c, std::size_t k, std::size_t ell,
                       std::vector<Vertex>& path) const {
  auto it = into_.find({x, c, Direction::In});
  if (it == into_.end()) return false;
  for (const Entry& e : it->second) {
    const Vertex y = e.tail;
    if (std::find(path.begin(), path.end(), y) != path.end()) continue;
    const std::size_t k2 = k + (e.assigned ? 1 : 0);
    if (k2 > ell) continue;
    if (e.assigned && k2 == ell) return true;        // tail path, first arc assigned
    if (y == v && k2 >= 1 && k2 < ell) return true;  // v -> u path
    if (k2 == ell) continue;
    path.push_back(y);
    bool found = search(y, v, c, k2, ell, path);
    path.pop_back();
    if (found) return true;
  }
  return false;
}

namespace {

std::vector<Color> merged_reserve(const ReserveMap& reserve, Vertex a, Vertex b) {
  std::vector<Color> out;
  std::set_union(reserve[a].begin(), reserve[a].end(), reserve[b].begin(), reserve[b].end(),
                 std::back_inserter(out));
  return out;
}

template <class Mono>
void threats_for_arc(const Digraph& d, const ListAssignment& lists, const ReserveMap* reserve,
                     ArcId a, Mono&& mono, ThreatSets& out) {
  const Vertex x = d.arc(a).tail, y = d.arc(a).head;
  for (Color c : lists.at(a)) {
    if (mono(a, c)) out.x[a].push_back(c);
  }
  if (!reserve) return;
  for (Color c : merged_reserve(*reserve, x, y)) {
    const bool at_head = std::binary_search((*reserve)[y].begin(), (*reserve)[y].end(), c);
    const bool at_tail = std::binary_search((*reserve)[x].begin(), (*reserve)[x].end(), c);
    if (!mono(a, c)) continue;
    if (at_head) out.z_head[a].push_back(c);
    if (at_tail) out.z_tail[a].push_back(c);
  }
}

ThreatSets empty_threats(std::size_t m) {
  ThreatSets t;
  t.x.resize(m);
  t.z_head.resize(m);
  t.z_tail.resize(m);
  return t;
}

}  // namespace

ThreatSets detect_threats(const Digraph& d, const ListAssignment& lists,
                          const PartialColoring& gamma, const Assignment& assigned,
                          const ReserveMap* reserve, std::size_t ell, Exec exec) {
  ThreatSets out = empty_threats(d.arc_count());
  const MonoIndex index(d, gamma, assigned);
  auto mono = [&](ArcId a, Color c) {
    return index.danger_monochromatic(d.arc(a).tail, d.arc(a).head, c, ell);
  };
  const auto m = static_cast<std::int64_t>(d.arc_count());
  if (exec == Exec::Parallel) {
    // Each iteration writes only its own arc's slots.
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t a = 0; a < m; ++a) {
      if (!gamma.is_colored(static_cast<ArcId>(a))) {
        threats_for_arc(d, lists, reserve, static_cast<ArcId>(a), mono, out);
      }
    }
  } else {
    for (std::int64_t a = 0; a < m; ++a) {
      if (!gamma.is_colored(static_cast<ArcId>(a))) {
        threats_for_arc(d, lists, reserve, static_cast<ArcId>(a), mono, out);
      }
    }
  }
  return out;
}

ThreatSets detect_threats_reference(const Digraph& d, const ListAssignment& lists,
                                    const PartialColoring& gamma, const Assignment& assigned,
                                    const ReserveMap* reserve, std::size_t ell) {
  ThreatSets out = empty_threats(d.arc_count());
  auto mono = [&](ArcId a, Color c) {
    for (const SuspiciousPath& p : danger_set(d, lists, gamma, a, c, ell)) {
      bool all = true;
      for (std::size_t i : p.uncolored_positions) {
        auto f = d.find_arc(p.vertices[i], p.vertices[i + 1]);
        if (assigned[*f] != c) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  };
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    if (!gamma.is_colored(a)) threats_for_arc(d, lists, reserve, a, mono, out);
  }
  return out;
}

int kernel_threads() {
#ifdef DLF_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace dlf
