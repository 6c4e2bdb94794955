#include "dlf/nibble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace dlf {

namespace {

bool in_sorted(const std::vector<Color>& v, Color c) {
  return std::binary_search(v.begin(), v.end(), c);
}

// Uncolored arcs at v on side `dir` grouped by listed color, colors ascending.
std::vector<std::pair<Color, std::vector<ArcId>>> color_groups(const NibbleState& s, Vertex v,
                                                               Direction dir) {
  std::vector<std::pair<Color, ArcId>> pairs;
  for (ArcId a : s.d->arcs_at(v, dir)) {
    if (s.gamma.is_colored(a)) continue;
    for (Color c : s.lists.at(a)) pairs.emplace_back(c, a);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::pair<Color, std::vector<ArcId>>> groups;
  for (const auto& [c, a] : pairs) {
    if (groups.empty() || groups.back().first != c) groups.emplace_back(c, std::vector<ArcId>{});
    groups.back().second.push_back(a);
  }
  return groups;
}

std::size_t neighbors_excluding(const NibbleState& s, Vertex v, Direction dir, Color c, ArcId e) {
  std::size_t n = 0;
  for (ArcId f : s.d->arcs_at(v, dir)) {
    if (f != e && !s.gamma.is_colored(f) && s.lists.contains(f, c)) ++n;
  }
  return n;
}

bool conflicted(const NibbleState& s, const Assignment& assigned, ArcId e) {
  const Color c = *assigned[e];
  const Arc& arc = s.d->arc(e);
  for (ArcId f : s.d->out_arcs(arc.tail)) {
    if (f != e && assigned[f] == c) return true;
  }
  for (ArcId f : s.d->in_arcs(arc.head)) {
    if (f != e && assigned[f] == c) return true;
  }
  return false;
}

Coin range_policy(double raw, Profile profile, double tolerance, const char* what) {
  Coin coin{raw, false};
  if (raw >= 0 && raw <= 1) return coin;
  if (profile == Profile::Paper && (raw < -tolerance || raw > 1 + tolerance)) {
    std::ostringstream msg;
    msg << what << " = " << raw << " lies outside [0,1]";
    throw ProbabilityRange("nibble", msg.str());
  }
  coin.value = std::clamp(raw, 0.0, 1.0);
  coin.clamped = profile == Profile::Desk;
  return coin;
}

// Probability that e keeps the forced color c through conflict resolution.
double predicted_retention(const NibbleState& s, const IterationParams& ip, const NibbleConfig& cfg,
                           ArcId e, Color c) {
  const Arc& arc = s.d->arc(e);
  double none = 1;
  for (Direction dir : {Direction::Out, Direction::In}) {
    const Vertex w = dir == Direction::Out ? arc.tail : arc.head;
    for (ArcId f : s.d->arcs_at(w, dir)) {
      if (f == e || s.gamma.is_colored(f) || !s.lists.contains(f, c)) continue;
      none *= 1 - cfg.p / static_cast<double>(s.lists.size(f));
    }
  }
  const double P = retention_probability(s, ip, cfg.p, e, c);
  return none * (1 - eq_coin(ip, P, cfg.profile, cfg.probability_tolerance).value);
}

}  // namespace

std::size_t resolve_ell(const Digraph& d, const NibbleConfig& cfg) {
  if (cfg.ell_int) return cfg.ell_int;
  const std::size_t delta = max_degree(d);
  if (delta < 2) return 2;
  const long double ell = 2 * log_in(static_cast<long double>(delta), cfg.log_base);
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(ell)));
}

RealizedSizes realized_sizes(const NibbleState& s) {
  RealizedSizes r;
  bool first = true;
  for (ArcId a = 0; a < s.d->arc_count(); ++a) {
    if (s.gamma.is_colored(a)) continue;
    const std::size_t k = s.lists.size(a);
    r.min_list = first ? k : std::min(r.min_list, k);
    r.max_list = std::max(r.max_list, k);
    r.empty_lists += k == 0;
    first = false;
  }
  for (Vertex v = 0; v < s.d->vertex_count(); ++v) {
    for (Direction dir : {Direction::In, Direction::Out}) {
      for (const auto& [c, arcs] : color_groups(s, v, dir)) {
        r.max_neighbors = std::max(r.max_neighbors, arcs.size());
      }
      if (!s.reserve) continue;
      std::map<Color, std::size_t> count;
      for (ArcId a : s.d->arcs_at(v, dir)) {
        if (s.gamma.is_colored(a)) continue;
        const Vertex w = dir == Direction::Out ? s.d->arc(a).head : s.d->arc(a).tail;
        for (Color c : (*s.reserve)[w]) ++count[c];
      }
      for (auto [c, k] : count) r.max_reserve = std::max(r.max_reserve, k);
    }
  }
  return r;
}

IterationParams iteration_params(const NibbleState& s, const NibbleConfig& cfg) {
  IterationParams ip;
  if (cfg.profile == Profile::Paper) {
    if (!s.traj) throw InvalidInput("nibble", "paper profile needs a parameter trajectory");
    if (s.iter >= s.traj->records.size()) {
      throw InvalidInput("nibble", "iteration " + std::to_string(s.iter) + " is past i0");
    }
    const auto& r = s.traj->records[s.iter];
    return {r.L, r.N, r.R, r.retain, r.keep};
  }
  const RealizedSizes rs = realized_sizes(s);
  ip.L = static_cast<long double>(rs.max_list);
  ip.N = static_cast<long double>(std::max<std::size_t>(rs.max_neighbors, 1));
  ip.R = static_cast<long double>(rs.max_reserve);
  if (rs.max_list == 0) return ip;
  ip.retain = retain_value(cfg.p, ip.L, ip.N);
  ip.keep = keep_value(cfg.p, ip.L, ip.N, ip.retain);
  return ip;
}

double retention_probability(const NibbleState& s, const IterationParams& ip, double p, ArcId e,
                             Color c) {
  const Arc& arc = s.d->arc(e);
  const std::size_t m = neighbors_excluding(s, arc.tail, Direction::Out, c, e) +
                        neighbors_excluding(s, arc.head, Direction::In, c, e);
  if (m == 0) return 1;
  return std::exp(static_cast<double>(m) * std::log1p(-p / static_cast<double>(ip.L)));
}

Coin eq_coin(const IterationParams& ip, double P, Profile profile, double tolerance) {
  const double r2 = static_cast<double>(ip.retain * ip.retain);
  return range_policy(1 - r2 / P, profile, tolerance, "Eq");
}

Coin vq_coin(const IterationParams& ip, double p, std::size_t neighborhood, Profile profile,
             double tolerance) {
  const double r2 = static_cast<double>(ip.retain * ip.retain);
  const double denom = 1 - p / static_cast<double>(ip.L) * static_cast<double>(neighborhood) * r2;
  return range_policy(1 - static_cast<double>(ip.keep) / denom, profile, tolerance, "Vq");
}

std::pair<NibbleState, IterationStats> iterate(const NibbleState& s, const NibbleConfig& cfg,
                                               SeedStream stream) {
  const Digraph& d = *s.d;
  const std::size_t m = d.arc_count();
  IterationStats st;
  st.iteration = s.iter;
  st.uncolored_before = s.uncolored_count();
  NibbleState next = s;
  next.iter = s.iter + 1;
  if (st.uncolored_before == 0) {
    st.after = realized_sizes(next);
    return {std::move(next), std::move(st)};
  }
  const IterationParams ip = iteration_params(s, cfg);
  st.params = ip;
  const std::size_t ell = resolve_ell(d, cfg);
  Rng rng = stream.engine();

  // (I) activation and (II) assignment from the lists as they stand.
  std::vector<char> active(m, 0);
  for (ArcId a = 0; a < m; ++a) {
    if (!s.gamma.is_colored(a)) active[a] = bernoulli(rng, cfg.p);
  }
  Assignment assigned(m);
  for (ArcId a = 0; a < m; ++a) {
    if (!active[a]) continue;
    ++st.activations;
    const auto list = s.lists.at(a);
    if (list.empty()) continue;
    assigned[a] = list[uniform_index(rng, list.size())];
    ++st.assignments;
  }

  // (V) is judged on this frozen snapshot, before any list changes.
  const ThreatSets threats = detect_threats(d, s.lists, s.gamma, assigned, s.reserve, ell, cfg.exec);

  // (III) conflicts and the equalizing coin.
  std::vector<char> keeps(m, 0);
  for (ArcId a = 0; a < m; ++a) {
    if (!assigned[a]) continue;
    if (conflicted(s, assigned, a)) {
      ++st.conflict_uncolorings;
      continue;
    }
    const double P = retention_probability(s, ip, cfg.p, a, *assigned[a]);
    const Coin coin = eq_coin(ip, P, cfg.profile, cfg.probability_tolerance);
    st.clamp_events += coin.clamped;
    if (bernoulli(rng, coin.value)) {
      ++st.eq_uncolorings;
    } else {
      keeps[a] = 1;
    }
  }

  // (IV) list updates per (vertex, side, color).
  std::vector<std::pair<ArcId, Color>> drop_retained, drop_coin;
  for (Vertex v = 0; v < d.vertex_count(); ++v) {
    for (Direction dir : {Direction::In, Direction::Out}) {
      for (const auto& [c, group] : color_groups(s, v, dir)) {
        std::optional<ArcId> holder;
        for (ArcId a : group) {
          if (keeps[a] && assigned[a] == c) holder = a;
        }
        if (holder) {
          for (ArcId a : group) {
            if (a != *holder) drop_retained.emplace_back(a, c);
          }
          continue;
        }
        const Coin coin = vq_coin(ip, cfg.p, group.size(), cfg.profile, cfg.probability_tolerance);
        st.clamp_events += coin.clamped;
        if (bernoulli(rng, coin.value)) {
          for (ArcId a : group) drop_coin.emplace_back(a, c);
        }
      }
    }
  }

  // (V) cycle prevention.
  std::vector<std::pair<ArcId, Color>> drop_cycle;
  for (ArcId a = 0; a < m; ++a) {
    for (Color c : threats.x[a]) {
      drop_cycle.emplace_back(a, c);
      if (keeps[a] && assigned[a] == c) {
        keeps[a] = 0;
        ++st.step5_uncolorings;
      }
    }
  }

  for (auto [a, c] : drop_retained) st.removals_step4_retained += next.lists.remove(a, c);
  for (auto [a, c] : drop_coin) st.removals_step4_coin += next.lists.remove(a, c);
  for (auto [a, c] : drop_cycle) st.removals_step5 += next.lists.remove(a, c);
  for (ArcId a = 0; a < m; ++a) {
    if (keeps[a]) {
      next.gamma.assign(a, *assigned[a]);
      ++st.retained;
    }
    if (next.gamma.is_colored(a)) next.lists.clear(a);
  }

  // X, Y, Z sizes.
  std::map<std::tuple<Vertex, Color, Direction>, std::uint32_t> y, z;
  for (ArcId a = 0; a < m; ++a) {
    const Arc& arc = d.arc(a);
    if (!threats.x[a].empty()) {
      st.x_sizes.emplace_back(a, static_cast<std::uint32_t>(threats.x[a].size()));
      st.max_x = std::max(st.max_x, threats.x[a].size());
    }
    for (Color c : threats.x[a]) {
      ++y[{arc.tail, c, Direction::Out}];
      ++y[{arc.head, c, Direction::In}];
    }
    for (Color c : threats.z_head[a]) ++z[{arc.tail, c, Direction::Out}];
    for (Color c : threats.z_tail[a]) ++z[{arc.head, c, Direction::In}];
  }
  for (const auto& [k, n] : y) {
    st.y_sizes.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), n});
    st.max_y = std::max<std::size_t>(st.max_y, n);
  }
  for (const auto& [k, n] : z) {
    st.z_sizes.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), n});
    st.max_z = std::max<std::size_t>(st.max_z, n);
  }

  st.uncolored_after = next.uncolored_count();
  st.after = realized_sizes(next);
  return {std::move(next), std::move(st)};
}

StopRule StopRule::parse(const std::string& text) {
  StopRule r;
  std::string head = text, tail;
  if (auto comma = text.find(','); comma != std::string::npos) {
    head = text.substr(0, comma);
    tail = text.substr(comma + 1);
  }
  auto value = [&](const std::string& s, const std::string& prefix) {
    if (s.rfind(prefix, 0) != 0) return std::string();
    return s.substr(prefix.size());
  };
  try {
    if (head == "i0") {
      r.kind = Kind::ReachI0;
    } else if (auto v = value(head, "fraction:"); !v.empty()) {
      r.kind = Kind::UncoloredFraction;
      r.theta = std::stod(v);
    } else if (auto v2 = value(head, "list:"); !v2.empty()) {
      r.kind = Kind::ListSize;
      r.sigma = std::stoul(v2);
    } else {
      throw InvalidInput("nibble", "unknown stop rule '" + text + "'");
    }
    if (!tail.empty()) {
      auto v = value(tail, "max:");
      if (v.empty()) throw InvalidInput("nibble", "unknown stop rule suffix '" + tail + "'");
      r.max_iterations = std::stoul(v);
    }
  } catch (const std::logic_error&) {
    throw InvalidInput("nibble", "malformed stop rule '" + text + "'");
  }
  return r;
}

std::string StopRule::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::ReachI0: out << "i0"; break;
    case Kind::UncoloredFraction: out << "fraction:" << theta; break;
    case Kind::ListSize: out << "list:" << sigma; break;
  }
  out << ",max:" << max_iterations;
  return out.str();
}

InvariantReport check_step_invariants(const NibbleState& before, const NibbleState& after) {
  const Digraph& d = *before.d;
  InvariantReport rep;
  rep.coloring = validate_coloring(d, after.gamma, 1, 1, true);
  rep.compatibility = is_compatible(d, after.lists, after.gamma);
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    if (auto c = before.gamma.color(a)) {
      if (after.gamma.color(a) != c) ++rep.extension_violations;
    } else if (auto c2 = after.gamma.color(a)) {
      if (!before.lists.contains(a, *c2)) ++rep.extension_violations;
    }
    for (Color c : after.lists.at(a)) {
      if (!before.lists.contains(a, c)) ++rep.extension_violations;
    }
  }
  for (Vertex v = 0; v < d.vertex_count(); ++v) {
    for (Direction dir : {Direction::In, Direction::Out}) {
      std::vector<Color> taken;
      for (ArcId a : d.arcs_at(v, dir)) {
        if (auto c = after.gamma.color(a)) taken.push_back(*c);
      }
      std::sort(taken.begin(), taken.end());
      for (ArcId a : d.arcs_at(v, dir)) {
        if (after.gamma.is_colored(a)) continue;
        for (Color c : after.lists.at(a)) rep.discipline_violations += in_sorted(taken, c);
      }
    }
  }
  return rep;
}

namespace {

std::string stop_met(const NibbleState& s, const StopRule& stop, const RealizedSizes& rs) {
  const std::size_t m = s.d->arc_count();
  const std::size_t unc = s.uncolored_count();
  switch (stop.kind) {
    case StopRule::Kind::ReachI0:
      if (!s.traj) throw InvalidInput("nibble", "stop rule i0 needs a parameter trajectory");
      if (s.iter >= s.traj->i0) return "reached i0";
      break;
    case StopRule::Kind::UncoloredFraction:
      if (m == 0 || static_cast<double>(unc) <= stop.theta * static_cast<double>(m)) {
        return "uncolored fraction";
      }
      break;
    case StopRule::Kind::ListSize:
      if (rs.max_list <= stop.sigma) return "list size";
      break;
  }
  if (unc == rs.empty_lists) return "no listed uncolored arc";
  if (s.iter >= stop.max_iterations) return "max iterations";
  return {};
}

void paper_truncate(NibbleState& s, std::size_t i) {
  const auto& rec = s.traj->records.at(i);
  const auto target = static_cast<std::size_t>(std::floor(rec.L));
  for (ArcId a = 0; a < s.d->arc_count(); ++a) {
    if (s.gamma.is_colored(a)) continue;
    if (s.lists.size(a) < target) {
      throw ClaimViolation("nibble", "list size claim fails at iteration " + std::to_string(i) +
                                         ": arc " + std::to_string(a) + " has " +
                                         std::to_string(s.lists.size(a)) + " < " +
                                         std::to_string(target) + " colors");
    }
    s.lists.truncate_smallest(a, target);
  }
  const RealizedSizes rs = realized_sizes(s);
  if (static_cast<long double>(rs.max_neighbors) > rec.N) {
    throw ClaimViolation("nibble", "color-neighbor claim fails at iteration " + std::to_string(i) +
                                       ": " + std::to_string(rs.max_neighbors) + " > N_i");
  }
  if (s.reserve && static_cast<long double>(rs.max_reserve) > rec.R) {
    throw ClaimViolation("nibble", "reserve-neighbor claim fails at iteration " +
                                       std::to_string(i) + ": " +
                                       std::to_string(rs.max_reserve) + " > R_i");
  }
}

}  // namespace

RunResult run(const Digraph& d, ListAssignment l0, const ParameterTrajectory* traj,
              std::uint64_t seed, const NibbleConfig& cfg, const StopRule& stop,
              const ReserveMap* reserve, const IterationObserver& observer) {
  if (l0.arc_count() != d.arc_count()) {
    throw InvalidInput("nibble", "list assignment does not match the digraph");
  }
  NibbleState s(d, std::move(l0));
  s.traj = traj;
  s.reserve = reserve;
  const bool paper = cfg.profile == Profile::Paper;
  if (paper) {
    if (!traj) throw InvalidInput("nibble", "paper profile needs a parameter trajectory");
    paper_truncate(s, 0);
  }
  const SeedStream root = SeedStream(seed).child("nibble");
  RunResult result;
  for (;;) {
    const RealizedSizes rs = realized_sizes(s);
    std::string reason = stop_met(s, stop, rs);
    if (!reason.empty()) {
      result.stop_reason = reason;
      break;
    }
    if (paper && s.iter >= traj->i0) {
      throw BudgetExhausted("nibble", "trajectory exhausted at i0 = " + std::to_string(traj->i0) +
                                          " before the stop rule held");
    }
    std::optional<std::pair<NibbleState, IterationStats>> done;
    const std::size_t tries = paper ? 1 : cfg.max_retries + 1;
    for (std::size_t attempt = 0; attempt < tries && !done; ++attempt) {
      auto [next, st] = iterate(s, cfg, root.child(s.iter).child(attempt));
      st.attempt = attempt;
      if (cfg.verify && !check_step_invariants(s, next).ok()) {
        if (paper) {
          throw ClaimViolation("nibble", "step invariants fail at iteration " + std::to_string(s.iter));
        }
        continue;
      }
      if (paper) paper_truncate(next, s.iter + 1);
      done.emplace(std::move(next), std::move(st));
    }
    if (!done) {
      throw BudgetExhausted("nibble", "iteration " + std::to_string(s.iter) + " failed its invariants " +
                                          std::to_string(tries) + " times");
    }
    if (observer) observer(s, done->first, done->second);
    result.stats.push_back(std::move(done->second));
    s = std::move(done->first);
  }
  result.gamma = std::move(s.gamma);
  result.lists = std::move(s.lists);
  return result;
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

// Everything that can influence e = uv during one round: arcs at u (out) and
// v (in), plus the arcs those compete with.
struct LocalUniverse {
  std::vector<ArcId> all;    // sorted
  std::vector<ArcId> focus;  // sorted; uncolored arcs of N+(u) ∪ N-(v)
};

LocalUniverse local_universe(const NibbleState& s, ArcId e) {
  LocalUniverse u;
  const Arc& arc = s.d->arc(e);
  auto add = [&](std::vector<ArcId>& into, std::span<const ArcId> arcs) {
    for (ArcId a : arcs) {
      if (!s.gamma.is_colored(a)) into.push_back(a);
    }
  };
  add(u.focus, s.d->out_arcs(arc.tail));
  add(u.focus, s.d->in_arcs(arc.head));
  std::sort(u.focus.begin(), u.focus.end());
  u.focus.erase(std::unique(u.focus.begin(), u.focus.end()), u.focus.end());
  u.all = u.focus;
  for (ArcId f : u.focus) {
    add(u.all, s.d->out_arcs(s.d->arc(f).tail));
    add(u.all, s.d->in_arcs(s.d->arc(f).head));
  }
  std::sort(u.all.begin(), u.all.end());
  u.all.erase(std::unique(u.all.begin(), u.all.end()), u.all.end());
  return u;
}

struct LocalOutcome {
  std::optional<Color> assigned;
  bool retained = false;
  std::size_t kept = 0;
};

// One round of steps (I)-(IV) restricted to the universe; `scratch` is an
// all-empty Assignment of size m and is restored before returning.
LocalOutcome simulate_local(const NibbleState& s, const IterationParams& ip,
                            const NibbleConfig& cfg, ArcId e, const LocalUniverse& uni, Rng& rng,
                            Assignment& scratch, std::vector<char>& keeps) {
  for (ArcId a : uni.all) scratch[a].reset();
  std::vector<char> act(uni.all.size());
  for (std::size_t i = 0; i < uni.all.size(); ++i) act[i] = bernoulli(rng, cfg.p);
  for (std::size_t i = 0; i < uni.all.size(); ++i) {
    const auto list = s.lists.at(uni.all[i]);
    if (act[i] && !list.empty()) scratch[uni.all[i]] = list[uniform_index(rng, list.size())];
  }
  for (ArcId f : uni.focus) {
    keeps[f] = 0;
    if (!scratch[f] || conflicted(s, scratch, f)) continue;
    const double P = retention_probability(s, ip, cfg.p, f, *scratch[f]);
    keeps[f] = !bernoulli(rng, eq_coin(ip, P, cfg.profile, cfg.probability_tolerance).value);
  }
  LocalOutcome out;
  out.assigned = scratch[e];
  out.retained = keeps[e] != 0;
  const Arc& arc = s.d->arc(e);
  for (Color c : s.lists.at(e)) {
    bool removed = false;
    for (Direction dir : {Direction::Out, Direction::In}) {
      const Vertex w = dir == Direction::Out ? arc.tail : arc.head;
      std::size_t size = 0;
      std::optional<ArcId> holder;
      for (ArcId f : s.d->arcs_at(w, dir)) {
        if (s.gamma.is_colored(f) || !s.lists.contains(f, c)) continue;
        ++size;
        if (keeps[f] && scratch[f] == c) holder = f;
      }
      if (holder) {
        removed = removed || *holder != e;
      } else {
        const Coin coin = vq_coin(ip, cfg.p, size, cfg.profile, cfg.probability_tolerance);
        removed = bernoulli(rng, coin.value) || removed;
      }
    }
    out.kept += !removed;
  }
  for (ArcId a : uni.all) scratch[a].reset();
  return out;
}

template <class Body>
void for_trials(std::size_t trials, Exec exec, Body&& body) {
  const auto n = static_cast<std::int64_t>(trials);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < n; ++t) body(static_cast<std::size_t>(t));
  } else {
    for (std::int64_t t = 0; t < n; ++t) body(static_cast<std::size_t>(t));
  }
}

void require_uncolored_listed(const NibbleState& s, ArcId e, std::optional<Color> c) {
  if (e >= s.d->arc_count() || s.gamma.is_colored(e)) {
    throw InvalidInput("nibble", "Monte Carlo target must be an uncolored arc");
  }
  if (c && !s.lists.contains(e, *c)) throw InvalidInput("nibble", "forced color is not listed");
}

}  // namespace

RetentionEstimate estimate_retention(const NibbleState& s, const IterationParams& ip,
                                     const NibbleConfig& cfg, ArcId e, Color c,
                                     std::size_t trials, std::uint64_t seed, Exec exec) {
  require_uncolored_listed(s, e, c);
  RetentionEstimate est;
  est.trials = trials;
  est.predicted = predicted_retention(s, ip, cfg, e, c);
  const Arc& arc = s.d->arc(e);
  std::vector<ArcId> rivals;
  for (Direction dir : {Direction::Out, Direction::In}) {
    const Vertex w = dir == Direction::Out ? arc.tail : arc.head;
    for (ArcId f : s.d->arcs_at(w, dir)) {
      if (f != e && !s.gamma.is_colored(f) && s.lists.contains(f, c)) rivals.push_back(f);
    }
  }
  std::sort(rivals.begin(), rivals.end());
  const double eq =
      eq_coin(ip, retention_probability(s, ip, cfg.p, e, c), cfg.profile, cfg.probability_tolerance)
          .value;
  const SeedStream root = SeedStream(seed).child("retention");
  std::size_t retained = 0;
  auto body = [&](std::size_t t, std::size_t& acc) {
    Rng rng = root.child(t).engine();
    bool conflict = false;
    for (ArcId f : rivals) {
      const bool act = bernoulli(rng, cfg.p);
      if (!act) continue;
      const auto list = s.lists.at(f);
      conflict = (list[uniform_index(rng, list.size())] == c) || conflict;
    }
    if (!conflict && !bernoulli(rng, eq)) ++acc;
  };
  const auto n = static_cast<std::int64_t>(trials);
  if (exec == Exec::Parallel) {
#pragma omp parallel for reduction(+ : retained) schedule(static)
    for (std::int64_t t = 0; t < n; ++t) body(static_cast<std::size_t>(t), retained);
  } else {
    for (std::int64_t t = 0; t < n; ++t) body(static_cast<std::size_t>(t), retained);
  }
  est.retained = retained;
  return est;
}

double ListSizeEstimate::stddev_of_mean() const {
  if (trials < 2) return 0;
  const double n = static_cast<double>(trials);
  const double var = (sum_sq - sum * sum / n) / (n - 1);
  return std::sqrt(std::max(var, 0.0) / n);
}

namespace {

struct LocalTally {
  std::vector<std::uint64_t> assigned_by, retained_by;  // indexed like L(e)
  std::uint64_t kept_sum = 0, kept_sq = 0;
};

LocalTally tally_local(const NibbleState& s, const IterationParams& ip, const NibbleConfig& cfg,
                       ArcId e, std::size_t trials, std::uint64_t seed, Exec exec) {
  require_uncolored_listed(s, e, std::nullopt);
  const std::size_t m = s.d->arc_count();
  const LocalUniverse uni = local_universe(s, e);
  const SeedStream root = SeedStream(seed).child("local-round").child(e);
  const auto list = s.lists.at(e);
  // Integer accumulators keep the serial and parallel results identical.
  LocalTally tally;
  tally.assigned_by.assign(list.size(), 0);
  tally.retained_by.assign(list.size(), 0);
#pragma omp parallel if (exec == Exec::Parallel)
  {
    Assignment scratch(m);
    std::vector<char> keeps(m, 0);
    LocalTally mine;
    mine.assigned_by.assign(list.size(), 0);
    mine.retained_by.assign(list.size(), 0);
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
      Rng rng = root.child(static_cast<std::uint64_t>(t)).engine();
      const LocalOutcome o = simulate_local(s, ip, cfg, e, uni, rng, scratch, keeps);
      mine.kept_sum += o.kept;
      mine.kept_sq += o.kept * o.kept;
      if (o.assigned) {
        const auto idx = static_cast<std::size_t>(
            std::lower_bound(list.begin(), list.end(), *o.assigned) - list.begin());
        ++mine.assigned_by[idx];
        mine.retained_by[idx] += o.retained;
      }
    }
#pragma omp critical
    {
      tally.kept_sum += mine.kept_sum;
      tally.kept_sq += mine.kept_sq;
      for (std::size_t i = 0; i < list.size(); ++i) {
        tally.assigned_by[i] += mine.assigned_by[i];
        tally.retained_by[i] += mine.retained_by[i];
      }
    }
  }
  return tally;
}

}  // namespace

ListSizeEstimate estimate_list_size(const NibbleState& s, const IterationParams& ip,
                                    const NibbleConfig& cfg, ArcId e, std::size_t trials,
                                    std::uint64_t seed, Exec exec) {
  const LocalTally t = tally_local(s, ip, cfg, e, trials, seed, exec);
  ListSizeEstimate est;
  est.trials = trials;
  est.lower_bound = static_cast<double>(ip.L * ip.keep * ip.keep);
  est.sum = static_cast<double>(t.kept_sum);
  est.sum_sq = static_cast<double>(t.kept_sq);
  return est;
}

std::vector<ArcRetention> retention_statistics(const NibbleState& s, const IterationParams& ip,
                                               const NibbleConfig& cfg,
                                               const std::vector<ArcId>& arcs,
                                               std::size_t trials, std::uint64_t seed, Exec exec) {
  std::vector<ArcRetention> out;
  for (ArcId e : arcs) {
    const LocalTally t = tally_local(s, ip, cfg, e, trials, seed, exec);
    const auto list = s.lists.at(e);
    ArcRetention r;
    r.arc = e;
    for (std::size_t i = 0; i < list.size(); ++i) {
      r.assigned += t.assigned_by[i];
      r.retained += t.retained_by[i];
      const double q = predicted_retention(s, ip, cfg, e, list[i]);
      r.expected_retained += static_cast<double>(t.assigned_by[i]) * q;
      r.variance += static_cast<double>(t.assigned_by[i]) * q * (1 - q);
    }
    r.mean_list = trials ? static_cast<double>(t.kept_sum) / static_cast<double>(trials) : 0;
    out.push_back(r);
  }
  return out;
}

std::size_t count_path_monochromatic(const NibbleState& s, const NibbleConfig& cfg,
                                     const SuspiciousPath& path, std::size_t trials,
                                     std::uint64_t seed, Exec exec) {
  if (!is_suspicious(*s.d, s.lists, s.gamma, path)) {
    throw InvalidInput("nibble", "planted path is not suspicious in this state");
  }
  std::vector<ArcId> unc;
  for (std::size_t i : path.uncolored_positions) {
    unc.push_back(*s.d->find_arc(path.vertices[i], path.vertices[i + 1]));
  }
  const SeedStream root = SeedStream(seed).child("path");
  std::size_t hits = 0;
  auto body = [&](std::size_t t, std::size_t& acc) {
    Rng rng = root.child(t).engine();
    bool mono = true;
    for (ArcId a : unc) {
      const bool act = bernoulli(rng, cfg.p);
      const auto list = s.lists.at(a);
      const bool hit = act && list[uniform_index(rng, list.size())] == path.color;
      mono = mono && hit;
    }
    acc += mono;
  };
  const auto n = static_cast<std::int64_t>(trials);
  if (exec == Exec::Parallel) {
#pragma omp parallel for reduction(+ : hits) schedule(static)
    for (std::int64_t t = 0; t < n; ++t) body(static_cast<std::size_t>(t), hits);
  } else {
    for (std::int64_t t = 0; t < n; ++t) body(static_cast<std::size_t>(t), hits);
  }
  return hits;
}

nlohmann::json params_to_json(const IterationParams& ip) {
  return {{"L", static_cast<double>(ip.L)},
          {"N", static_cast<double>(ip.N)},
          {"R", static_cast<double>(ip.R)},
          {"Retain", static_cast<double>(ip.retain)},
          {"Keep", static_cast<double>(ip.keep)}};
}

nlohmann::json stats_to_json(const IterationStats& st) {
  auto keys = [](const std::vector<KeyCount>& v) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& k : v) j.push_back({k.vertex, k.color, to_string(k.dir), k.count});
    return j;
  };
  nlohmann::json x = nlohmann::json::array();
  for (auto [a, n] : st.x_sizes) x.push_back({a, n});
  return {{"iteration", st.iteration},
          {"attempt", st.attempt},
          {"params", params_to_json(st.params)},
          {"uncolored_before", st.uncolored_before},
          {"uncolored_after", st.uncolored_after},
          {"activations", st.activations},
          {"assignments", st.assignments},
          {"retained", st.retained},
          {"conflict_uncolorings", st.conflict_uncolorings},
          {"eq_uncolorings", st.eq_uncolorings},
          {"cycle_uncolorings", st.step5_uncolorings},
          {"removals_update_retained", st.removals_step4_retained},
          {"removals_update_coin", st.removals_step4_coin},
          {"removals_cycle", st.removals_step5},
          {"clamp_events", st.clamp_events},
          {"min_list", st.after.min_list},
          {"max_list", st.after.max_list},
          {"empty_lists", st.after.empty_lists},
          {"max_color_neighbors", st.after.max_neighbors},
          {"max_reserve_neighbors", st.after.max_reserve},
          {"max_X", st.max_x},
          {"max_Y", st.max_y},
          {"max_Z", st.max_z},
          {"X", std::move(x)},
          {"Y", keys(st.y_sizes)},
          {"Z", keys(st.z_sizes)}};
}

}  // namespace dlf
