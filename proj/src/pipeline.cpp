#include "dlf/pipeline.hpp"

#include <set>

namespace dlf {

const char* to_string(ReserveProfile p) {
  switch (p) {
    case ReserveProfile::Paper: return "paper";
    case ReserveProfile::Desk: return "desk";
    case ReserveProfile::None: return "none";
  }
  return "unknown";
}

ReserveProfile parse_reserve_profile(const std::string& s) {
  if (s == "paper") return ReserveProfile::Paper;
  if (s == "desk") return ReserveProfile::Desk;
  if (s == "none") return ReserveProfile::None;
  throw InvalidInput("pipeline", "unknown reserve profile '" + s + "'");
}

namespace {

double reserve_probability(const DecomposeConfig& cfg, std::size_t delta) {
  if (cfg.reserve_p) return *cfg.reserve_p;
  if (cfg.reserve_profile == ReserveProfile::Paper) {
    return paper_reserve_probability(delta, cfg.nibble.log_base);
  }
  return cfg.knobs.p_res;
}

}  // namespace

DecomposeResult decompose(const Digraph& d, const DecomposeConfig& cfg) {
  DecomposeResult r;
  r.lists = cfg.lists ? *cfg.lists : ListAssignment::uniform(d.arc_count(), cfg.list_size);
  if (r.lists.arc_count() != d.arc_count()) {
    throw InvalidInput("pipeline", "list assignment does not match the digraph");
  }
  const std::size_t delta = max_degree(d);
  const SeedStream root(cfg.seed);

  ListAssignment l0 = r.lists, res(d.arc_count());
  if (cfg.reserve_profile != ReserveProfile::None) {
    ReserveBounds bounds = cfg.reserve_profile == ReserveProfile::Paper
                               ? paper_reserve_bounds(delta, cfg.nibble.log_base)
                               : desk_reserve_bounds(delta, cfg.knobs);
    bounds.strict = cfg.reserve_strict;
    r.plan = retry_until_valid(d, r.lists, reserve_probability(cfg, delta), bounds,
                               root.child("reserve").seed(), cfg.reserve_max_tries);
    std::tie(l0, res) = split_lists(d, r.lists, *r.plan);
  }

  if (cfg.nibble.profile == Profile::Paper) {
    r.trajectory = compute_trajectory(delta, cfg.nibble.log_base);
  }
  r.nibble = run(d, std::move(l0), r.trajectory ? &*r.trajectory : nullptr,
                 root.child("nibble").seed(), cfg.nibble, cfg.stop,
                 r.plan ? &r.plan->reserve_of : nullptr, cfg.observer);
  r.coloring = r.nibble.gamma;
  r.nibble_colored = r.coloring.colored_count();

  if (cfg.reserve_profile == ReserveProfile::None) {
    if (r.nibble_colored != d.arc_count()) {
      throw BudgetExhausted("pipeline", std::to_string(d.arc_count() - r.nibble_colored) +
                                            " arcs left uncolored and no reserve to finish them");
    }
  } else {
    r.instance = build_instance(d, r.coloring, res);
    r.finish = finish(r.instance, root.child("finisher").seed(), cfg.finish_max_resamples);
    for (std::size_t e = 0; e < r.finish.colors.size(); ++e) {
      r.coloring.assign(r.instance.arc_of_edge[e], r.finish.colors[e]);
    }
  }

  r.report = validate_coloring(d, r.coloring, 1, 1, true, &r.lists);
  std::set<Color> used;
  for (ArcId a = 0; a < d.arc_count(); ++a) {
    if (auto c = r.coloring.color(a)) used.insert(*c);
  }
  r.colors_used = used.size();
  return r;
}

nlohmann::json config_to_json(const DecomposeConfig& cfg) {
  nlohmann::json j{{"seed", cfg.seed},
                   {"list_size", cfg.lists ? nlohmann::json(nullptr) : nlohmann::json(cfg.list_size)},
                   {"explicit_lists", cfg.lists.has_value()},
                   {"reserve_profile", to_string(cfg.reserve_profile)},
                   {"reserve_max_tries", cfg.reserve_max_tries},
                   {"reserve_strict", cfg.reserve_strict},
                   {"desk_knobs",
                    {{"p_res", cfg.knobs.p_res},
                     {"a_frac", cfg.knobs.a_frac},
                     {"b_frac", cfg.knobs.b_frac},
                     {"b_min", cfg.knobs.b_min},
                     {"c_frac", cfg.knobs.c_frac}}},
                   {"nibble",
                    {{"profile", to_string(cfg.nibble.profile)},
                     {"p", cfg.nibble.p},
                     {"log_base", to_string(cfg.nibble.log_base)},
                     {"ell", cfg.nibble.ell_int},
                     {"path_cap", cfg.nibble.path_cap},
                     {"max_retries", cfg.nibble.max_retries},
                     {"verify", cfg.nibble.verify}}},
                   {"stop", cfg.stop.describe()},
                   {"finish_max_resamples", cfg.finish_max_resamples}};
  j["reserve_p"] = cfg.reserve_p ? nlohmann::json(*cfg.reserve_p) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json decompose_stats_json(const DecomposeConfig& cfg, const DecomposeResult& r) {
  nlohmann::json iterations = nlohmann::json::array();
  std::size_t clamps = 0;
  for (const auto& st : r.nibble.stats) {
    iterations.push_back(stats_to_json(st));
    clamps += st.clamp_events;
  }
  nlohmann::json j{{"config", config_to_json(cfg)},
                   {"summary",
                    {{"arcs", r.coloring.arc_count()},
                     {"colors_used", r.colors_used},
                     {"iterations", r.nibble.stats.size()},
                     {"stop_reason", r.nibble.stop_reason},
                     {"nibble_colored", r.nibble_colored},
                     {"finisher_colored", r.finish.colors.size()},
                     {"clamp_events", clamps},
                     {"resamples", r.finish.resamples},
                     {"valid", r.valid()}}},
                   {"iterations", std::move(iterations)},
                   {"finisher", finish_summary_json(r.instance, r.finish)},
                   {"violations", report_to_json(r.report)}};
  if (r.plan) {
    j["reserve"] = {{"seed", r.plan->seed},
                    {"attempts", r.plan->attempts},
                    {"p_res", r.plan->p_res},
                    {"plan", reserve_to_json(*r.plan)["reserve"]}};
  } else {
    j["reserve"] = nullptr;
  }
  return j;
}

}  // namespace dlf
