#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlf/kernels.hpp"
#include "dlf/params.hpp"
#include "dlf/rng.hpp"
#include "dlf/suspicious.hpp"

namespace dlf {

struct NibbleConfig {
  Profile profile = Profile::Desk;
  double p = 0.25;
  LogBase log_base = LogBase::Natural;
  /// 0 derives max(2, ceil(2 log Δ)) from the digraph.
  std::size_t ell_int = 0;
  std::size_t path_cap = kDefaultPathCap;
  /// Desk profile: fresh-randomness retries of one iteration.
  std::size_t max_retries = 16;
  /// Paper profile: coins within this distance of [0,1] are clamped silently.
  double probability_tolerance = 1e-12;
  /// Run the structural validators after every iteration.
  bool verify = true;
  Exec exec = Exec::Parallel;
};

/// The L_i, N_i, R_i, Retain_i, Keep_i in force for one iteration: trajectory
/// values (paper profile) or values realized from the current state (desk).
struct IterationParams {
  long double L = 0, N = 0, R = 0, retain = 1, keep = 1;
};

struct NibbleState {
  const Digraph* d = nullptr;
  ListAssignment lists;
  PartialColoring gamma;
  std::size_t iter = 0;
  const ParameterTrajectory* traj = nullptr;
  const ReserveMap* reserve = nullptr;

  NibbleState() = default;
  NibbleState(const Digraph& digraph, ListAssignment l)
      : d(&digraph), lists(std::move(l)), gamma(digraph) {}

  std::size_t uncolored_count() const { return d->arc_count() - gamma.colored_count(); }
};

std::size_t resolve_ell(const Digraph& d, const NibbleConfig& cfg);

/// Realized maxima over uncolored arcs: max |L(e)|, max |N±(v,c)|, max |R±(v,c)|.
struct RealizedSizes {
  std::size_t min_list = 0, max_list = 0, max_neighbors = 0, max_reserve = 0;
  std::size_t empty_lists = 0;
};
RealizedSizes realized_sizes(const NibbleState& s);

IterationParams iteration_params(const NibbleState& s, const NibbleConfig& cfg);

/// P(e,c) = (1 - p/L)^(|N+(u,c) \ {e}| + |N-(v,c) \ {e}|).
double retention_probability(const NibbleState& s, const IterationParams& ip, double p, ArcId e,
                             Color c);

struct Coin {
  double value = 0;
  bool clamped = false;
};

/// 1 - Retain^2 / P. Desk clamps into [0,1]; paper throws ProbabilityRange
/// beyond the tolerance.
Coin eq_coin(const IterationParams& ip, double P, Profile profile, double tolerance = 1e-12);
/// 1 - Keep / (1 - (p/L) size Retain^2), same range policy.
Coin vq_coin(const IterationParams& ip, double p, std::size_t neighborhood, Profile profile,
             double tolerance = 1e-12);

struct KeyCount {
  Vertex vertex;
  Color color;
  Direction dir;
  std::uint32_t count;
};

struct IterationStats {
  std::size_t iteration = 0;
  std::size_t attempt = 0;
  IterationParams params;
  std::size_t uncolored_before = 0, uncolored_after = 0;
  std::size_t activations = 0, assignments = 0;
  std::size_t conflict_uncolorings = 0, eq_uncolorings = 0, step5_uncolorings = 0;
  std::size_t retained = 0;
  std::size_t removals_step4_retained = 0, removals_step4_coin = 0, removals_step5 = 0;
  std::size_t clamp_events = 0;
  /// Realized sizes after the iteration (L', N'±, R'±).
  RealizedSizes after;
  /// Nonzero |X(e)| as (arc, size).
  std::vector<std::pair<ArcId, std::uint32_t>> x_sizes;
  /// Nonzero |Y±(v,c)|, |Z±(v,c)|.
  std::vector<KeyCount> y_sizes, z_sizes;
  std::size_t max_x = 0, max_y = 0, max_z = 0;

  bool consistent() const {
    return activations >= assignments &&
           assignments == retained + conflict_uncolorings + eq_uncolorings + step5_uncolorings;
  }
};

/// One round of activation, assignment, conflict resolution, list update and
/// cycle prevention. Deterministic in (state, stream).
std::pair<NibbleState, IterationStats> iterate(const NibbleState& s, const NibbleConfig& cfg,
                                               SeedStream stream);

struct StopRule {
  enum class Kind : std::uint8_t { ReachI0, UncoloredFraction, ListSize };
  Kind kind = Kind::UncoloredFraction;
  double theta = 0;
  std::size_t sigma = 0;
  std::size_t max_iterations = 1000;

  /// "i0", "fraction:<theta>", "list:<sigma>"; optional ",max:<n>".
  static StopRule parse(const std::string& text);
  std::string describe() const;
};

struct InvariantReport {
  ColoringReport coloring;
  ColoringReport compatibility;
  std::size_t extension_violations = 0;
  std::size_t discipline_violations = 0;
  bool ok() const {
    return coloring.valid() && compatibility.valid() && extension_violations == 0 &&
           discipline_violations == 0;
  }
};

/// Extension, (1,1)+acyclic, compatibility (which includes "no monochromatic
/// return path for a listed color") and the list-update discipline.
InvariantReport check_step_invariants(const NibbleState& before, const NibbleState& after);

struct RunResult {
  PartialColoring gamma;
  ListAssignment lists;
  std::vector<IterationStats> stats;
  std::string stop_reason;
};

using IterationObserver =
    std::function<void(const NibbleState& before, const NibbleState& after, const IterationStats&)>;

/// Iterates until the stop rule holds or no uncolored arc has a nonempty
/// list. Paper profile truncates lists to floor(L_{i+1}) after each round
/// (largest tokens go first) and throws ClaimViolation when a size claim
/// fails. Desk profile retries a round whose invariants fail.
RunResult run(const Digraph& d, ListAssignment l0, const ParameterTrajectory* traj,
              std::uint64_t seed, const NibbleConfig& cfg, const StopRule& stop,
              const ReserveMap* reserve = nullptr, const IterationObserver& observer = {});

// Monte Carlo re-executions of the first rounds from a fixed state.

struct RetentionEstimate {
  std::size_t trials = 0;
  std::size_t retained = 0;
  /// Exact retention probability of the forced assignment under the list
  /// sizes in force: prod over conflicting neighbors f of (1 - p/|L(f)|),
  /// times (1 - Eq(e,c)).
  double predicted = 0;
  double frequency() const { return trials ? static_cast<double>(retained) / trials : 0; }
};

/// Forces e to be activated with color c and resamples everything else.
RetentionEstimate estimate_retention(const NibbleState& s, const IterationParams& ip,
                                     const NibbleConfig& cfg, ArcId e, Color c,
                                     std::size_t trials, std::uint64_t seed, Exec exec);

struct ListSizeEstimate {
  std::size_t trials = 0;
  double sum = 0, sum_sq = 0;
  /// L_i * Keep_i^2.
  double lower_bound = 0;
  double mean() const { return trials ? sum / trials : 0; }
  double stddev_of_mean() const;
};

/// |L'(e)| after the list update, e's own retained color counting as kept.
ListSizeEstimate estimate_list_size(const NibbleState& s, const IterationParams& ip,
                                    const NibbleConfig& cfg, ArcId e, std::size_t trials,
                                    std::uint64_t seed, Exec exec);

/// Frequency with which every uncolored arc of `path` is activated and
/// assigned its color.
std::size_t count_path_monochromatic(const NibbleState& s, const NibbleConfig& cfg,
                                     const SuspiciousPath& path, std::size_t trials,
                                     std::uint64_t seed, Exec exec);

/// Spec-level summary: per sampled arc, the natural (unforced) retention
/// frequency of its assigned color and the mean |L'(e)|.
struct ArcRetention {
  ArcId arc;
  std::size_t assigned = 0, retained = 0;
  double expected_retained = 0, variance = 0;
  double mean_list = 0;
};
std::vector<ArcRetention> retention_statistics(const NibbleState& s, const IterationParams& ip,
                                               const NibbleConfig& cfg,
                                               const std::vector<ArcId>& arcs,
                                               std::size_t trials, std::uint64_t seed, Exec exec);

nlohmann::json stats_to_json(const IterationStats& st);
nlohmann::json params_to_json(const IterationParams& ip);

}  // namespace dlf
