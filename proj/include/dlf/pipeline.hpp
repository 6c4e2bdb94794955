#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "dlf/finisher.hpp"
#include "dlf/nibble.hpp"
#include "dlf/reserve.hpp"

namespace dlf {

/// None skips the reserve: the nibble works on the full lists and every arc
/// it leaves uncolored is an error.
enum class ReserveProfile : std::uint8_t { Paper, Desk, None };
const char* to_string(ReserveProfile p);
ReserveProfile parse_reserve_profile(const std::string& s);

struct DecomposeConfig {
  std::uint64_t seed = 1;
  /// Uniform lists {0..list_size-1}; ignored when `lists` is set.
  std::size_t list_size = 0;
  std::optional<ListAssignment> lists;
  ReserveProfile reserve_profile = ReserveProfile::Desk;
  /// Unset: the desk knob value, or log⁴Δ/√Δ for the paper profile.
  std::optional<double> reserve_p;
  std::size_t reserve_max_tries = 100;
  DeskReserveKnobs knobs;
  bool reserve_strict = true;
  NibbleConfig nibble;
  StopRule stop = StopRule::parse("fraction:0");
  std::size_t finish_max_resamples = 0;
  /// Called after every accepted nibble iteration.
  IterationObserver observer;
};

struct DecomposeResult {
  /// Merged coloring; total unless the run failed.
  PartialColoring coloring;
  ListAssignment lists;
  std::optional<ReservePlan> plan;
  std::optional<ParameterTrajectory> trajectory;
  RunResult nibble;
  FinishInstance instance;
  FinishResult finish;
  ColoringReport report;
  std::size_t colors_used = 0;
  std::size_t nibble_colored = 0;
  bool valid() const { return report.valid() && coloring.colored_count() == coloring.arc_count(); }
};

/// Reserve, nibble on L0, finisher on Res, merge, validate against the
/// original lists. Module errors propagate unchanged.
DecomposeResult decompose(const Digraph& d, const DecomposeConfig& cfg);

nlohmann::json config_to_json(const DecomposeConfig& cfg);
/// Deterministic in (digraph, config): no timings or thread counts.
nlohmann::json decompose_stats_json(const DecomposeConfig& cfg, const DecomposeResult& r);

}  // namespace dlf
