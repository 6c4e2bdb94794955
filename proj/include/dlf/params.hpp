#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlf/types.hpp"

namespace dlf {

enum class LogBase : std::uint8_t { Natural, Base2 };
const char* to_string(LogBase b);

/// Arithmetic used while evaluating the recursion. Records are stored as
/// long double whichever is chosen.
enum class Precision : std::uint8_t { Double, Extended, Quad };
const char* to_string(Precision p);

struct TrajectoryRecord {
  long double L = 0, N = 0, R = 0, retain = 0, keep = 0;
};

struct ParameterTrajectory {
  std::uint64_t delta = 0;
  long double p = 0.25L;
  LogBase log_base = LogBase::Natural;
  Precision precision = Precision::Extended;
  long double log_delta = 0;
  /// Real-valued horizon 2 log(delta).
  long double ell = 0;
  /// records[i] for 0 <= i <= i0.
  std::vector<TrajectoryRecord> records;
  std::size_t i0 = 0;

  /// max(2, ceil(ell)): the integer path-length horizon of the cycle tweak.
  std::size_t ell_int() const;
};

class TrajectoryAborted : public Error {
 public:
  TrajectoryAborted(const std::string& what, std::size_t at) : Error("params", what), at_(at) {}
  std::size_t iteration() const noexcept { return at_; }

 private:
  std::size_t at_;
};

long double log_in(long double x, LogBase base);

/// Evaluates the recursion until L_i < 3 log^7 delta. Throws TrajectoryAborted
/// when L_i turns nonpositive or `max_iterations` steps pass without reaching
/// the threshold; InvalidInput when delta < 2.
ParameterTrajectory compute_trajectory(std::uint64_t delta, LogBase base = LogBase::Natural,
                                       Precision precision = Precision::Extended,
                                       std::size_t max_iterations = 1'000'000);

/// Retain = (1 - p/L)^(N-1) and Keep = 1 - p (N/L) Retain^2, evaluated in
/// long double through log1p.
long double retain_value(long double p, long double L, long double N);
long double keep_value(long double p, long double L, long double N, long double retain);

struct BoundCheck {
  std::string name;
  bool passed = true;
  /// Smallest relative slack over the checked indices; negative when failing.
  long double worst_margin = 0;
  std::size_t worst_index = 0;
  std::string detail;
};

struct SizeBoundsReport {
  std::vector<BoundCheck> checks;
  bool all_passed() const;
};

/// The five inequalities on (L, N, R) at i0 and along the trajectory:
///   min(L_i0, N_i0, R_i0) > log^7, R_i0 <= 3 log^7.5, R_i/L_i <= log,
///   L_i > N_i, N_i > L_i/2.
SizeBoundsReport check_size_bounds(const ParameterTrajectory& traj);

nlohmann::json trajectory_to_json(const ParameterTrajectory& traj);
nlohmann::json size_report_to_json(const SizeBoundsReport& report);

}  // namespace dlf
