#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "raceopt/controllers.hpp"
#include "raceopt/param_space.hpp"
#include "raceopt/raceline.hpp"
#include "raceopt/track.hpp"
#include "raceopt/vehicle.hpp"

namespace raceopt {

inline constexpr double kDnfPenalty = 99999.0;

enum class CrashReason { None, OffTrack, ControllerFault, Timeout, NonFinite };
std::string_view crash_reason_name(CrashReason r);

struct TrajectorySample {
  double t_s;
  double x_m;
  double y_m;
  double yaw_rad;
  double v_mps;
  double steer_rad;
  double slip_angle_rad;
  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

struct LapResult {
  double score_s = kDnfPenalty;
  bool success = false;
  int laps_completed = 0;
  CrashReason crash_reason = CrashReason::None;
  std::vector<TrajectorySample> trajectory;
  friend bool operator==(const LapResult&, const LapResult&) = default;
};

struct SimConfig {
  double dt_s = kDefaultTimeStep;
  double t_max_s = 300.0;
  int laps_required = 2;
  double vehicle_half_width_m = 0.15;
  double lqr_horizon_dt_s = 0.1;
  TrackingGains gains;
  VehicleConstants vehicle;
  RacelineOptions raceline;
  bool record_trajectory = false;
};

// Unwraps a stream of wrapped arc positions into signed progress. Reverse
// motion across the start line decrements progress, so oscillating at the
// line never earns a lap.
class LapCounter {
 public:
  explicit LapCounter(double length) : length_(length) {}
  void add(double s_wrapped);
  double unwrapped() const { return unwrapped_; }
  int laps() const;

 private:
  double length_;
  double unwrapped_ = 0.0;
  double last_ = 0.0;
  bool started_ = false;
};

int count_laps(std::span<const double> s_positions, double length);

// Two-lap rollout of one candidate from a standing start at raceline s = 0.
// Deterministic: depends only on its arguments.
LapResult evaluate(const Candidate& candidate, const Track& track, const SearchSpace& space,
                   const SimConfig& config);

// Rollout with explicit parts, shared by evaluate and replay tooling.
LapResult simulate(const VehicleParams& vehicle, const ControllerConfig& controller, const Raceline& raceline,
                   const Track& track, const SimConfig& config);

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectorySample>& trajectory);

}  // namespace raceopt
