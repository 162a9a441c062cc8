#include "raceopt/evaluator.hpp"

#include <cmath>

#include "raceopt/error.hpp"
#include "raceopt/io.hpp"

namespace raceopt {

std::string_view crash_reason_name(CrashReason r) {
  switch (r) {
    case CrashReason::None:
      return "none";
    case CrashReason::OffTrack:
      return "off_track";
    case CrashReason::ControllerFault:
      return "controller_fault";
    case CrashReason::Timeout:
      return "timeout";
    case CrashReason::NonFinite:
      return "non_finite";
  }
  return "unknown";
}

void LapCounter::add(double s) {
  if (!started_) {
    started_ = true;
    unwrapped_ = s;
    last_ = s;
    return;
  }
  double delta = s - last_;
  if (delta > 0.5 * length_) delta -= length_;
  if (delta < -0.5 * length_) delta += length_;
  unwrapped_ += delta;
  last_ = s;
}

int LapCounter::laps() const { return static_cast<int>(std::floor(unwrapped_ / length_)); }

int count_laps(std::span<const double> s_positions, double length) {
  LapCounter counter(length);
  for (double s : s_positions) counter.add(wrap_periodic(s, length));
  return std::max(0, counter.laps());
}

LapResult simulate(const VehicleParams& vehicle, const ControllerConfig& controller, const Raceline& raceline,
                   const Track& track, const SimConfig& config) {
  LapResult result;
  VehicleState state;
  const auto start = raceline.at(0.0);
  state.x_m = start.position.x;
  state.y_m = start.position.y;
  state.yaw_rad = start.heading;

  const double length = track.length();
  const double s_start = track.project({state.x_m, state.y_m}).s;
  LapCounter counter(length);
  counter.add(0.0);

  const auto max_steps = static_cast<long>(std::llround(config.t_max_s / config.dt_s));
  auto record = [&](long k) {
    if (!config.record_trajectory) return;
    result.trajectory.push_back({static_cast<double>(k) * config.dt_s, state.x_m, state.y_m, state.yaw_rad,
                                 state.v_mps, state.steer_rad, state.slip_angle_rad});
  };
  record(0);

  for (long k = 1; k <= max_steps; ++k) {
    try {
      const SteerCommand cmd = compute_command(controller, state, vehicle, raceline);
      const ControlInput input = steer_and_speed_to_input(cmd.steer_rad, cmd.speed_mps, state, config.gains);
      state = step(state, vehicle, input, config.dt_s);
    } catch (const ControllerFault&) {
      result.crash_reason = CrashReason::ControllerFault;
      break;
    } catch (const SimulationFault&) {
      result.crash_reason = CrashReason::NonFinite;
      break;
    }
    record(k);

    const auto proj = track.project({state.x_m, state.y_m});
    const double half_width = proj.d >= 0.0 ? track.width_left(proj.s) : track.width_right(proj.s);
    if (std::abs(proj.d) > half_width - config.vehicle_half_width_m) {
      result.crash_reason = CrashReason::OffTrack;
      break;
    }
    counter.add(wrap_periodic(proj.s - s_start, length));
    result.laps_completed = std::max(0, counter.laps());
    if (result.laps_completed >= config.laps_required) {
      result.success = true;
      result.score_s = static_cast<double>(k) * config.dt_s;
      return result;
    }
  }
  if (result.crash_reason == CrashReason::None) result.crash_reason = CrashReason::Timeout;
  result.score_s = kDnfPenalty;
  return result;
}

LapResult evaluate(const Candidate& candidate, const Track& track, const SearchSpace& space,
                   const SimConfig& config) {
  VehicleParams vehicle;
  vehicle.mass_kg = candidate.mass_kg;
  vehicle.l_f_m = candidate.cog_to_front_m;
  vehicle.constants = config.vehicle;
  vehicle.validate();

  const ControllerConfig controller =
      ControllerConfig::from_vector(space.controller_kind(), candidate.controller_params, config.lqr_horizon_dt_s);
  RacelineOptions rl = config.raceline;
  rl.a_long_max = config.vehicle.a_long_max_mps2;
  const Raceline raceline = build_raceline(track, candidate.perturbs_m, candidate.v_min_mps, candidate.v_max_mps, rl);
  return simulate(vehicle, controller, raceline, track, config);
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectorySample>& trajectory) {
  io::CsvWriter w(path);
  w.header({"t", "x", "y", "yaw", "v", "steer", "slip_angle"});
  for (const auto& s : trajectory) {
    w.row(std::vector<double>{s.t_s, s.x_m, s.y_m, s.yaw_rad, s.v_mps, s.steer_rad, s.slip_angle_rad});
  }
}

}  // namespace raceopt
