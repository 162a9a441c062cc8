#pragma once

#include <json.hpp>

namespace raceopt {

// Fixed constants of a 1/10-scale car. Only mass and CoG position vary
// between candidates; everything here is pinned per experiment.
struct VehicleConstants {
  double wheelbase_m = 0.3302;
  double inertia_z_kgm2 = 0.04712;
  double cornering_stiffness_front = 4.718;  // C_Sf [1/rad]
  double cornering_stiffness_rear = 5.4562;  // C_Sr [1/rad]
  double cog_height_m = 0.074;
  double friction_mu = 1.0489;
  double steer_min_rad = -0.4189;
  double steer_max_rad = 0.4189;
  double steer_rate_max_radps = 3.2;
  double a_long_max_mps2 = 9.51;
  double v_min_mps = 0.0;
  double v_max_mps = 20.0;
  double v_switch_mps = 0.5;  // pure kinematic at or below
  double v_blend_mps = 0.1;   // kinematic/dynamic blend width above v_switch
  double gravity_mps2 = 9.81;

  void validate() const;
};

void to_json(nlohmann::json& j, const VehicleConstants& c);
void from_json(const nlohmann::json& j, VehicleConstants& c);

struct VehicleParams {
  double mass_kg = 3.74;
  double l_f_m = 0.15875;
  VehicleConstants constants;

  double wheelbase() const { return constants.wheelbase_m; }
  double l_r_m() const { return constants.wheelbase_m - l_f_m; }
  void validate() const;
};

struct VehicleState {
  double x_m = 0.0;
  double y_m = 0.0;
  double yaw_rad = 0.0;
  double v_mps = 0.0;
  double steer_rad = 0.0;
  double yaw_rate_radps = 0.0;
  double slip_angle_rad = 0.0;

  bool finite() const;
  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ControlInput {
  double steer_rate_cmd_radps = 0.0;
  double accel_cmd_mps2 = 0.0;
  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct TrackingGains {
  double k_steer = 30.0;  // [1/s]
  double k_speed = 8.0;   // [1/s]
};

inline constexpr double kDefaultTimeStep = 0.01;

// Saturates steer rate and acceleration; no drive past the speed limits
// and no steering further into a steer stop.
ControlInput clamp_input(const ControlInput& input, const VehicleState& state, const VehicleParams& params);

// Proportional conversion of a (steer angle, speed) target into plant input.
ControlInput steer_and_speed_to_input(double desired_steer_rad, double desired_speed_mps,
                                      const VehicleState& state, const TrackingGains& gains = {});

// State derivative of the blended single-track model for an already
// clamped input, in state field order.
VehicleState single_track_derivative(const VehicleState& state, const VehicleParams& params,
                                     const ControlInput& input);

// One RK4 step. Throws SimulationFault on non-finite state, input or result.
VehicleState step(const VehicleState& state, const VehicleParams& params, const ControlInput& input,
                  double dt_s = kDefaultTimeStep);

}  // namespace raceopt
