#include "raceopt/vehicle.hpp"

#include <algorithm>
#include <cmath>

#include "raceopt/error.hpp"

namespace raceopt {

void VehicleConstants::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("vehicle constant must be positive: ") + name);
  };
  positive(wheelbase_m, "wheelbase_m");
  positive(inertia_z_kgm2, "inertia_z_kgm2");
  positive(cornering_stiffness_front, "cornering_stiffness_front");
  positive(cornering_stiffness_rear, "cornering_stiffness_rear");
  positive(cog_height_m, "cog_height_m");
  positive(friction_mu, "friction_mu");
  positive(steer_rate_max_radps, "steer_rate_max_radps");
  positive(a_long_max_mps2, "a_long_max_mps2");
  positive(v_max_mps, "v_max_mps");
  positive(v_switch_mps, "v_switch_mps");
  positive(v_blend_mps, "v_blend_mps");
  positive(gravity_mps2, "gravity_mps2");
  if (!(steer_min_rad < steer_max_rad)) throw ConfigError("steer limits must satisfy min < max");
  if (!(v_min_mps < v_max_mps)) throw ConfigError("speed limits must satisfy min < max");
}

void to_json(nlohmann::json& j, const VehicleConstants& c) {
  j = nlohmann::json{{"wheelbase_m", c.wheelbase_m},
                     {"inertia_z_kgm2", c.inertia_z_kgm2},
                     {"cornering_stiffness_front", c.cornering_stiffness_front},
                     {"cornering_stiffness_rear", c.cornering_stiffness_rear},
                     {"cog_height_m", c.cog_height_m},
                     {"friction_mu", c.friction_mu},
                     {"steer_min_rad", c.steer_min_rad},
                     {"steer_max_rad", c.steer_max_rad},
                     {"steer_rate_max_radps", c.steer_rate_max_radps},
                     {"a_long_max_mps2", c.a_long_max_mps2},
                     {"v_min_mps", c.v_min_mps},
                     {"v_max_mps", c.v_max_mps},
                     {"v_switch_mps", c.v_switch_mps},
                     {"v_blend_mps", c.v_blend_mps},
                     {"gravity_mps2", c.gravity_mps2}};
}

void from_json(const nlohmann::json& j, VehicleConstants& c) {
  // Missing keys keep their defaults; unknown keys are rejected.
  VehicleConstants out;
  nlohmann::json defaults = out;
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw ConfigError("unknown vehicle constant: " + key);
    defaults[key] = value.get<double>();
  }
  out.wheelbase_m = defaults["wheelbase_m"];
  out.inertia_z_kgm2 = defaults["inertia_z_kgm2"];
  out.cornering_stiffness_front = defaults["cornering_stiffness_front"];
  out.cornering_stiffness_rear = defaults["cornering_stiffness_rear"];
  out.cog_height_m = defaults["cog_height_m"];
  out.friction_mu = defaults["friction_mu"];
  out.steer_min_rad = defaults["steer_min_rad"];
  out.steer_max_rad = defaults["steer_max_rad"];
  out.steer_rate_max_radps = defaults["steer_rate_max_radps"];
  out.a_long_max_mps2 = defaults["a_long_max_mps2"];
  out.v_min_mps = defaults["v_min_mps"];
  out.v_max_mps = defaults["v_max_mps"];
  out.v_switch_mps = defaults["v_switch_mps"];
  out.v_blend_mps = defaults["v_blend_mps"];
  out.gravity_mps2 = defaults["gravity_mps2"];
  out.validate();
  c = out;
}

void VehicleParams::validate() const {
  constants.validate();
  if (!(mass_kg > 0.0)) throw ConfigError("mass must be positive");
  if (!(l_f_m > 0.0 && l_f_m < constants.wheelbase_m)) {
    throw ConfigError("CoG-to-front distance must lie strictly inside the wheelbase");
  }
}

bool VehicleState::finite() const {
  return std::isfinite(x_m) && std::isfinite(y_m) && std::isfinite(yaw_rad) && std::isfinite(v_mps) &&
         std::isfinite(steer_rad) && std::isfinite(yaw_rate_radps) && std::isfinite(slip_angle_rad);
}

ControlInput clamp_input(const ControlInput& input, const VehicleState& state, const VehicleParams& params) {
  const auto& c = params.constants;
  ControlInput out = input;
  out.steer_rate_cmd_radps = std::clamp(out.steer_rate_cmd_radps, -c.steer_rate_max_radps, c.steer_rate_max_radps);
  if ((state.steer_rad >= c.steer_max_rad && out.steer_rate_cmd_radps > 0.0) ||
      (state.steer_rad <= c.steer_min_rad && out.steer_rate_cmd_radps < 0.0)) {
    out.steer_rate_cmd_radps = 0.0;
  }
  out.accel_cmd_mps2 = std::clamp(out.accel_cmd_mps2, -c.a_long_max_mps2, c.a_long_max_mps2);
  if (state.v_mps >= c.v_max_mps && out.accel_cmd_mps2 > 0.0) out.accel_cmd_mps2 = 0.0;
  if (state.v_mps <= c.v_min_mps && out.accel_cmd_mps2 < 0.0) out.accel_cmd_mps2 = 0.0;
  return out;
}

ControlInput steer_and_speed_to_input(double desired_steer_rad, double desired_speed_mps,
                                      const VehicleState& state, const TrackingGains& gains) {
  return {gains.k_steer * (desired_steer_rad - state.steer_rad), gains.k_speed * (desired_speed_mps - state.v_mps)};
}

namespace {

// Weight of the dynamic branch: 0 at or below v_switch, 1 above v_switch + v_blend.
double dynamic_weight(double v, const VehicleConstants& c) {
  return std::clamp((v - c.v_switch_mps) / c.v_blend_mps, 0.0, 1.0);
}

VehicleState kinematic_derivative(const VehicleState& s, const VehicleParams& p, const ControlInput& u) {
  const double L = p.wheelbase();
  const double lr = p.l_r_m();
  const double tan_d = std::tan(s.steer_rad);
  const double cos_d = std::cos(s.steer_rad);
  const double beta = std::atan(lr * tan_d / L);
  const double ratio = lr * tan_d / L;
  VehicleState f;
  f.x_m = s.v_mps * std::cos(s.yaw_rad + beta);
  f.y_m = s.v_mps * std::sin(s.yaw_rad + beta);
  f.yaw_rad = s.v_mps * tan_d / L;
  f.v_mps = u.accel_cmd_mps2;
  f.steer_rad = u.steer_rate_cmd_radps;
  f.yaw_rate_radps = u.accel_cmd_mps2 * tan_d / L + s.v_mps * u.steer_rate_cmd_radps / (L * cos_d * cos_d);
  f.slip_angle_rad = lr * u.steer_rate_cmd_radps / (L * cos_d * cos_d * (1.0 + ratio * ratio));
  return f;
}

// Single-track model with linear tyres and load transfer, as in the
// CommonRoad vehicle model family.
VehicleState dynamic_derivative(const VehicleState& s, const VehicleParams& p, const ControlInput& u) {
  const auto& c = p.constants;
  const double lf = p.l_f_m;
  const double lr = p.l_r_m();
  const double L = lf + lr;
  const double m = p.mass_kg;
  const double g = c.gravity_mps2;
  const double h = c.cog_height_m;
  const double mu = c.friction_mu;
  const double csf = c.cornering_stiffness_front;
  const double csr = c.cornering_stiffness_rear;
  const double a = u.accel_cmd_mps2;
  const double v = s.v_mps;
  const double front_load = g * lr - a * h;
  const double rear_load = g * lf + a * h;

  VehicleState f;
  f.x_m = v * std::cos(s.yaw_rad + s.slip_angle_rad);
  f.y_m = v * std::sin(s.yaw_rad + s.slip_angle_rad);
  f.yaw_rad = s.yaw_rate_radps;
  f.v_mps = a;
  f.steer_rad = u.steer_rate_cmd_radps;
  f.yaw_rate_radps =
      -mu * m / (v * c.inertia_z_kgm2 * L) * (lf * lf * csf * front_load + lr * lr * csr * rear_load) * s.yaw_rate_radps +
      mu * m / (c.inertia_z_kgm2 * L) * (lr * csr * rear_load - lf * csf * front_load) * s.slip_angle_rad +
      mu * m / (c.inertia_z_kgm2 * L) * lf * csf * front_load * s.steer_rad;
  f.slip_angle_rad = (mu / (v * v * L) * (csr * rear_load * lr - csf * front_load * lf) - 1.0) * s.yaw_rate_radps -
                     mu / (v * L) * (csr * rear_load + csf * front_load) * s.slip_angle_rad +
                     mu / (v * L) * csf * front_load * s.steer_rad;
  return f;
}

VehicleState axpy(const VehicleState& x, double k, const VehicleState& d) {
  return {x.x_m + k * d.x_m,
          x.y_m + k * d.y_m,
          x.yaw_rad + k * d.yaw_rad,
          x.v_mps + k * d.v_mps,
          x.steer_rad + k * d.steer_rad,
          x.yaw_rate_radps + k * d.yaw_rate_radps,
          x.slip_angle_rad + k * d.slip_angle_rad};
}

bool finite_input(const ControlInput& u) {
  return std::isfinite(u.steer_rate_cmd_radps) && std::isfinite(u.accel_cmd_mps2);
}

}  // namespace

VehicleState single_track_derivative(const VehicleState& state, const VehicleParams& params,
                                     const ControlInput& input) {
  const double w = dynamic_weight(state.v_mps, params.constants);
  if (w <= 0.0) return kinematic_derivative(state, params, input);
  if (w >= 1.0) return dynamic_derivative(state, params, input);
  const VehicleState k = kinematic_derivative(state, params, input);
  const VehicleState d = dynamic_derivative(state, params, input);
  VehicleState out = axpy(VehicleState{}, 1.0 - w, k);
  return axpy(out, w, d);
}

VehicleState step(const VehicleState& state, const VehicleParams& params, const ControlInput& input, double dt) {
  if (!state.finite()) throw SimulationFault("non-finite vehicle state");
  if (!finite_input(input)) throw SimulationFault("non-finite control input");
  const ControlInput u = clamp_input(input, state, params);
  const auto& c = params.constants;

  const VehicleState k1 = single_track_derivative(state, params, u);
  const VehicleState k2 = single_track_derivative(axpy(state, 0.5 * dt, k1), params, u);
  const VehicleState k3 = single_track_derivative(axpy(state, 0.5 * dt, k2), params, u);
  const VehicleState k4 = single_track_derivative(axpy(state, dt, k3), params, u);

  VehicleState next = state;
  next = axpy(next, dt / 6.0, k1);
  next = axpy(next, dt / 3.0, k2);
  next = axpy(next, dt / 3.0, k3);
  next = axpy(next, dt / 6.0, k4);

  next.steer_rad = std::clamp(next.steer_rad, c.steer_min_rad, c.steer_max_rad);
  next.v_mps = std::clamp(next.v_mps, c.v_min_mps, c.v_max_mps);
  if (next.v_mps <= c.v_switch_mps) {
    // Yaw rate and slip are algebraic in the kinematic regime.
    const double tan_d = std::tan(next.steer_rad);
    next.yaw_rate_radps = next.v_mps * tan_d / params.wheelbase();
    next.slip_angle_rad = std::atan(params.l_r_m() * tan_d / params.wheelbase());
  }
  if (!next.finite()) throw SimulationFault("integration produced a non-finite state");
  return next;
}

}  // namespace raceopt
