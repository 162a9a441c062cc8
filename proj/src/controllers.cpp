#include "raceopt/controllers.hpp"

#include <cassert>
#include <cmath>

#include "raceopt/error.hpp"
#include "raceopt/riccati.hpp"

namespace raceopt {

std::string_view controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::PurePursuit:
      return "pure_pursuit";
    case ControllerKind::Stanley:
      return "stanley";
    case ControllerKind::Lqr:
      return "lqr";
  }
  return "unknown";
}

ControllerKind parse_controller(std::string_view name) {
  if (name == "pure_pursuit" || name == "pp" || name == "purepursuit") return ControllerKind::PurePursuit;
  if (name == "stanley") return ControllerKind::Stanley;
  if (name == "lqr") return ControllerKind::Lqr;
  throw ConfigError("unknown controller: " + std::string(name));
}

std::size_t controller_param_count(ControllerKind kind) { return kind == ControllerKind::Lqr ? 5 : 1; }

ControllerConfig ControllerConfig::from_vector(ControllerKind kind, const std::vector<double>& values,
                                               double lqr_horizon_dt_s) {
  if (values.size() != controller_param_count(kind)) throw ConfigError("controller parameter count mismatch");
  ControllerConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ControllerKind::PurePursuit:
      cfg.params = PurePursuitParams{values[0]};
      break;
    case ControllerKind::Stanley:
      cfg.params = StanleyParams{values[0]};
      break;
    case ControllerKind::Lqr:
      cfg.params = LqrParams{{values[0], values[1], values[2], values[3]}, values[4], lqr_horizon_dt_s};
      break;
  }
  cfg.validate();
  return cfg;
}

void ControllerConfig::validate() const {
  switch (kind) {
    case ControllerKind::PurePursuit:
      if (!(std::get<PurePursuitParams>(params).lookahead_m > 0.0)) throw ConfigError("lookahead must be > 0");
      break;
    case ControllerKind::Stanley:
      if (!(std::get<StanleyParams>(params).gain_kp > 0.0)) throw ConfigError("gain_kp must be > 0");
      break;
    case ControllerKind::Lqr: {
      const auto& p = std::get<LqrParams>(params);
      bool any = false;
      for (double q : p.q) {
        if (!(q >= 0.0)) throw ConfigError("LQR q entries must be >= 0");
        any = any || q > 0.0;
      }
      if (!any) throw ConfigError("at least one LQR q entry must be > 0");
      if (!(p.r > 0.0)) throw ConfigError("LQR r must be > 0");
      if (!(p.horizon_dt_s > 0.0)) throw ConfigError("LQR horizon_dt_s must be > 0");
      break;
    }
  }
}

SteerCommand pure_pursuit(const VehicleState& state, const VehicleParams& vehicle, const Raceline& raceline,
                          double lookahead_m) {
  const double c = std::cos(state.yaw_rad);
  const double s = std::sin(state.yaw_rad);
  const Vec2 rear{state.x_m - vehicle.l_r_m() * c, state.y_m - vehicle.l_r_m() * s};
  const auto proj = raceline.project(rear);
  const auto goal = raceline.at(proj.s + lookahead_m);
  const Vec2 delta = goal.position - rear;
  // Bearing of the goal in the vehicle frame.
  const double alpha = std::atan2(-s * delta.x + c * delta.y, c * delta.x + s * delta.y);
  return {std::atan(2.0 * vehicle.wheelbase() * std::sin(alpha) / lookahead_m), goal.v_ref};
}

SteerCommand stanley(const VehicleState& state, const VehicleParams& vehicle, const Raceline& raceline,
                     double gain_kp) {
  const Vec2 front{state.x_m + vehicle.l_f_m * std::cos(state.yaw_rad),
                   state.y_m + vehicle.l_f_m * std::sin(state.yaw_rad)};
  const auto proj = raceline.project(front);
  const auto ref = raceline.at(proj.s);
  // Positive when the path lies left of the front axle.
  const double e = -proj.lateral;
  const double heading_error = wrap_angle(ref.heading - state.yaw_rad);
  return {heading_error + std::atan(gain_kp * e / (state.v_mps + kStanleySoftening)), ref.v_ref};
}

void lqr_error_model(double v, double wheelbase, double dt, Eigen::Matrix4d& a, Eigen::Vector4d& b) {
  a << 1.0, dt, 0.0, 0.0,  //
      0.0, 0.0, v, 0.0,    //
      0.0, 0.0, 1.0, dt,   //
      0.0, 0.0, 0.0, 0.0;
  b << 0.0, 0.0, 0.0, v / wheelbase;
}

std::optional<LqrGain> lqr_gain(double v, double wheelbase, const LqrParams& params) {
  Eigen::Matrix4d a;
  Eigen::Vector4d b;
  lqr_error_model(v, wheelbase, params.horizon_dt_s, a, b);
  const Eigen::Matrix4d q = Eigen::Vector4d(params.q[0], params.q[1], params.q[2], params.q[3]).asDiagonal();
  // Scalar-input specialization of solve_dare_iterative.
  Eigen::Matrix4d p = q;
  for (int k = 1; k <= kLqrMaxIterations; ++k) {
    const Eigen::Vector4d pb = p * b;
    const double s = params.r + b.dot(pb);
    const Eigen::Matrix<double, 1, 4> btpa = pb.transpose() * a;
    Eigen::Matrix4d next = q + a.transpose() * p * a - btpa.transpose() * btpa / s;
    next = 0.5 * (next + next.transpose()).eval();
    if (!next.allFinite()) return std::nullopt;
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    const double delta = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (delta <= kLqrTolerance * scale) {
      const Eigen::Vector4d pb_final = p * b;
      LqrGain out;
      out.k = (pb_final.transpose() * a) / (params.r + b.dot(pb_final));
      out.iterations = k;
      assert(spectral_radius(Eigen::MatrixXd(a - b * out.k)) < 1.0);
      return out;
    }
  }
  return std::nullopt;
}

SteerCommand lqr(const VehicleState& state, const VehicleParams& vehicle, const Raceline& raceline,
                 const LqrParams& params) {
  const auto proj = raceline.project({state.x_m, state.y_m});
  const auto ref = raceline.at(proj.s);
  const double v = state.v_mps;
  const double heading_error = wrap_angle(state.yaw_rad - ref.heading);
  Eigen::Vector4d z;
  z << proj.lateral, v * std::sin(heading_error), heading_error, state.yaw_rate_radps - v * ref.kappa;

  const auto gain = lqr_gain(std::max(v, 0.5), vehicle.wheelbase(), params);
  if (!gain) throw ControllerFault("LQR Riccati iteration did not converge");
  const double feedforward = std::atan(vehicle.wheelbase() * ref.kappa);
  return {-gain->k.dot(z) + feedforward, ref.v_ref};
}

SteerCommand compute_command(const ControllerConfig& config, const VehicleState& state,
                             const VehicleParams& vehicle, const Raceline& raceline) {
  switch (config.kind) {
    case ControllerKind::PurePursuit:
      return pure_pursuit(state, vehicle, raceline, std::get<PurePursuitParams>(config.params).lookahead_m);
    case ControllerKind::Stanley:
      return stanley(state, vehicle, raceline, std::get<StanleyParams>(config.params).gain_kp);
    case ControllerKind::Lqr:
      return lqr(state, vehicle, raceline, std::get<LqrParams>(config.params));
  }
  return {};
}

}  // namespace raceopt
