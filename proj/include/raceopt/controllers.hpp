#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "raceopt/raceline.hpp"
#include "raceopt/vehicle.hpp"

namespace raceopt {

enum class ControllerKind { PurePursuit, Stanley, Lqr };

std::string_view controller_name(ControllerKind kind);
// Accepts "pure_pursuit"/"pp", "stanley", "lqr". Throws ConfigError.
ControllerKind parse_controller(std::string_view name);
// Number of tunable parameters the controller contributes to the search space.
std::size_t controller_param_count(ControllerKind kind);

struct PurePursuitParams {
  double lookahead_m = 1.0;
};

struct StanleyParams {
  double gain_kp = 1.0;
};

// diag(Q) over [e, e_dot, heading_err, heading_err_dot] and scalar R.
struct LqrParams {
  std::array<double, 4> q{1.0, 1.0, 1.0, 1.0};
  double r = 1.0;
  double horizon_dt_s = 0.1;  // discretization step of the error model
};

struct ControllerConfig {
  ControllerKind kind = ControllerKind::PurePursuit;
  std::variant<PurePursuitParams, StanleyParams, LqrParams> params = PurePursuitParams{};

  // Builds from the controller block of a decoded candidate.
  static ControllerConfig from_vector(ControllerKind kind, const std::vector<double>& values,
                                      double lqr_horizon_dt_s = 0.1);
  void validate() const;
};

struct SteerCommand {
  double steer_rad = 0.0;
  double speed_mps = 0.0;
};

// Goal at `lookahead` arc metres beyond the rear-axle projection.
SteerCommand pure_pursuit(const VehicleState& state, const VehicleParams& vehicle, const Raceline& raceline,
                          double lookahead_m);

inline constexpr double kStanleySoftening = 1e-2;

SteerCommand stanley(const VehicleState& state, const VehicleParams& vehicle, const Raceline& raceline,
                     double gain_kp);

// Error-dynamics matrices at speed v for step dt.
void lqr_error_model(double v, double wheelbase, double dt, Eigen::Matrix4d& a, Eigen::Vector4d& b);

inline constexpr double kLqrTolerance = 1e-6;
inline constexpr int kLqrMaxIterations = 200;

struct LqrGain {
  Eigen::Matrix<double, 1, 4> k;
  int iterations = 0;
};

// Riccati fixed point for the error model at speed v; nullopt when it
// does not converge within kLqrMaxIterations.
std::optional<LqrGain> lqr_gain(double v, double wheelbase, const LqrParams& params);

// Gain-scheduled LQR on the lateral error state. Throws ControllerFault
// when the Riccati iteration does not converge.
SteerCommand lqr(const VehicleState& state, const VehicleParams& vehicle, const Raceline& raceline,
                 const LqrParams& params);

SteerCommand compute_command(const ControllerConfig& config, const VehicleState& state,
                             const VehicleParams& vehicle, const Raceline& raceline);

}  // namespace raceopt
