#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "raceopt/geometry.hpp"
#include "raceopt/point_grid.hpp"
#include "raceopt/track.hpp"

namespace raceopt {

struct ControlPoint {
  double s = 0.0;
  Vec2 base;
  Vec2 normal;  // unit, left of travel
};

// n points evenly spaced in arc length along the centerline, first at s = 0.
std::vector<ControlPoint> control_points(const Track& track, std::size_t n);

struct RacelineOptions {
  double ds = 0.1;           // resampling step [m]
  double a_long_max = 9.51;  // longitudinal limit used by the speed smoother [m/s^2]
};

// Closed reference path sampled at uniform arc spacing, with the speed
// profile the controllers track.
class Raceline {
 public:
  struct Projection {
    double s = 0.0;
    double lateral = 0.0;  // positive when the query point is left of the path
    std::size_t segment = 0;
    double fraction = 0.0;
    Vec2 foot;
  };

  struct Pose {
    Vec2 position;
    double heading = 0.0;
    double kappa = 0.0;
    double v_ref = 0.0;
  };

  Raceline() = default;
  Raceline(std::vector<double> x, std::vector<double> y, std::vector<double> heading,
           std::vector<double> kappa, std::vector<double> v_ref, double length);

  std::size_t size() const { return x_.size(); }
  double length() const { return length_; }
  double ds() const { return ds_; }
  double s(std::size_t i) const { return ds_ * static_cast<double>(i); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }
  const std::vector<double>& heading() const { return heading_; }
  const std::vector<double>& kappa() const { return kappa_; }
  const std::vector<double>& v_ref() const { return v_ref_; }

  void set_speed_profile(std::vector<double> v_ref);

  // Nearest point on the closed polyline (global).
  Projection project(Vec2 q) const;
  // Linear interpolation at arc position s (wrapped).
  Pose at(double s) const;

 private:
  std::vector<double> x_, y_, heading_, kappa_, v_ref_;
  double length_ = 0.0;
  double ds_ = 0.0;
  PointGrid grid_;
};

// Moves control point i by perturbs[i] along the centerline normal and
// interpolates the offsets with a periodic cubic in arc length, so the
// path passes through every moved control point and reduces exactly to
// the centerline for zero offsets. Throws ConfigError on NaN input or
// v_min > v_max.
Raceline build_raceline(const Track& track, std::span<const double> perturbs_m, double v_min,
                        double v_max, const RacelineOptions& options = {});

// Linear-in-|kappa| map onto [v_min, v_max]; constant v_max on a straight.
std::vector<double> curvature_speed_map(std::span<const double> kappa, double v_min, double v_max);

// Forward/backward pass enforcing v * |dv/ds| <= a_max on a closed loop.
void limit_acceleration(std::vector<double>& v, double ds, double a_max);

std::vector<double> velocity_profile(std::span<const double> kappa, double ds, double v_min,
                                     double v_max, double a_max);

void write_raceline_csv(const std::filesystem::path& path, const Raceline& raceline);

}  // namespace raceopt
