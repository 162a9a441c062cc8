#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "raceopt/geometry.hpp"
#include "raceopt/point_grid.hpp"
#include "raceopt/spline.hpp"

namespace raceopt {

struct CenterlineProjection {
  double s = 0.0;  // arc position of the nearest centerline point
  double d = 0.0;  // signed lateral offset, positive left of travel
};

// Closed race track: centerline loop plus per-point drivable widths.
class Track {
 public:
  // Validates the invariants (>= 4 points, widths > 0, no coincident
  // neighbours) and fits the centerline spline. Throws LoadError.
  static Track from_points(std::string name, std::vector<Vec2> centerline,
                           std::vector<double> width_left, std::vector<double> width_right);

  const std::string& name() const { return name_; }
  const std::vector<Vec2>& centerline() const { return centerline_; }
  const std::vector<double>& widths_left() const { return width_left_; }
  const std::vector<double>& widths_right() const { return width_right_; }
  const ClosedSpline& spline() const { return spline_; }
  double length() const { return spline_.length(); }

  // Widths interpolated linearly in arc length between input points.
  double width_left(double s) const;
  double width_right(double s) const;

  // Global nearest point on the closed centerline: bucket-grid search over
  // the arc table samples, then Newton refinement in the winning interval.
  CenterlineProjection project(Vec2 point) const;

  Vec2 offset_point(double s, double d) const;

 private:
  std::string name_;
  std::vector<Vec2> centerline_;
  std::vector<double> width_left_;
  std::vector<double> width_right_;
  ClosedSpline spline_;
  std::vector<double> lookup_x_;
  std::vector<double> lookup_y_;
  PointGrid lookup_grid_;

  double interpolate_width(const std::vector<double>& w, double s) const;
};

// CSV with header columns x_m, y_m, w_tr_left_m, w_tr_right_m (any order,
// optional leading '#'). Throws LoadError with the 1-based data row.
Track load_track(const std::filesystem::path& path);
Track parse_track_csv(const std::string& text, std::string name);
void save_track(const std::filesystem::path& path, const Track& track);

// Free-function forms of the geometry queries.
ClosedSpline fit_closed_spline(std::span<const Vec2> points);
double curvature_at(const ClosedSpline& spline, double s);
Vec2 offset_point(const ClosedSpline& spline, double s, double d);
CenterlineProjection project_to_centerline(const Track& track, Vec2 point);

// Deterministic synthetic and stand-in fixtures.
Track make_circle_track(double radius, std::size_t n_points, double half_width, bool ccw = true);
Track make_oval_track(double straight_length, double radius, double spacing, double half_width);
std::vector<std::string> fixture_names();
Track make_fixture(const std::string& name);

}  // namespace raceopt
