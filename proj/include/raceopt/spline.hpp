#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "raceopt/geometry.hpp"

namespace raceopt {

// Periodic C2 cubic interpolant of scalar samples on a non-uniform grid.
// knots has one more entry than values; knots.back() closes the period.
class PeriodicCubic {
 public:
  PeriodicCubic() = default;
  PeriodicCubic(std::vector<double> knots, std::vector<double> values);

  struct Eval {
    double value;
    double d1;
    double d2;
    double d3;
  };

  double period() const { return knots_.back() - knots_.front(); }
  double value(double t) const { return eval(t).value; }
  Eval eval(double t) const;
  std::size_t segment_of(double wrapped_t) const;
  double wrap(double t) const;
  const std::vector<double>& knots() const { return knots_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> second_;  // second derivative at each knot
};

// Closed planar curve through a point loop, addressable by arc length.
// Internally a chord-length parameterized periodic cubic pair, with an
// oversampled (t, s) table that converts between the two parameters.
class ClosedSpline {
 public:
  static constexpr int kTableOversample = 10;

  ClosedSpline() = default;
  // Throws FitError for fewer than 4 points or coincident neighbours.
  static ClosedSpline fit(std::span<const Vec2> points);

  struct Derivs {
    Vec2 p;
    Vec2 d1;
    Vec2 d2;
    Vec2 d3;
  };

  double length() const { return length_; }
  std::size_t knot_count() const { return knot_arc_.size(); }
  double knot_arc(std::size_t i) const { return knot_arc_[i]; }
  double param_period() const { return x_.period(); }

  Vec2 position(double s) const;
  Vec2 tangent(double s) const;  // unit
  Vec2 normal(double s) const;   // unit, left of travel
  double heading(double s) const;
  // Signed curvature, positive for counter-clockwise turning.
  double curvature(double s) const;
  // d(kappa)/ds.
  double curvature_rate(double s) const;

  // Parameter-space access used by projection and resampling.
  Derivs derivs_at_param(double t) const;
  double param_at(double s) const;
  double arc_at(double t) const;

  // Table of (t, s) samples; exposed for coarse nearest-point search.
  const std::vector<double>& table_param() const { return table_t_; }
  const std::vector<double>& table_arc() const { return table_s_; }

 private:
  PeriodicCubic x_;
  PeriodicCubic y_;
  std::vector<double> table_t_;
  std::vector<double> table_s_;
  std::vector<double> knot_arc_;
  double length_ = 0.0;

  double speed(double t) const;
  double integrate_speed(double t0, double t1) const;
};

double curvature_from_derivs(Vec2 d1, Vec2 d2);

}  // namespace raceopt
