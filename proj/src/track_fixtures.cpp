#include <cmath>
#include <numbers>
#include <stdexcept>

#include "raceopt/error.hpp"
#include "raceopt/track.hpp"

namespace raceopt {

Track make_circle_track(double radius, std::size_t n_points, double half_width, bool ccw) {
  std::vector<Vec2> pts;
  pts.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_points);
    if (!ccw) a = -a;
    // Start at the bottom of the circle so travel begins along +x (CCW).
    pts.push_back({radius * std::sin(a), -radius * std::cos(a)});
  }
  std::vector<double> w(n_points, half_width);
  return Track::from_points(ccw ? "circle" : "circle_cw", std::move(pts), w, w);
}

Track make_oval_track(double straight_length, double radius, double spacing, double half_width) {
  const double arc = std::numbers::pi * radius;
  const double total = 2.0 * straight_length + 2.0 * arc;
  const auto n = static_cast<std::size_t>(std::llround(total / spacing));
  std::vector<Vec2> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = total * static_cast<double>(i) / static_cast<double>(n);
    if (s < straight_length) {
      pts.push_back({s, -radius});
      continue;
    }
    s -= straight_length;
    if (s < arc) {
      const double a = s / radius;
      pts.push_back({straight_length + radius * std::sin(a), -radius * std::cos(a)});
      continue;
    }
    s -= arc;
    if (s < straight_length) {
      pts.push_back({straight_length - s, radius});
      continue;
    }
    s -= straight_length;
    const double a = s / radius;
    pts.push_back({-radius * std::sin(a), radius * std::cos(a)});
  }
  std::vector<double> w(n, half_width);
  return Track::from_points("oval", std::move(pts), w, w);
}

namespace {

struct Harmonic {
  int order;
  double amplitude;
  double phase;
};

// Star-shaped closed loop r(theta) = base * (1 + sum a_k cos(k theta + phi_k)),
// sampled at roughly `spacing` metres.
Track make_polar_track(std::string name, double base, std::initializer_list<Harmonic> harmonics,
                       double spacing, double half_width) {
  auto radius = [&](double th) {
    double r = 1.0;
    for (const auto& h : harmonics) r += h.amplitude * std::cos(h.order * th + h.phase);
    return base * r;
  };
  const std::size_t fine = 20000;
  double perimeter = 0.0;
  Vec2 prev{radius(0.0), 0.0};
  for (std::size_t i = 1; i <= fine; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / fine;
    const Vec2 p{radius(th) * std::cos(th), radius(th) * std::sin(th)};
    perimeter += norm(p - prev);
    prev = p;
  }
  const auto n = static_cast<std::size_t>(std::llround(perimeter / spacing));
  // Equal-arc resampling of the fine polyline.
  std::vector<Vec2> pts;
  pts.reserve(n);
  double walked = 0.0;
  std::size_t next_index = 0;
  prev = {radius(0.0), 0.0};
  for (std::size_t i = 1; i <= fine && next_index < n; ++i) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / fine;
    const Vec2 p{radius(th) * std::cos(th), radius(th) * std::sin(th)};
    const double seg = norm(p - prev);
    while (next_index < n && walked + seg >= perimeter * static_cast<double>(next_index) / n) {
      const double f = (perimeter * static_cast<double>(next_index) / n - walked) / seg;
      pts.push_back(prev + f * (p - prev));
      ++next_index;
    }
    walked += seg;
    prev = p;
  }
  std::vector<double> w(pts.size(), half_width);
  return Track::from_points(std::move(name), std::move(pts), w, w);
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"circle", "oval", "spielberg", "silverstone", "monza"};
}

Track make_fixture(const std::string& name) {
  constexpr double kHalfWidth = 2.0;
  if (name == "circle") return make_circle_track(10.0, 64, kHalfWidth);
  // 2 * 28.584 + 2 * pi * 10 ~= 120 m.
  if (name == "oval") return make_oval_track(28.584073464102069, 10.0, 0.5, kHalfWidth);
  if (name == "spielberg") {
    return make_polar_track("spielberg", 60.0, {{2, 0.22, 0.0}, {3, 0.10, 1.0}, {5, 0.03, 0.4}}, 1.0,
                            kHalfWidth);
  }
  if (name == "silverstone") {
    return make_polar_track("silverstone", 60.0,
                            {{2, 0.16, 0.3}, {3, 0.09, 2.1}, {4, 0.05, 0.7}, {6, 0.025, 1.9}}, 1.0,
                            kHalfWidth);
  }
  if (name == "monza") {
    return make_polar_track("monza", 57.0, {{2, 0.34, 0.0}, {4, 0.05, 0.0}, {7, 0.012, 0.5}}, 1.0,
                            kHalfWidth);
  }
  throw ConfigError("unknown fixture: " + name);
}

}  // namespace raceopt
