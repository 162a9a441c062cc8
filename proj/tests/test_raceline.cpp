#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "raceopt/error.hpp"
#include "raceopt/raceline.hpp"
#include "raceopt/track.hpp"

using namespace raceopt;

namespace {

double max_abs_slope(const std::vector<double>& v, double ds) {
  // |d(v^2)/ds| / 2 = v |dv/ds|, the quantity the smoother bounds.
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = v[i], b = v[(i + 1) % v.size()];
    worst = std::max(worst, std::abs(b * b - a * a) / (2.0 * ds));
  }
  return worst;
}

}  // namespace

TEST_CASE("control points are evenly spaced") {
  const Track t = make_fixture("spielberg");
  const auto cps = control_points(t, 100);
  REQUIRE(cps.size() == 100);
  CHECK(cps[0].s == 0.0);
  for (std::size_t i = 1; i < cps.size(); ++i) {
    CHECK(cps[i].s - cps[i - 1].s == doctest::Approx(t.length() / 100.0).epsilon(1e-9));
    CHECK(norm(cps[i].normal) == doctest::Approx(1.0));
  }
}

TEST_CASE("four control points on a circle sit at the quadrants") {
  const Track c = make_circle_track(10.0, 64, 2.0, true);
  const auto cps = control_points(c, 4);
  const Vec2 first = cps[0].base;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(norm(cps[i].base) == doctest::Approx(10.0).epsilon(1e-4));
    // Successive quadrant points are a quarter turn apart.
    const double angle = std::atan2(cross(first, cps[i].base), dot(first, cps[i].base));
    CHECK(std::abs(wrap_angle(angle - static_cast<double>(i) * std::numbers::pi / 2.0)) < 1e-4);
  }
}

TEST_CASE("zero perturbation reproduces the centerline") {
  for (const char* name : {"oval", "spielberg", "circle"}) {
    CAPTURE(name);
    const Track t = make_fixture(name);
    const Raceline r = build_raceline(t, std::vector<double>(50, 0.0), 2.0, 8.0);
    CHECK(std::abs(r.length() - t.length()) / t.length() < 1e-6);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(t.project({r.x()[i], r.y()[i]}).d));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("constant inward offset on a circle shrinks the radius") {
  const Track c = make_circle_track(10.0, 64, 2.0, true);
  const Raceline r = build_raceline(c, std::vector<double>(20, 0.5), 2.0, 2.0);
  const double expected = 2.0 * std::numbers::pi * 9.5;
  CHECK(std::abs(r.length() - expected) / expected < 1e-3);
  for (std::size_t i = 0; i < r.size(); i += 7) CHECK(std::abs(std::hypot(r.x()[i], r.y()[i]) - 9.5) < 5e-3);
}

TEST_CASE("alternating offsets lengthen the line") {
  const Track t = make_fixture("oval");
  std::vector<double> p(40);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = i % 2 ? 0.8 : -0.8;
  CHECK(build_raceline(t, p, 2.0, 8.0).length() > t.length());
}

TEST_CASE("raceline passes through the moved control points") {
  const Track t = make_fixture("silverstone");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> p(60);
  for (double& v : p) v = u(rng);
  const Raceline r = build_raceline(t, p, 2.0, 8.0);
  const auto cps = control_points(t, p.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const Vec2 target = cps[i].base + p[i] * cps[i].normal;
    // Samples are 0.1 m apart, so the nearest polyline foot is within chord sag.
    const auto proj = r.project(target);
    CHECK(norm(proj.foot - target) < 1e-3);
  }
}

TEST_CASE("raceline construction is deterministic") {
  const Track t = make_fixture("monza");
  std::vector<double> p(100);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::sin(0.3 * static_cast<double>(i));
  const Raceline a = build_raceline(t, p, 1.0, 9.0);
  const Raceline b = build_raceline(t, p, 1.0, 9.0);
  CHECK(a.x() == b.x());
  CHECK(a.y() == b.y());
  CHECK(a.kappa() == b.kappa());
  CHECK(a.v_ref() == b.v_ref());
  CHECK(a.length() == b.length());
}

TEST_CASE("build rejects bad input") {
  const Track t = make_fixture("oval");
  std::vector<double> p(10, 0.0);
  p[3] = std::nan("");
  CHECK_THROWS_AS(build_raceline(t, p, 1.0, 2.0), ConfigError);
  CHECK_THROWS_AS(build_raceline(t, std::vector<double>(10, 0.0), 3.0, 2.0), ConfigError);
  // Far outside the track is still built; drivability is judged by the simulator.
  CHECK_NOTHROW(build_raceline(t, std::vector<double>(10, 5.0), 1.0, 2.0));
}

TEST_CASE("curvature map hits both bounds") {
  const std::vector<double> kappa{0.0, 0.05, -0.1, 0.1};
  const auto v = curvature_speed_map(kappa, 2.0, 10.0);
  CHECK(v[0] == 10.0);
  CHECK(v[1] == doctest::Approx(6.0));
  CHECK(v[2] == 2.0);
  CHECK(v[3] == 2.0);
  const auto flat = curvature_speed_map(std::vector<double>(5, 0.0), 2.0, 10.0);
  for (double x : flat) CHECK(x == 10.0);
}

TEST_CASE("constant curvature runs at v_min everywhere") {
  const auto v = velocity_profile(std::vector<double>(300, 0.1), 0.1, 3.0, 9.0, 9.51);
  for (double x : v) CHECK(x == 3.0);

  // A splined circle carries ~1e-3 relative curvature ripple, so the built
  // profile sits within that fraction of the speed range above v_min.
  const Track c = make_circle_track(10.0, 64, 2.0, true);
  const Raceline r = build_raceline(c, std::vector<double>(16, 0.0), 3.0, 9.0);
  for (double x : r.v_ref()) CHECK(std::abs(x - 3.0) <= 6.0 * 2e-3);
}

TEST_CASE("smoothing bounds, slope and idempotence") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> kappa(500);
    for (double& k : kappa) k = 0.3 * (u(rng) - 0.5);
    const double ds = 0.1, a = 9.51;
    const auto raw = curvature_speed_map(kappa, 1.0, 12.0);
    auto v = raw;
    limit_acceleration(v, ds, a);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v[i] >= 1.0);
      CHECK(v[i] <= 12.0);
      CHECK(v[i] <= raw[i]);
    }
    CHECK(max_abs_slope(v, ds) <= a * (1.0 + 1e-9));
    CHECK(max_abs_slope(v, ds) <= max_abs_slope(raw, ds) + 1e-12);
    auto again = v;
    limit_acceleration(again, ds, a);
    CHECK(again == v);
  }
}

TEST_CASE("smoothing leaves a constant profile alone") {
  std::vector<double> v(100, 4.0);
  limit_acceleration(v, 0.1, 9.51);
  for (double x : v) CHECK(x == 4.0);
}

TEST_CASE("projection onto the raceline") {
  const Track t = make_fixture("oval");
  const Raceline r = build_raceline(t, std::vector<double>(30, 0.0), 2.0, 8.0);
  const double s = 12.0;
  const auto pose = r.at(s);
  const Vec2 left{-std::sin(pose.heading), std::cos(pose.heading)};
  const auto p = r.project(pose.position + 0.4 * left);
  CHECK(p.lateral == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(p.s == doctest::Approx(s).epsilon(1e-6));
  // Wrapped arc positions give the same pose.
  CHECK(r.at(s + r.length()).position.x == doctest::Approx(pose.position.x));
}

TEST_CASE("speed profile can be replaced") {
  const Track t = make_fixture("oval");
  Raceline r = build_raceline(t, std::vector<double>(30, 0.0), 2.0, 8.0);
  r.set_speed_profile(std::vector<double>(r.size(), 5.0));
  CHECK(r.at(3.3).v_ref == 5.0);
  CHECK_THROWS_AS(r.set_speed_profile({1.0}), ConfigError);
}
