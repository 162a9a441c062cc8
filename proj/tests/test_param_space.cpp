#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "raceopt/error.hpp"
#include "raceopt/param_space.hpp"
#include "raceopt/controllers.hpp"
#include "raceopt/track.hpp"

using namespace raceopt;

TEST_CASE("dimension per controller") {
  const auto b = BoundsConfig::original();
  CHECK(build_space(ControllerKind::Lqr, b, 100).dimension() == 109);
  CHECK(build_space(ControllerKind::PurePursuit, b, 100).dimension() == 105);
  CHECK(build_space(ControllerKind::Stanley, b, 100).dimension() == 105);
  CHECK(build_space(ControllerKind::PurePursuit, b, 30).dimension() == 35);
}

TEST_CASE("index ranges partition the vector") {
  const auto s = build_space(ControllerKind::Lqr, BoundsConfig::original(), 100);
  CHECK(s.physical().begin == 0);
  CHECK(s.physical().end == s.velocities().begin);
  CHECK(s.velocities().end == s.perturbations().begin);
  CHECK(s.perturbations().end == s.control().begin);
  CHECK(s.control().end == s.dimension());
  CHECK(s.control().size() == 5);
}

TEST_CASE("decode at the centre, lower and upper corners") {
  const auto s = build_space(ControllerKind::PurePursuit, BoundsConfig::original(), 100);
  const double hw = BoundsConfig::original().perturb_halfwidth_m;

  const auto mid = s.decode(std::vector<double>(s.dimension(), 0.5));
  CHECK(mid.mass_kg == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(mid.cog_to_front_m == doctest::Approx(0.1585).epsilon(1e-12));

  const auto lo = s.decode(std::vector<double>(s.dimension(), 0.0));
  CHECK(lo.mass_kg == 3.0);
  CHECK(lo.controller_params.at(0) == doctest::Approx(0.2));
  for (double p : lo.perturbs_m) CHECK(p == doctest::Approx(-hw));

  const auto hi = s.decode(std::vector<double>(s.dimension(), 1.0));
  CHECK(hi.mass_kg == 4.0);
  CHECK(hi.v_max_mps == 15.0);
}

TEST_CASE("encode endpoints and a tuned mass") {
  const auto s = build_space(ControllerKind::PurePursuit, BoundsConfig::original(), 100);
  Candidate c = s.midpoint();
  c.mass_kg = 3.0;
  CHECK(s.encode(c)[0] == 0.0);
  c.mass_kg = 3.9418;
  CHECK(s.encode(c)[0] == doctest::Approx(0.9418).epsilon(1e-12));
}

TEST_CASE("decode then encode round-trips on random vectors") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (ControllerKind kind : {ControllerKind::PurePursuit, ControllerKind::Stanley, ControllerKind::Lqr}) {
    const auto s = build_space(kind, BoundsConfig::original(), 20);
    for (int k = 0; k < 200; ++k) {
      std::vector<double> x(s.dimension());
      for (double& v : x) v = u(rng);
      const auto back = s.encode(s.decode(x));
      REQUIRE(back.size() == x.size());
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("velocity bounds are repaired into order") {
  double lo = 5.0, hi = 3.0;
  repair_velocity_order(lo, hi);
  CHECK(lo == 3.0);
  CHECK(hi == 5.0);

  BoundsConfig b = BoundsConfig::relaxed();
  const auto s = build_space(ControllerKind::PurePursuit, b, 10);
  std::vector<double> x(s.dimension(), 0.5);
  x[2] = 1.0;
  x[3] = 0.0;
  const auto c = s.decode(x);
  CHECK(c.v_min_mps <= c.v_max_mps);
}

TEST_CASE("decode rejects malformed vectors") {
  const auto s = build_space(ControllerKind::PurePursuit, BoundsConfig::original(), 10);
  CHECK_THROWS_AS(s.decode(std::vector<double>(s.dimension() - 1, 0.5)), DecodeError);
  std::vector<double> x(s.dimension(), 0.5);
  x[3] = 1.5;
  CHECK_THROWS_AS(s.decode(x), DecodeError);
  x[3] = std::nan("");
  CHECK_THROWS_AS(s.decode(x), DecodeError);
}

TEST_CASE("encode rejects values outside the bounds") {
  const auto s = build_space(ControllerKind::PurePursuit, BoundsConfig::original(), 10);
  Candidate c = s.midpoint();
  c.mass_kg = 5.0;
  CHECK_THROWS_AS(s.encode(c), EncodeError);
}

TEST_CASE("invalid intervals name the field") {
  BoundsConfig b = BoundsConfig::original();
  b.mass_kg = {4.0, 3.0};
  try {
    build_space(ControllerKind::PurePursuit, b, 100);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mass_kg") != std::string::npos);
  }
  BoundsConfig cog = BoundsConfig::original();
  cog.cog_to_front_m = {0.1, 0.4};
  CHECK_THROWS_AS(build_space(ControllerKind::PurePursuit, cog, 100), ConfigError);
}

TEST_CASE("relaxed preset widens the physical and lookahead ranges") {
  const auto o = BoundsConfig::original();
  const auto r = BoundsConfig::relaxed();
  auto inside = [](Interval inner, Interval outer) {
    return outer.lower <= inner.lower && inner.upper <= outer.upper;
  };
  CHECK(inside(o.mass_kg, r.mass_kg));
  CHECK(inside(o.cog_to_front_m, r.cog_to_front_m));
  CHECK(inside(o.v_min_mps, r.v_min_mps));
  CHECK(r.v_max_mps.upper > o.v_max_mps.upper);
  CHECK(inside(o.lookahead_m, r.lookahead_m));
  CHECK(r.mass_kg.width() > o.mass_kg.width());
}

TEST_CASE("bounds presets load by name and from JSON files") {
  CHECK(BoundsConfig::from_name_or_file("original").mass_kg.upper == 4.0);
  const auto dir = std::filesystem::temp_directory_path() / "raceopt_bounds_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "b.json");
    f << R"({"mass_kg": [2.5, 4.5], "perturb_halfwidth_m": 0.5})";
  }
  const auto b = BoundsConfig::from_name_or_file((dir / "b.json").string());
  CHECK(b.mass_kg.lower == 2.5);
  CHECK(b.perturb_halfwidth_m == 0.5);
  CHECK(b.v_max_mps.upper == BoundsConfig::original().v_max_mps.upper);
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"mass": [2.5, 4.5]})";
  }
  CHECK_THROWS_AS(BoundsConfig::from_name_or_file((dir / "bad.json").string()), ConfigError);
  CHECK_THROWS_AS(BoundsConfig::from_name_or_file("no_such_preset"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bounds JSON round-trips") {
  const nlohmann::json j = BoundsConfig::relaxed();
  const auto back = j.get<BoundsConfig>();
  CHECK(nlohmann::json(back) == j);
}

TEST_CASE("subset masks") {
  const auto s = build_space(ControllerKind::Lqr, BoundsConfig::original(), 10);
  const auto all = s.mask(Subset::All);
  const auto phys = s.mask(Subset::Physical);
  const auto dec = s.mask(Subset::Decision);
  const auto ctl = s.mask(Subset::Control);
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    CHECK(all[i]);
    // The three parts are disjoint and cover everything.
    CHECK(int(phys[i]) + int(dec[i]) + int(ctl[i]) == 1);
  }
  CHECK(phys[0]);
  CHECK(phys[1]);
  CHECK(dec[2]);
  CHECK(dec[4]);
  CHECK(ctl[s.dimension() - 1]);
  CHECK(parse_subset("decision") == Subset::Decision);
  CHECK_THROWS_AS(parse_subset("everything"), ConfigError);
}

TEST_CASE("track limits shrink perturbation ranges on narrow tracks") {
  const Track narrow = make_circle_track(10.0, 64, 0.65, true);
  const auto s = build_space(ControllerKind::PurePursuit, BoundsConfig::original(), 8).with_track_limits(narrow, 0.15);
  const auto lo = s.decode(std::vector<double>(s.dimension(), 0.0));
  for (double p : lo.perturbs_m) CHECK(p == doctest::Approx(-0.5));

  const Track too_narrow = make_circle_track(10.0, 64, 0.1, true);
  CHECK_THROWS_AS(build_space(ControllerKind::PurePursuit, BoundsConfig::original(), 8).with_track_limits(too_narrow, 0.15),
                  ConfigError);
}

TEST_CASE("decode is a pure function of its input") {
  const auto s = build_space(ControllerKind::Stanley, BoundsConfig::original(), 12);
  std::vector<double> x(s.dimension(), 0.25);
  const auto a = s.decode(x);
  const auto b = s.decode(x);
  CHECK(a.perturbs_m == b.perturbs_m);
  CHECK(a.controller_params == b.controller_params);
  CHECK(a.mass_kg == b.mass_kg);
}
