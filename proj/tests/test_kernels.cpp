#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "raceopt/kernels/nearest.hpp"
#include "raceopt/point_grid.hpp"

using namespace raceopt;
using kernels::Isa;

namespace {

struct Cloud {
  std::vector<double> xs, ys;
};

Cloud random_cloud(std::size_t n, std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-spread, spread);
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.xs.push_back(u(rng));
    c.ys.push_back(u(rng));
  }
  return c;
}

Cloud ring(std::size_t n, double radius) {
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    c.xs.push_back(radius * std::cos(a));
    c.ys.push_back(radius * std::sin(a));
  }
  return c;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (kernels::isa_available(isa)) out.push_back(isa);
  }
  return out;
}

}  // namespace

TEST_CASE("scalar kernel finds the nearest sample") {
  const std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> ys{0.0, 0.0, 0.0, 0.0};
  const auto r = kernels::nearest_point_scalar(xs, ys, 2.2, 0.5);
  CHECK(r.index == 2);
  CHECK(r.dist2 == doctest::Approx(0.04 + 0.25));
}

TEST_CASE("ties resolve to the lowest index in every variant") {
  // Query equidistant from samples 1 and 5, both at distance 1.
  const std::vector<double> xs{9, -1, 9, 9, 9, 1, 9, 9, 9};
  const std::vector<double> ys{9, 0, 9, 9, 9, 0, 9, 9, 9};
  for (Isa isa : available_isas()) {
    CAPTURE(kernels::isa_name(isa));
    const auto r = kernels::nearest_point(isa, xs, ys, 0.0, 0.0);
    CHECK(r.index == 1);
    CHECK(r.dist2 == 1.0);
  }
}

TEST_CASE("SIMD variants are bit-identical to the scalar reference") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> q(-60.0, 60.0);
  // Lengths straddle the vector width so every tail path runs.
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 100u, 1001u}) {
    const Cloud c = random_cloud(n, n * 7 + 1, 50.0);
    for (int k = 0; k < 200; ++k) {
      const double qx = q(rng), qy = q(rng);
      const auto ref = kernels::nearest_point_scalar(c.xs, c.ys, qx, qy);
      for (Isa isa : available_isas()) {
        const auto r = kernels::nearest_point(isa, c.xs, c.ys, qx, qy);
        REQUIRE(r.index == ref.index);
        REQUIRE(r.dist2 == ref.dist2);
      }
    }
  }
}

TEST_CASE("SIMD variants agree on duplicated points") {
  Cloud c = ring(64, 5.0);
  // Duplicate every sample so ties occur across vector lanes.
  Cloud d;
  for (std::size_t i = 0; i < c.xs.size(); ++i) {
    d.xs.push_back(c.xs[i]);
    d.xs.push_back(c.xs[i]);
    d.ys.push_back(c.ys[i]);
    d.ys.push_back(c.ys[i]);
  }
  for (int k = 0; k < 64; ++k) {
    const double a = 0.1 * k;
    const auto ref = kernels::nearest_point_scalar(d.xs, d.ys, 4.0 * std::cos(a), 4.0 * std::sin(a));
    CHECK(ref.index % 2 == 0);
    for (Isa isa : available_isas()) {
      const auto r = kernels::nearest_point(isa, d.xs, d.ys, 4.0 * std::cos(a), 4.0 * std::sin(a));
      CHECK(r.index == ref.index);
      CHECK(r.dist2 == ref.dist2);
    }
  }
}

TEST_CASE("dispatcher selects an available variant") {
  CHECK(kernels::isa_available(kernels::active_isa()));
  CHECK(kernels::isa_available(Isa::Scalar));
}

TEST_CASE("point grid matches brute force on curves and clouds") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> q(-80.0, 80.0);
  const std::vector<Cloud> clouds{ring(4000, 30.0), ring(17, 1.0), random_cloud(500, 3, 40.0),
                                  random_cloud(1, 9, 1.0)};
  for (const Cloud& c : clouds) {
    for (double cell : {0.0, 0.5, 7.0}) {
      const PointGrid grid(c.xs, c.ys, cell);
      REQUIRE(grid.size() == c.xs.size());
      for (int k = 0; k < 300; ++k) {
        const double qx = q(rng), qy = q(rng);
        const auto ref = kernels::nearest_point_scalar(c.xs, c.ys, qx, qy);
        const auto g = grid.nearest(qx, qy);
        REQUIRE(g.index == ref.index);
        REQUIRE(g.dist2 == ref.dist2);
        for (Isa isa : available_isas()) {
          const auto gi = grid.nearest(isa, qx, qy);
          REQUIRE(gi.index == ref.index);
          REQUIRE(gi.dist2 == ref.dist2);
        }
      }
    }
  }
}

TEST_CASE("point grid keeps the lowest index among coincident points") {
  const std::vector<double> xs{3.0, 0.0, 3.0, 0.0};
  const std::vector<double> ys{3.0, 0.0, 3.0, 0.0};
  const PointGrid grid(xs, ys, 1.0);
  CHECK(grid.nearest(0.1, 0.1).index == 1);
  CHECK(grid.nearest(2.9, 2.9).index == 0);
}
