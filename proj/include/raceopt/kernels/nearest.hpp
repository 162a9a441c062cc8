#pragma once

// Nearest-sample search over a polyline stored as separate x/y arrays.
//
// This is the innermost loop of every simulation step (centerline and
// raceline projection), so it ships in several instruction-set variants.
// All variants compute squared distances with the same unfused
// multiply/add sequence and break ties toward the lowest index, which
// makes their results bit-identical to the scalar reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace raceopt::kernels {

struct NearestResult {
  std::size_t index = 0;
  double dist2 = 0.0;
};

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

// Requires xs.size() == ys.size() > 0.
NearestResult nearest_point_scalar(std::span<const double> xs, std::span<const double> ys, double qx,
                                   double qy);
NearestResult nearest_point_avx2(std::span<const double> xs, std::span<const double> ys, double qx,
                                 double qy);
NearestResult nearest_point_neon(std::span<const double> xs, std::span<const double> ys, double qx,
                                 double qy);

// True when the variant is compiled in and the running CPU supports it.
bool isa_available(Isa isa);

// Variant chosen at first use: the widest available ISA, unless the
// RACEOPT_SIMD environment variable names another one ("scalar", "avx2",
// "neon").
Isa active_isa();

NearestResult nearest_point(std::span<const double> xs, std::span<const double> ys, double qx,
                            double qy);

NearestResult nearest_point(Isa isa, std::span<const double> xs, std::span<const double> ys,
                            double qx, double qy);

}  // namespace raceopt::kernels
