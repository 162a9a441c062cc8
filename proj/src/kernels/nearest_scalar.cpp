#include "raceopt/kernels/nearest.hpp"

namespace raceopt::kernels {

NearestResult nearest_point_scalar(std::span<const double> xs, std::span<const double> ys, double qx,
                                   double qy) {
  NearestResult best{0, 0.0};
  const std::size_t n = xs.size();
  if (n == 0) return best;
  double dx = xs[0] - qx;
  double dy = ys[0] - qy;
  best.dist2 = dx * dx + dy * dy;
  for (std::size_t i = 1; i < n; ++i) {
    dx = xs[i] - qx;
    dy = ys[i] - qy;
    const double dxx = dx * dx;
    const double dyy = dy * dy;
    const double d2 = dxx + dyy;
    if (d2 < best.dist2) {
      best.dist2 = d2;
      best.index = i;
    }
  }
  return best;
}

}  // namespace raceopt::kernels
