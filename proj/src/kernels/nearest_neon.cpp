#include "raceopt/kernels/nearest.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#include <arm_neon.h>
#define RACEOPT_HAVE_NEON_KERNEL 1
#else
#define RACEOPT_HAVE_NEON_KERNEL 0
#endif

namespace raceopt::kernels {

#if RACEOPT_HAVE_NEON_KERNEL

NearestResult nearest_point_neon(std::span<const double> xs, std::span<const double> ys, double qx,
                                 double qy) {
  const std::size_t n = xs.size();
  if (n < 4) return nearest_point_scalar(xs, ys, qx, qy);

  const float64x2_t vqx = vdupq_n_f64(qx);
  const float64x2_t vqy = vdupq_n_f64(qy);
  const float64x2_t step = vdupq_n_f64(2.0);
  float64x2_t idx = {0.0, 1.0};
  float64x2_t best_d2 = vdupq_n_f64(__builtin_inf());
  float64x2_t best_idx = vdupq_n_f64(0.0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs.data() + i), vqx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys.data() + i), vqy);
    // vmulq + vaddq, never vfmaq: keeps parity with the scalar reference.
    const float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    const uint64x2_t better = vcltq_f64(d2, best_d2);
    best_d2 = vbslq_f64(better, d2, best_d2);
    best_idx = vbslq_f64(better, idx, best_idx);
    idx = vaddq_f64(idx, step);
  }

  double lane_d2[2];
  double lane_idx[2];
  vst1q_f64(lane_d2, best_d2);
  vst1q_f64(lane_idx, best_idx);
  NearestResult best{static_cast<std::size_t>(lane_idx[0]), lane_d2[0]};
  const auto i1 = static_cast<std::size_t>(lane_idx[1]);
  if (lane_d2[1] < best.dist2 || (lane_d2[1] == best.dist2 && i1 < best.index)) {
    best = {i1, lane_d2[1]};
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
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

#else

NearestResult nearest_point_neon(std::span<const double> xs, std::span<const double> ys, double qx,
                                 double qy) {
  return nearest_point_scalar(xs, ys, qx, qy);
}

#endif

}  // namespace raceopt::kernels
