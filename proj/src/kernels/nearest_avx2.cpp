#include "raceopt/kernels/nearest.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define RACEOPT_HAVE_AVX2_KERNEL 1
#else
#define RACEOPT_HAVE_AVX2_KERNEL 0
#endif

namespace raceopt::kernels {

#if RACEOPT_HAVE_AVX2_KERNEL

__attribute__((target("avx2"))) NearestResult nearest_point_avx2(std::span<const double> xs,
                                                                  std::span<const double> ys,
                                                                  double qx, double qy) {
  const std::size_t n = xs.size();
  if (n < 8) return nearest_point_scalar(xs, ys, qx, qy);

  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d step = _mm256_set1_pd(4.0);
  // Indices are carried as doubles; exact up to 2^53.
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  __m256d best_d2 = _mm256_set1_pd(__builtin_inf());
  __m256d best_idx = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + i), vqy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    // Strict less keeps the earliest index inside each lane.
    const __m256d better = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
    best_d2 = _mm256_blendv_pd(best_d2, d2, better);
    best_idx = _mm256_blendv_pd(best_idx, idx, better);
    idx = _mm256_add_pd(idx, step);
  }

  alignas(32) double lane_d2[4];
  alignas(32) double lane_idx[4];
  _mm256_store_pd(lane_d2, best_d2);
  _mm256_store_pd(lane_idx, best_idx);

  NearestResult best{static_cast<std::size_t>(lane_idx[0]), lane_d2[0]};
  for (int l = 1; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(lane_idx[l]);
    if (lane_d2[l] < best.dist2 || (lane_d2[l] == best.dist2 && li < best.index)) {
      best.dist2 = lane_d2[l];
      best.index = li;
    }
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

NearestResult nearest_point_avx2(std::span<const double> xs, std::span<const double> ys, double qx,
                                 double qy) {
  return nearest_point_scalar(xs, ys, qx, qy);
}

#endif

}  // namespace raceopt::kernels
