#include "raceopt/point_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "raceopt/error.hpp"

namespace raceopt {

PointGrid::PointGrid(std::span<const double> xs, std::span<const double> ys, double cell_size) {
  if (xs.size() != ys.size() || xs.empty()) throw ConfigError("PointGrid needs matching non-empty arrays");
  if (xs.size() >= std::numeric_limits<std::uint32_t>::max()) throw ConfigError("PointGrid: too many points");
  const std::size_t n = xs.size();

  double x1 = xs[0], y1 = ys[0];
  x0_ = xs[0];
  y0_ = ys[0];
  double path = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) throw ConfigError("PointGrid: non-finite point");
    x0_ = std::min(x0_, xs[i]);
    y0_ = std::min(y0_, ys[i]);
    x1 = std::max(x1, xs[i]);
    y1 = std::max(y1, ys[i]);
    if (i > 0) path += std::hypot(xs[i] - xs[i - 1], ys[i] - ys[i - 1]);
  }
  const double w = x1 - x0_;
  const double h = y1 - y0_;
  cell_ = cell_size > 0.0 ? cell_size : 10.0 * path / static_cast<double>(n);
  // Keep the bucket count within a small multiple of the point count.
  cell_ = std::max({cell_, std::sqrt(w * h / (4.0 * static_cast<double>(n))), 1e-9});
  nx_ = static_cast<long>(std::floor(w / cell_)) + 1;
  ny_ = static_cast<long>(std::floor(h / cell_)) + 1;

  auto bucket_of = [&](double x, double y) {
    const long cx = std::min(nx_ - 1, static_cast<long>(std::floor((x - x0_) / cell_)));
    const long cy = std::min(ny_ - 1, static_cast<long>(std::floor((y - y0_) / cell_)));
    return static_cast<std::size_t>(cy * nx_ + cx);
  };

  const auto buckets = static_cast<std::size_t>(nx_ * ny_);
  start_.assign(buckets + 1, 0);
  std::vector<std::size_t> bucket(n);
  for (std::size_t i = 0; i < n; ++i) {
    bucket[i] = bucket_of(xs[i], ys[i]);
    ++start_[bucket[i] + 1];
  }
  for (std::size_t b = 0; b < buckets; ++b) start_[b + 1] += start_[b];
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  xs_.resize(n);
  ys_.resize(n);
  order_.resize(n);
  // Stable: within a bucket, slots keep increasing input index.
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t slot = fill[bucket[i]]++;
    xs_[slot] = xs[i];
    ys_[slot] = ys[i];
    order_[slot] = static_cast<std::uint32_t>(i);
  }
}

kernels::NearestResult PointGrid::nearest(double qx, double qy) const {
  return nearest(kernels::active_isa(), qx, qy);
}

kernels::NearestResult PointGrid::nearest(kernels::Isa isa, double qx, double qy) const {
  if (empty()) throw ConfigError("nearest on an empty PointGrid");
  const double fx = std::floor((qx - x0_) / cell_);
  const double fy = std::floor((qy - y0_) / cell_);
  const long cx = static_cast<long>(std::clamp(fx, 0.0, static_cast<double>(nx_ - 1)));
  const long cy = static_cast<long>(std::clamp(fy, 0.0, static_cast<double>(ny_ - 1)));

  kernels::NearestResult best{0, std::numeric_limits<double>::infinity()};
  bool found = false;
  auto scan = [&](long bx, long by) {
    const auto b = static_cast<std::size_t>(by * nx_ + bx);
    const std::uint32_t lo = start_[b];
    const std::uint32_t hi = start_[b + 1];
    if (lo == hi) return;
    const auto r = kernels::nearest_point(isa, std::span(xs_).subspan(lo, hi - lo),
                                          std::span(ys_).subspan(lo, hi - lo), qx, qy);
    const std::size_t index = order_[lo + r.index];
    if (!found || r.dist2 < best.dist2 || (r.dist2 == best.dist2 && index < best.index)) {
      best = {index, r.dist2};
      found = true;
    }
  };

  const long max_ring = std::max({cx, nx_ - 1 - cx, cy, ny_ - 1 - cy});
  for (long ring = 0; ring <= max_ring; ++ring) {
    const long xa = cx - ring, xb = cx + ring, ya = cy - ring, yb = cy + ring;
    for (long by = std::max(ya, 0L); by <= std::min(yb, ny_ - 1); ++by) {
      const bool edge_row = (by == ya || by == yb);
      if (edge_row) {
        for (long bx = std::max(xa, 0L); bx <= std::min(xb, nx_ - 1); ++bx) scan(bx, by);
      } else {
        if (xa >= 0) scan(xa, by);
        if (xb < nx_ && xb != xa) scan(xb, by);
      }
    }
    // Every unvisited bucket lies at least ring * cell away.
    const double reach = static_cast<double>(ring) * cell_;
    if (found && best.dist2 <= reach * reach) break;
  }
  return best;
}

}  // namespace raceopt
