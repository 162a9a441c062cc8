#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "raceopt/kernels/nearest.hpp"

namespace raceopt {

// Uniform bucket grid over a fixed point set for exact nearest-point
// queries. Buckets are scanned ring by ring with the nearest-point kernel
// until no unvisited bucket can hold a closer point. Returns the same
// (index, dist2) as a brute-force scan, ties included.
class PointGrid {
 public:
  PointGrid() = default;
  // cell_size <= 0 picks roughly ten points per bucket along a curve.
  PointGrid(std::span<const double> xs, std::span<const double> ys, double cell_size = 0.0);

  bool empty() const { return order_.empty(); }
  std::size_t size() const { return order_.size(); }
  double cell_size() const { return cell_; }

  kernels::NearestResult nearest(double qx, double qy) const;
  kernels::NearestResult nearest(kernels::Isa isa, double qx, double qy) const;

 private:
  double x0_ = 0.0;
  double y0_ = 0.0;
  double cell_ = 1.0;
  long nx_ = 0;
  long ny_ = 0;
  std::vector<std::uint32_t> start_;  // bucket b holds sorted slots [start_[b], start_[b + 1])
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<std::uint32_t> order_;  // sorted slot -> input index
};

}  // namespace raceopt
