#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "raceopt/controllers.hpp"

namespace raceopt {

class Track;

struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
  bool contains(double v) const { return v >= lower && v <= upper; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct BoundsConfig {
  Interval mass_kg{3.0, 4.0};
  Interval cog_to_front_m{0.147, 0.170};
  Interval v_min_mps{0.5, 2.0};
  Interval v_max_mps{6.0, 15.0};
  Interval lookahead_m{0.2, 2.0};
  Interval gain_kp{0.01, 2.0};
  std::array<Interval, 4> lqr_q{Interval{0.001, 1.0}, Interval{0.001, 1.0}, Interval{0.001, 1.0},
                                Interval{0.001, 1.0}};
  Interval lqr_r{0.001, 1.0};
  // Symmetric cap on each lateral control-point offset [m].
  double perturb_halfwidth_m = 1.0;

  static BoundsConfig original();
  static BoundsConfig relaxed();
  // "original", "relaxed", or a path to a JSON file (missing keys fall back to original).
  static BoundsConfig from_name_or_file(const std::string& name_or_path);

  // Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const BoundsConfig&, const BoundsConfig&) = default;
};

void to_json(nlohmann::json& j, const BoundsConfig& b);
void from_json(const nlohmann::json& j, BoundsConfig& b);

// Parameter groups used by the sensitivity study masks.
enum class Subset { All, Physical, Decision, Control };
std::string_view subset_name(Subset s);
Subset parse_subset(std::string_view name);

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
};

// Decoded view of one point of the search space.
struct Candidate {
  std::vector<double> unit;
  double mass_kg = 0.0;
  double cog_to_front_m = 0.0;
  double v_min_mps = 0.0;
  double v_max_mps = 0.0;
  std::vector<double> perturbs_m;
  std::vector<double> controller_params;
};

// Concatenated physical / decision / control space over the unit cube.
// Layout: [mass, cog, v_min, v_max, perturb_0..perturb_{n-1}, controller...].
class SearchSpace {
 public:
  static constexpr double kDefaultWheelbase = 0.3302;

  SearchSpace(ControllerKind kind, BoundsConfig bounds, std::size_t n_control_points,
              double wheelbase_m = kDefaultWheelbase);

  // Replaces the uniform perturbation bound with per-control-point limits:
  // min(cap, narrower half-width - vehicle_half_width) at each point.
  SearchSpace with_track_limits(const Track& track, double vehicle_half_width_m) const;

  std::size_t dimension() const { return dimension_; }
  ControllerKind controller_kind() const { return kind_; }
  const BoundsConfig& bounds() const { return bounds_; }
  std::size_t n_control_points() const { return n_control_points_; }
  const std::vector<double>& perturb_halfwidths() const { return perturb_halfwidths_; }
  double wheelbase() const { return wheelbase_; }

  IndexRange physical() const { return {0, 2}; }
  IndexRange velocities() const { return {2, 4}; }
  IndexRange perturbations() const { return {4, 4 + n_control_points_}; }
  IndexRange control() const { return {4 + n_control_points_, dimension_}; }
  // Dimension mask for a sensitivity subset.
  std::vector<bool> mask(Subset subset) const;
  std::vector<Interval> controller_intervals() const;

  // Throws DecodeError for a wrong length, a component outside [0, 1], or a
  // CoG position not strictly inside the wheelbase.
  Candidate decode(std::span<const double> unit) const;
  // Throws EncodeError for values outside the bounds.
  std::vector<double> encode(const Candidate& candidate) const;

  Candidate midpoint() const;

 private:
  ControllerKind kind_;
  BoundsConfig bounds_;
  std::size_t n_control_points_;
  std::size_t dimension_;
  double wheelbase_;
  std::vector<double> perturb_halfwidths_;
};

SearchSpace build_space(ControllerKind kind, const BoundsConfig& bounds, std::size_t n_control_points = 100);

// Swaps the pair when v_min > v_max. Idempotent.
void repair_velocity_order(double& v_min, double& v_max);

nlohmann::json candidate_to_json(const SearchSpace& space, const Candidate& c);

}  // namespace raceopt
