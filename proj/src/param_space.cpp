#include "raceopt/param_space.hpp"

#include <cmath>

#include "raceopt/error.hpp"
#include "raceopt/io.hpp"
#include "raceopt/track.hpp"

namespace raceopt {

BoundsConfig BoundsConfig::original() { return BoundsConfig{}; }

BoundsConfig BoundsConfig::relaxed() {
  BoundsConfig b;
  b.mass_kg = {1.0, 10.0};
  b.cog_to_front_m = {0.001, 0.3};
  b.v_min_mps = {0.5, 10.0};
  b.v_max_mps = {10.0, 20.0};
  b.lookahead_m = {0.2, 10.0};
  return b;
}

BoundsConfig BoundsConfig::from_name_or_file(const std::string& name_or_path) {
  if (name_or_path == "original") return original();
  if (name_or_path == "relaxed") return relaxed();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(name_or_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid bounds file " + name_or_path + ": " + e.what());
  } catch (const LoadError&) {
    throw ConfigError("unknown bounds preset or missing file: " + name_or_path);
  }
  BoundsConfig b = j.get<BoundsConfig>();
  b.validate();
  return b;
}

void BoundsConfig::validate() const {
  auto check = [](const Interval& i, const std::string& name) {
    if (!std::isfinite(i.lower) || !std::isfinite(i.upper) || !(i.lower < i.upper)) {
      throw ConfigError("invalid interval for " + name + ": lower must be < upper");
    }
  };
  check(mass_kg, "mass_kg");
  check(cog_to_front_m, "cog_to_front_m");
  check(v_min_mps, "v_min_mps");
  check(v_max_mps, "v_max_mps");
  check(lookahead_m, "lookahead_m");
  check(gain_kp, "gain_kp");
  for (std::size_t i = 0; i < lqr_q.size(); ++i) check(lqr_q[i], "lqr_q" + std::to_string(i + 1));
  check(lqr_r, "lqr_r");
  if (!(mass_kg.lower > 0.0)) throw ConfigError("invalid interval for mass_kg: must be positive");
  if (!(cog_to_front_m.lower > 0.0)) throw ConfigError("invalid interval for cog_to_front_m: must be positive");
  if (!(v_min_mps.lower >= 0.0)) throw ConfigError("invalid interval for v_min_mps: must be non-negative");
  if (!(lookahead_m.lower > 0.0)) throw ConfigError("invalid interval for lookahead_m: must be positive");
  if (!(gain_kp.lower > 0.0)) throw ConfigError("invalid interval for gain_kp: must be positive");
  for (std::size_t i = 0; i < lqr_q.size(); ++i) {
    if (lqr_q[i].lower < 0.0) throw ConfigError("invalid interval for lqr_q" + std::to_string(i + 1) + ": negative");
  }
  if (!(lqr_r.lower > 0.0)) throw ConfigError("invalid interval for lqr_r: must be positive");
  if (v_min_mps.lower > v_max_mps.lower || v_min_mps.upper > v_max_mps.upper) {
    throw ConfigError("invalid interval for v_min_mps: must not extend above v_max_mps");
  }
  if (!(perturb_halfwidth_m > 0.0)) throw ConfigError("invalid value for perturb_halfwidth_m: must be > 0");
}

void to_json(nlohmann::json& j, const BoundsConfig& b) {
  auto iv = [](const Interval& i) { return nlohmann::json::array({i.lower, i.upper}); };
  j = nlohmann::json{{"mass_kg", iv(b.mass_kg)},
                     {"cog_to_front_m", iv(b.cog_to_front_m)},
                     {"v_min_mps", iv(b.v_min_mps)},
                     {"v_max_mps", iv(b.v_max_mps)},
                     {"lookahead_m", iv(b.lookahead_m)},
                     {"gain_kp", iv(b.gain_kp)},
                     {"q1", iv(b.lqr_q[0])},
                     {"q2", iv(b.lqr_q[1])},
                     {"q3", iv(b.lqr_q[2])},
                     {"q4", iv(b.lqr_q[3])},
                     {"r", iv(b.lqr_r)},
                     {"perturb_halfwidth_m", b.perturb_halfwidth_m}};
}

void from_json(const nlohmann::json& j, BoundsConfig& b) {
  BoundsConfig out;
  auto read = [&](const char* key, Interval& target) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(std::string("interval ") + key + " must be [lower, upper]");
    target = {v[0].get<double>(), v[1].get<double>()};
  };
  for (const auto& [key, value] : j.items()) {
    static const char* known[] = {"mass_kg", "cog_to_front_m", "v_min_mps", "v_max_mps", "lookahead_m", "gain_kp",
                                  "q1",      "q2",             "q3",        "q4",        "r",           "perturb_halfwidth_m"};
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown bounds field: " + key);
  }
  read("mass_kg", out.mass_kg);
  read("cog_to_front_m", out.cog_to_front_m);
  read("v_min_mps", out.v_min_mps);
  read("v_max_mps", out.v_max_mps);
  read("lookahead_m", out.lookahead_m);
  read("gain_kp", out.gain_kp);
  read("q1", out.lqr_q[0]);
  read("q2", out.lqr_q[1]);
  read("q3", out.lqr_q[2]);
  read("q4", out.lqr_q[3]);
  read("r", out.lqr_r);
  if (j.contains("perturb_halfwidth_m")) out.perturb_halfwidth_m = j.at("perturb_halfwidth_m").get<double>();
  b = out;
}

std::string_view subset_name(Subset s) {
  switch (s) {
    case Subset::All:
      return "all";
    case Subset::Physical:
      return "physical";
    case Subset::Decision:
      return "decision";
    case Subset::Control:
      return "control";
  }
  return "unknown";
}

Subset parse_subset(std::string_view name) {
  for (Subset s : {Subset::All, Subset::Physical, Subset::Decision, Subset::Control}) {
    if (name == subset_name(s)) return s;
  }
  throw ConfigError("unknown subset: " + std::string(name));
}

SearchSpace::SearchSpace(ControllerKind kind, BoundsConfig bounds, std::size_t n_control_points, double wheelbase_m)
    : kind_(kind),
      bounds_(bounds),
      n_control_points_(n_control_points),
      dimension_(4 + n_control_points + controller_param_count(kind)),
      wheelbase_(wheelbase_m),
      perturb_halfwidths_(n_control_points, bounds.perturb_halfwidth_m) {
  bounds_.validate();
  if (n_control_points < 4) throw ConfigError("n_control_points must be >= 4");
  if (!(bounds_.cog_to_front_m.upper < wheelbase_m)) {
    throw ConfigError("invalid interval for cog_to_front_m: upper bound must be below the wheelbase");
  }
}

SearchSpace build_space(ControllerKind kind, const BoundsConfig& bounds, std::size_t n_control_points) {
  return SearchSpace(kind, bounds, n_control_points);
}

SearchSpace SearchSpace::with_track_limits(const Track& track, double vehicle_half_width_m) const {
  SearchSpace out = *this;
  for (std::size_t i = 0; i < n_control_points_; ++i) {
    const double s = track.length() * static_cast<double>(i) / static_cast<double>(n_control_points_);
    const double free = std::min(track.width_left(s), track.width_right(s)) - vehicle_half_width_m;
    if (!(free > 0.0)) throw ConfigError("track narrower than the vehicle at control point " + std::to_string(i));
    out.perturb_halfwidths_[i] = std::min(bounds_.perturb_halfwidth_m, free);
  }
  return out;
}

std::vector<bool> SearchSpace::mask(Subset subset) const {
  std::vector<bool> m(dimension_, subset == Subset::All);
  auto set = [&](IndexRange r) {
    for (std::size_t i = r.begin; i < r.end; ++i) m[i] = true;
  };
  switch (subset) {
    case Subset::All:
      break;
    case Subset::Physical:
      set(physical());
      break;
    case Subset::Decision:
      set(velocities());
      set(perturbations());
      break;
    case Subset::Control:
      set(control());
      break;
  }
  return m;
}

std::vector<Interval> SearchSpace::controller_intervals() const {
  switch (kind_) {
    case ControllerKind::PurePursuit:
      return {bounds_.lookahead_m};
    case ControllerKind::Stanley:
      return {bounds_.gain_kp};
    case ControllerKind::Lqr:
      return {bounds_.lqr_q[0], bounds_.lqr_q[1], bounds_.lqr_q[2], bounds_.lqr_q[3], bounds_.lqr_r};
  }
  return {};
}

void repair_velocity_order(double& v_min, double& v_max) {
  if (v_min > v_max) std::swap(v_min, v_max);
}

namespace {

double affine(const Interval& i, double u) { return i.lower + u * (i.upper - i.lower); }

double inverse_affine(const Interval& i, double v, const char* field) {
  if (!std::isfinite(v) || !i.contains(v)) throw EncodeError(std::string("value outside bounds: ") + field);
  return (v - i.lower) / (i.upper - i.lower);
}

}  // namespace

Candidate SearchSpace::decode(std::span<const double> unit) const {
  if (unit.size() != dimension_) {
    throw DecodeError("unit vector has length " + std::to_string(unit.size()) + ", expected " +
                      std::to_string(dimension_));
  }
  for (std::size_t i = 0; i < unit.size(); ++i) {
    if (!(unit[i] >= 0.0 && unit[i] <= 1.0)) throw DecodeError("component " + std::to_string(i) + " outside [0, 1]");
  }
  Candidate c;
  c.unit.assign(unit.begin(), unit.end());
  c.mass_kg = affine(bounds_.mass_kg, unit[0]);
  c.cog_to_front_m = affine(bounds_.cog_to_front_m, unit[1]);
  if (!(c.cog_to_front_m > 0.0 && c.cog_to_front_m < wheelbase_)) {
    throw DecodeError("CoG-to-front distance must lie strictly inside the wheelbase");
  }
  c.v_min_mps = affine(bounds_.v_min_mps, unit[2]);
  c.v_max_mps = affine(bounds_.v_max_mps, unit[3]);
  repair_velocity_order(c.v_min_mps, c.v_max_mps);
  c.perturbs_m.resize(n_control_points_);
  for (std::size_t i = 0; i < n_control_points_; ++i) {
    c.perturbs_m[i] = (2.0 * unit[4 + i] - 1.0) * perturb_halfwidths_[i];
  }
  const auto ivs = controller_intervals();
  c.controller_params.resize(ivs.size());
  for (std::size_t i = 0; i < ivs.size(); ++i) c.controller_params[i] = affine(ivs[i], unit[control().begin + i]);
  return c;
}

std::vector<double> SearchSpace::encode(const Candidate& c) const {
  if (c.perturbs_m.size() != n_control_points_) throw EncodeError("perturbation count mismatch");
  const auto ivs = controller_intervals();
  if (c.controller_params.size() != ivs.size()) throw EncodeError("controller parameter count mismatch");
  std::vector<double> u(dimension_);
  u[0] = inverse_affine(bounds_.mass_kg, c.mass_kg, "mass_kg");
  u[1] = inverse_affine(bounds_.cog_to_front_m, c.cog_to_front_m, "cog_to_front_m");
  u[2] = inverse_affine(bounds_.v_min_mps, c.v_min_mps, "v_min_mps");
  u[3] = inverse_affine(bounds_.v_max_mps, c.v_max_mps, "v_max_mps");
  for (std::size_t i = 0; i < n_control_points_; ++i) {
    const double hw = perturb_halfwidths_[i];
    const double p = c.perturbs_m[i];
    if (!std::isfinite(p) || p < -hw || p > hw) throw EncodeError("perturbation outside bounds at " + std::to_string(i));
    u[4 + i] = 0.5 * (p / hw + 1.0);
  }
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    u[control().begin + i] = inverse_affine(ivs[i], c.controller_params[i], "controller parameter");
  }
  return u;
}

Candidate SearchSpace::midpoint() const { return decode(std::vector<double>(dimension_, 0.5)); }

nlohmann::json candidate_to_json(const SearchSpace& space, const Candidate& c) {
  nlohmann::json ctrl = nlohmann::json::object();
  switch (space.controller_kind()) {
    case ControllerKind::PurePursuit:
      ctrl["lookahead_m"] = c.controller_params[0];
      break;
    case ControllerKind::Stanley:
      ctrl["gain_kp"] = c.controller_params[0];
      break;
    case ControllerKind::Lqr:
      ctrl["q"] = std::vector<double>(c.controller_params.begin(), c.controller_params.begin() + 4);
      ctrl["r"] = c.controller_params[4];
      break;
  }
  return nlohmann::json{{"mass_kg", c.mass_kg},
                        {"cog_to_front_m", c.cog_to_front_m},
                        {"v_min_mps", c.v_min_mps},
                        {"v_max_mps", c.v_max_mps},
                        {"perturbs_m", c.perturbs_m},
                        {"controller", std::string(controller_name(space.controller_kind()))},
                        {"controller_params", ctrl}};
}

}  // namespace raceopt
