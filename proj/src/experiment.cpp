#include "raceopt/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "raceopt/error.hpp"
#include "raceopt/io.hpp"

namespace raceopt {

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void to_json(nlohmann::json& j, const SimConfig& c) {
  j = nlohmann::json{{"dt_s", c.dt_s},
                     {"t_max_s", c.t_max_s},
                     {"laps_required", c.laps_required},
                     {"vehicle_half_width_m", c.vehicle_half_width_m},
                     {"lqr_horizon_dt_s", c.lqr_horizon_dt_s},
                     {"k_steer", c.gains.k_steer},
                     {"k_speed", c.gains.k_speed},
                     {"raceline_ds_m", c.raceline.ds},
                     {"vehicle", c.vehicle}};
}

void from_json(const nlohmann::json& j, SimConfig& c) {
  static const char* const kKeys[] = {"dt_s",    "t_max_s", "laps_required", "vehicle_half_width_m", "lqr_horizon_dt_s",
                                      "k_steer", "k_speed", "raceline_ds_m", "vehicle"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ConfigError("unknown sim setting: " + key);
    }
  }
  SimConfig out;
  read_key(j, "dt_s", out.dt_s);
  read_key(j, "t_max_s", out.t_max_s);
  read_key(j, "laps_required", out.laps_required);
  read_key(j, "vehicle_half_width_m", out.vehicle_half_width_m);
  read_key(j, "lqr_horizon_dt_s", out.lqr_horizon_dt_s);
  read_key(j, "k_steer", out.gains.k_steer);
  read_key(j, "k_speed", out.gains.k_speed);
  read_key(j, "raceline_ds_m", out.raceline.ds);
  if (j.contains("vehicle")) out.vehicle = j.at("vehicle").get<VehicleConstants>();
  out.raceline.a_long_max = out.vehicle.a_long_max_mps2;
  c = out;
}

void ExperimentConfig::validate() const {
  if (budget < 1) throw ConfigError("budget must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!is_race()) {
    const BenchFunction fn = parse_bench(objective);
    optimizer.validate(fn.dimension);
    if (budget < optimizer.resolved_popsize(fn.dimension)) throw ConfigError("budget is below one generation");
    return;
  }
  if (n_control_points < 4) throw ConfigError("n_control_points must be >= 4");
  if (!(sim.dt_s > 0.0) || !(sim.t_max_s > 0.0)) throw ConfigError("dt_s and t_max_s must be > 0");
  if (sim.laps_required < 1) throw ConfigError("laps_required must be >= 1");
  if (!(sim.raceline.ds > 0.0)) throw ConfigError("raceline_ds_m must be > 0");
  sim.vehicle.validate();
  BoundsConfig::from_name_or_file(bounds).validate();
  const std::size_t n = 4 + n_control_points + controller_param_count(controller);
  optimizer.validate(n);
  if (budget < optimizer.resolved_popsize(n)) throw ConfigError("budget is below one generation");
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"version", kVersion},
                     {"optimizer", c.optimizer},
                     {"objective", c.objective},
                     {"controller", controller_name(c.controller)},
                     {"track", c.track},
                     {"bounds", c.bounds},
                     {"n_control_points", c.n_control_points},
                     {"budget", c.budget},
                     {"workers", c.workers},
                     {"seed", c.seed},
                     {"sim", c.sim}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  ExperimentConfig out;
  for (const auto& [key, value] : j.items()) {
    if (key == "version") continue;
    if (key == "optimizer") {
      out.optimizer = value.get<OptimizerSettings>();
    } else if (key == "objective") {
      out.objective = value.get<std::string>();
    } else if (key == "controller") {
      out.controller = parse_controller(value.get<std::string>());
    } else if (key == "track") {
      out.track = value.get<std::string>();
    } else if (key == "bounds") {
      out.bounds = value.get<std::string>();
    } else if (key == "n_control_points") {
      out.n_control_points = value.get<std::size_t>();
    } else if (key == "budget") {
      out.budget = value.get<std::size_t>();
    } else if (key == "workers") {
      out.workers = value.get<std::size_t>();
    } else if (key == "seed") {
      out.seed = value.get<std::uint64_t>();
    } else if (key == "sim") {
      out.sim = value.get<SimConfig>();
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  c = out;
}

std::filesystem::path track_directory() {
  if (const char* env = std::getenv("RACEOPT_TRACK_DIR"); env != nullptr && *env != '\0') return env;
  return RACEOPT_DEFAULT_TRACK_DIR;
}

Track resolve_track(const std::string& name_or_path) {
  const std::filesystem::path as_path(name_or_path);
  if (as_path.has_extension() || as_path.has_parent_path()) {
    if (!std::filesystem::exists(as_path)) throw ConfigError("track file not found: " + name_or_path);
    return load_track(as_path);
  }
  const auto in_dir = track_directory() / (name_or_path + ".csv");
  if (std::filesystem::exists(in_dir)) return load_track(in_dir);
  const auto names = fixture_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return make_fixture(name_or_path);
  std::ostringstream msg;
  msg << "unknown track '" << name_or_path << "'; available:";
  for (const auto& n : names) msg << ' ' << n;
  throw ConfigError(msg.str());
}

Problem Problem::from_config(const ExperimentConfig& config) {
  Problem p;
  if (!config.is_race()) {
    p.bench_ = std::make_shared<const BenchFunction>(parse_bench(config.objective));
    return p;
  }
  Track track = resolve_track(config.track);
  SearchSpace space = build_space(config.controller, BoundsConfig::from_name_or_file(config.bounds),
                                  config.n_control_points)
                          .with_track_limits(track, config.sim.vehicle_half_width_m);
  SimConfig sim = config.sim;
  sim.record_trajectory = false;
  p.race_ = std::make_shared<const Race>(Race{std::move(track), std::move(space), sim});
  return p;
}

std::size_t Problem::dimension() const { return race_ ? race_->space.dimension() : bench_->dimension; }

double Problem::evaluate(std::span<const double> unit) const {
  if (bench_) return eval_bench(*bench_, unit);
  const Candidate c = race_->space.decode(unit);
  return raceopt::evaluate(c, race_->track, race_->space, race_->sim).score_s;
}

Objective Problem::objective() const {
  return [self = *this](std::span<const double> unit) { return self.evaluate(unit); };
}

LapResult Problem::replay(std::span<const double> unit) const {
  if (!race_) throw ConfigError("replay needs a racing objective");
  SimConfig sim = race_->sim;
  sim.record_trajectory = true;
  return raceopt::evaluate(race_->space.decode(unit), race_->track, race_->space, sim);
}

const Track& Problem::track() const {
  if (!race_) throw ConfigError("benchmark problems have no track");
  return race_->track;
}

const SearchSpace& Problem::space() const {
  if (!race_) throw ConfigError("benchmark problems have no search space");
  return race_->space;
}

const SimConfig& Problem::sim() const {
  if (!race_) throw ConfigError("benchmark problems have no simulator settings");
  return race_->sim;
}

nlohmann::json Problem::describe(std::span<const double> unit, double score) const {
  nlohmann::json j;
  j["unit"] = std::vector<double>(unit.begin(), unit.end());
  j["score_s"] = score;
  j["success"] = score < kDnfPenalty;
  if (race_) {
    j["decoded"] = candidate_to_json(race_->space, race_->space.decode(unit));
  } else {
    const double lo = bench_->domain_lower();
    const double hi = bench_->domain_upper();
    std::vector<double> x;
    for (double u : unit) x.push_back(lo + u * (hi - lo));
    j["decoded"] = nlohmann::json{{"function", bench_->name()}, {"x", x}};
  }
  return j;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  io::write_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_generations_csv(const std::filesystem::path& path, const std::vector<GenerationLog>& generations) {
  io::CsvWriter w(path);
  w.header({"gen", "mean_s", "std_s", "best_s", "cov_norm"});
  for (const auto& g : generations) {
    w.row({std::to_string(g.generation), io::format_double(g.mean_s), io::format_double(g.std_s),
           io::format_double(g.best_s), io::format_double(g.cov_norm)});
  }
}

void write_sensitivity_csv(const std::filesystem::path& path, const std::vector<SensitivityRow>& rows) {
  io::CsvWriter w(path);
  w.header({"sigma", "subset", "success_rate", "trials", "successes"});
  for (const auto& r : rows) {
    w.row({io::format_double(r.sigma), std::string(subset_name(r.subset)), io::format_double(r.success_rate),
           std::to_string(r.trials), std::to_string(r.successes)});
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                WorkerPool& pool) {
  config.validate();
  const Problem problem = Problem::from_config(config);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_json_file(out_dir / "config.json", nlohmann::json(config));
  }

  RunOptions options;
  options.optimizer = config.optimizer;
  options.budget = config.budget;
  options.seed = config.seed;

  ExperimentResult result;
  result.run = run_optimization(problem.objective(), problem.dimension(), options, pool);
  result.best = problem.describe(result.run.best_unit, result.run.best_score);
  if (problem.is_race()) result.best_replay = problem.replay(result.run.best_unit);

  if (!out_dir.empty()) {
    write_generations_csv(out_dir / "generations.csv", result.run.generations);
    write_json_file(out_dir / "best_candidate.json", result.best);
    if (result.best_replay) write_trajectory_csv(out_dir / "trajectory.csv", result.best_replay->trajectory);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  WorkerPool pool(config.workers);
  return run_experiment(config, out_dir, pool);
}

}  // namespace raceopt
