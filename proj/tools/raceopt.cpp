#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "raceopt/commands.hpp"
#include "raceopt/error.hpp"
#include "raceopt/experiment.hpp"
#include "raceopt/io.hpp"
#include "raceopt/raceline.hpp"
#include "raceopt/track.hpp"

namespace fs = std::filesystem;
using namespace raceopt;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageFailure = 2;

// Flags shared by every experiment-running subcommand. Unset flags leave
// the base configuration (defaults or --config file) untouched.
struct ExperimentFlags {
  std::optional<std::string> config;
  std::optional<std::string> optimizer;
  std::optional<std::size_t> popsize;
  std::optional<std::string> controller;
  std::optional<std::string> track;
  std::optional<std::string> bounds;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> objective;
  std::optional<std::size_t> control_points;
  std::optional<std::string> de_policy;
  std::optional<double> sigma0;
  std::string out;

  void attach(CLI::App* app, const std::string& default_out) {
    out = default_out;
    app->add_option("--config", config, "Experiment config JSON to start from");
    app->add_option("--optimizer", optimizer,
                    "cma | twopointsde | noisyde | pso | oneplusone | randomsearch");
    app->add_option("--popsize", popsize, "Population size (default: per optimizer)");
    app->add_option("--controller", controller, "pure_pursuit | stanley | lqr");
    app->add_option("--track", track, "Fixture name or path to a track CSV");
    app->add_option("--bounds", bounds, "original | relaxed | path to a bounds JSON");
    app->add_option("--budget", budget, "Total evaluations");
    app->add_option("--workers", workers, "Evaluation threads");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--objective", objective, "race | bench:<sphere|rosenbrock|rastrigin>:<dim>");
    app->add_option("--control-points", control_points, "Raceline control points");
    app->add_option("--de-policy", de_policy, "DE population rule: standard | dimension | large");
    app->add_option("--sigma0", sigma0, "Initial step size in the unit cube");
    app->add_option("--out", out, "Output directory")->capture_default_str();
  }

  ExperimentConfig resolve(ExperimentConfig cfg) const {
    if (config) {
      nlohmann::json j = read_json_file(*config);
      // Sweep configs wrap the shared experiment settings under "base".
      if (j.contains("base")) j = j.at("base");
      cfg = j.get<ExperimentConfig>();
    }
    if (optimizer) cfg.optimizer.kind = parse_optimizer(*optimizer);
    if (popsize) cfg.optimizer.popsize = *popsize;
    if (controller) cfg.controller = parse_controller(*controller);
    if (track) cfg.track = *track;
    if (bounds) cfg.bounds = *bounds;
    if (budget) cfg.budget = *budget;
    if (workers) cfg.workers = *workers;
    if (seed) cfg.seed = *seed;
    if (objective) cfg.objective = *objective;
    if (control_points) cfg.n_control_points = *control_points;
    if (de_policy) cfg.optimizer.de_policy = parse_popsize_policy(*de_policy);
    if (sigma0) cfg.optimizer.sigma0 = *sigma0;
    return cfg;
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("empty list: '" + text + "'");
  return out;
}

template <typename T>
std::vector<T> parse_numbers(const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      if constexpr (std::is_floating_point_v<T>) {
        out.push_back(static_cast<T>(std::stod(item, &used)));
      } else {
        out.push_back(static_cast<T>(std::stoull(item, &used)));
      }
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  return out;
}

void print_run(const ExperimentResult& r, const fs::path& out) {
  std::cout << "best_s " << io::format_double(r.run.best_score) << "\n"
            << "generations " << r.run.generations.size() << "\n"
            << "evaluations " << r.run.evaluations << "\n"
            << "successes " << r.run.successes << "\n"
            << "wall_time_s " << io::format_double(r.run.wall_time_s) << "\n"
            << "out " << out.string() << "\n";
}

nlohmann::json sweep_config(const std::string& command, const ExperimentConfig& base) {
  return nlohmann::json{{"version", kVersion}, {"command", command}, {"base", base}};
}

int run_optimize(const ExperimentFlags& flags, ExperimentConfig defaults) {
  const ExperimentConfig cfg = flags.resolve(std::move(defaults));
  const fs::path out(flags.out);
  const ExperimentResult r = run_experiment(cfg, out);
  print_run(r, out);
  return 0;
}

int run_compare(const ExperimentFlags& flags, const std::string& kinds_text, std::size_t seed_count) {
  const ExperimentConfig base = flags.resolve({});
  std::vector<OptimizerKind> kinds;
  for (const auto& name : split_list(kinds_text)) kinds.push_back(parse_optimizer(name));
  if (seed_count == 0) throw ConfigError("--seeds must be >= 1");
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < seed_count; ++i) seeds.push_back(base.seed + i);

  const fs::path out(flags.out);
  fs::create_directories(out);
  nlohmann::json meta = sweep_config("compare-optimizers", base);
  meta["optimizers"] = split_list(kinds_text);
  meta["seeds"] = seeds;
  write_json_file(out / "config.json", meta);

  WorkerPool pool(base.workers);
  const auto runs = compare_optimizers(base, kinds, seeds, out, pool);
  const auto summary = summarize_comparison(runs);
  write_comparison_runs_csv(out / "runs.csv", runs);
  write_comparison_summary_csv(out / "summary.csv", summary);
  for (const auto& s : summary) {
    std::cout << s.rank << " " << optimizer_name(s.kind) << " median_best_s " << io::format_double(s.median_best_s)
              << "\n";
  }
  return 0;
}

template <typename Apply>
int run_cells(const ExperimentFlags& flags, const std::string& command, const std::string& key,
              const std::vector<std::string>& values, Apply apply) {
  const ExperimentConfig base = flags.resolve({});
  std::vector<SweepCell> cells;
  for (const auto& v : values) {
    ExperimentConfig cfg = base;
    apply(cfg, v);
    cfg.validate();
    cells.push_back({key + "_" + v, cfg});
  }
  const fs::path out(flags.out);
  fs::create_directories(out);
  nlohmann::json meta = sweep_config(command, base);
  meta[key] = values;
  write_json_file(out / "config.json", meta);

  WorkerPool pool(base.workers);
  const auto rows = run_sweep(cells, out, pool);
  write_sweep_csv(out / "summary.csv", rows);
  for (const auto& r : rows) {
    std::cout << r.label << " best_s " << io::format_double(r.run.best_score) << " successes " << r.run.successes
              << "/" << r.run.evaluations << "\n";
  }
  return 0;
}

struct StoredRun {
  ExperimentConfig config;
  std::vector<double> unit;
};

StoredRun load_run(const fs::path& dir) {
  StoredRun run;
  run.config = read_json_file(dir / "config.json").get<ExperimentConfig>();
  const auto best = read_json_file(dir / "best_candidate.json");
  run.unit = best.at("unit").get<std::vector<double>>();
  return run;
}

int run_sensitivity(const std::string& run_dir, const std::string& out_text, const std::string& subsets_text,
                    const std::optional<std::string>& sigmas_text, double sigma_min, double sigma_max,
                    std::size_t sigma_count, std::size_t trials, std::uint64_t seed,
                    const std::optional<std::size_t>& workers) {
  StoredRun run = load_run(run_dir);
  if (workers) run.config.workers = *workers;
  std::vector<double> sigmas;
  if (sigmas_text) {
    sigmas = parse_numbers<double>(*sigmas_text);
  } else {
    sigmas.push_back(0.0);
    for (double s : log_spaced(sigma_min, sigma_max, sigma_count)) sigmas.push_back(s);
  }
  const Problem problem = Problem::from_config(run.config);
  if (!problem.is_race()) throw ConfigError("sensitivity needs a racing run");
  const fs::path out = out_text.empty() ? fs::path(run_dir) : fs::path(out_text);
  fs::create_directories(out);

  WorkerPool pool(run.config.workers);
  std::vector<SensitivityRow> rows;
  std::vector<std::string> subset_names;
  for (const auto& name : split_list(subsets_text)) {
    const Subset subset = parse_subset(name);
    subset_names.emplace_back(subset_name(subset));
    const auto part = sensitivity_analysis(problem.objective(), run.unit, problem.space().mask(subset), subset, sigmas,
                                           trials, seed, pool);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  write_sensitivity_csv(out / "sensitivity.csv", rows);
  write_json_file(out / "sensitivity_config.json",
                  nlohmann::json{{"version", kVersion},
                                 {"command", "sensitivity"},
                                 {"run", run_dir},
                                 {"base", run.config},
                                 {"sigmas", sigmas},
                                 {"subsets", subset_names},
                                 {"trials", trials},
                                 {"seed", seed}});
  for (const auto& r : rows) {
    std::cout << subset_name(r.subset) << " sigma " << io::format_double(r.sigma) << " success_rate "
              << io::format_double(r.success_rate) << "\n";
  }
  return 0;
}

int run_replay(const std::string& run_dir, const std::string& out_text) {
  const StoredRun run = load_run(run_dir);
  const Problem problem = Problem::from_config(run.config);
  if (!problem.is_race()) throw ConfigError("replay needs a racing run");
  const fs::path out = out_text.empty() ? fs::path(run_dir) : fs::path(out_text);
  fs::create_directories(out);
  const LapResult r = problem.replay(run.unit);
  write_trajectory_csv(out / "trajectory.csv", r.trajectory);
  const Candidate c = problem.space().decode(run.unit);
  RacelineOptions rl = run.config.sim.raceline;
  rl.a_long_max = run.config.sim.vehicle.a_long_max_mps2;
  write_raceline_csv(out / "raceline.csv", build_raceline(problem.track(), c.perturbs_m, c.v_min_mps, c.v_max_mps, rl));
  std::cout << "score_s " << io::format_double(r.score_s) << "\n"
            << "success " << (r.success ? "true" : "false") << "\n"
            << "laps_completed " << r.laps_completed << "\n"
            << "crash_reason " << crash_reason_name(r.crash_reason) << "\n"
            << "out " << out.string() << "\n";
  return 0;
}

int run_generate_tracks(const std::string& out_text) {
  const fs::path out = out_text.empty() ? track_directory() : fs::path(out_text);
  fs::create_directories(out);
  for (const auto& name : fixture_names()) {
    save_track(out / (name + ".csv"), make_fixture(name));
    std::cout << (out / (name + ".csv")).string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-free joint tuning of vehicle, raceline and controller parameters"};
  app.require_subcommand(1);

  ExperimentFlags optimize_flags;
  auto* optimize = app.add_subcommand("optimize", "Run one optimization experiment");
  optimize_flags.attach(optimize, "runs/optimize");

  ExperimentFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Run one optimizer on an analytic test function");
  bench_flags.attach(bench, "runs/bench");

  ExperimentFlags compare_flags;
  std::string compare_kinds = "cma,twopointsde,noisyde,pso,oneplusone,randomsearch";
  std::size_t compare_seeds = 10;
  auto* compare = app.add_subcommand("compare-optimizers", "Several optimizers over several seeds");
  compare_flags.attach(compare, "runs/compare");
  compare->add_option("--optimizers", compare_kinds, "Comma-separated optimizer list")->capture_default_str();
  compare->add_option("--seeds", compare_seeds, "Number of seeds, counted up from --seed")->capture_default_str();

  ExperimentFlags popsize_flags;
  std::string popsizes = "6,12,24,48,96";
  auto* popsize_sweep = app.add_subcommand("popsize-sweep", "One run per population size");
  popsize_flags.attach(popsize_sweep, "runs/popsize_sweep");
  popsize_sweep->add_option("--popsizes", popsizes, "Comma-separated population sizes")->capture_default_str();

  ExperimentFlags track_flags;
  std::string tracks = "spielberg,silverstone,monza";
  auto* track_sweep = app.add_subcommand("track-sweep", "One run per track");
  track_flags.attach(track_sweep, "runs/track_sweep");
  track_sweep->add_option("--tracks", tracks, "Comma-separated track names or paths")->capture_default_str();

  ExperimentFlags controller_flags;
  std::string controllers = "pure_pursuit,stanley,lqr";
  auto* controller_sweep = app.add_subcommand("controller-sweep", "One run per low-level controller");
  controller_flags.attach(controller_sweep, "runs/controller_sweep");
  controller_sweep->add_option("--controllers", controllers, "Comma-separated controllers")->capture_default_str();

  ExperimentFlags bounds_flags;
  std::string presets = "original,relaxed";
  auto* bounds_study = app.add_subcommand("bounds-study", "Valid-solution counts under several bounds presets");
  bounds_flags.attach(bounds_study, "runs/bounds_study");
  bounds_study->add_option("--presets", presets, "Comma-separated presets or bounds files")->capture_default_str();

  std::string sens_run, sens_out, sens_subsets = "all,physical,decision,control";
  std::optional<std::string> sens_sigmas;
  double sigma_min = 1e-4, sigma_max = 1.0;
  std::size_t sigma_count = 13, trials = 100;
  std::uint64_t sens_seed = 0;
  std::optional<std::size_t> sens_workers;
  auto* sensitivity = app.add_subcommand("sensitivity", "Success rate of a stored solution under Gaussian noise");
  sensitivity->add_option("--run", sens_run, "Run directory with config.json and best_candidate.json")->required();
  sensitivity->add_option("--out", sens_out, "Output directory (default: the run directory)");
  sensitivity->add_option("--subsets", sens_subsets, "all,physical,decision,control")->capture_default_str();
  sensitivity->add_option("--sigmas", sens_sigmas, "Explicit comma-separated sigma list");
  sensitivity->add_option("--sigma-min", sigma_min, "Smallest log-spaced sigma")->capture_default_str();
  sensitivity->add_option("--sigma-max", sigma_max, "Largest log-spaced sigma")->capture_default_str();
  sensitivity->add_option("--sigma-count", sigma_count, "Number of log-spaced sigmas")->capture_default_str();
  sensitivity->add_option("--trials", trials, "Samples per sigma")->capture_default_str();
  sensitivity->add_option("--seed", sens_seed, "Noise seed")->capture_default_str();
  sensitivity->add_option("--workers", sens_workers, "Evaluation threads");

  std::string replay_run, replay_out;
  auto* replay = app.add_subcommand("replay", "Re-simulate a stored best candidate and export its trajectory");
  replay->add_option("--run", replay_run, "Run directory with config.json and best_candidate.json")->required();
  replay->add_option("--out", replay_out, "Output directory (default: the run directory)");

  std::string tracks_out;
  auto* generate = app.add_subcommand("generate-tracks", "Write the built-in track fixtures as CSV");
  generate->add_option("--out", tracks_out, "Directory (default: the track directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageFailure;
  }

  try {
    if (optimize->parsed()) return run_optimize(optimize_flags, {});
    if (bench->parsed()) {
      ExperimentConfig defaults;
      defaults.objective = "bench:sphere:10";
      defaults.budget = 2400;
      return run_optimize(bench_flags, defaults);
    }
    if (compare->parsed()) return run_compare(compare_flags, compare_kinds, compare_seeds);
    if (popsize_sweep->parsed()) {
      return run_cells(popsize_flags, "popsize-sweep", "popsize", split_list(popsizes),
                       [](ExperimentConfig& c, const std::string& v) {
                         c.optimizer.popsize = parse_numbers<std::size_t>(v).front();
                       });
    }
    if (track_sweep->parsed()) {
      return run_cells(track_flags, "track-sweep", "track", split_list(tracks),
                       [](ExperimentConfig& c, const std::string& v) { c.track = v; });
    }
    if (controller_sweep->parsed()) {
      return run_cells(controller_flags, "controller-sweep", "controller", split_list(controllers),
                       [](ExperimentConfig& c, const std::string& v) { c.controller = parse_controller(v); });
    }
    if (bounds_study->parsed()) {
      return run_cells(bounds_flags, "bounds-study", "bounds", split_list(presets),
                       [](ExperimentConfig& c, const std::string& v) { c.bounds = v; });
    }
    if (sensitivity->parsed()) {
      return run_sensitivity(sens_run, sens_out, sens_subsets, sens_sigmas, sigma_min, sigma_max, sigma_count, trials,
                             sens_seed, sens_workers);
    }
    if (replay->parsed()) return run_replay(replay_run, replay_out);
    if (generate->parsed()) return run_generate_tracks(tracks_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageFailure;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageFailure;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed configuration: " << e.what() << "\n";
    return kUsageFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageFailure;
}
