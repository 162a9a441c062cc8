#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "raceopt/benchfns.hpp"
#include "raceopt/evaluator.hpp"
#include "raceopt/optimizers.hpp"
#include "raceopt/orchestrator.hpp"

namespace raceopt {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  OptimizerSettings optimizer;
  // "race" or "bench:<name>:<dim>".
  std::string objective = "race";
  ControllerKind controller = ControllerKind::PurePursuit;
  std::string track = "spielberg";
  // Preset name or path to a bounds JSON file.
  std::string bounds = "original";
  std::size_t n_control_points = 100;
  std::size_t budget = 9600;
  std::size_t workers = 24;
  std::uint64_t seed = 0;
  SimConfig sim;

  bool is_race() const { return objective == "race"; }
  // Throws ConfigError.
  void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

void to_json(nlohmann::json& j, const SimConfig& c);
void from_json(const nlohmann::json& j, SimConfig& c);

// Directory searched for <name>.csv track files: $RACEOPT_TRACK_DIR, else
// the bundled tracks/ directory.
std::filesystem::path track_directory();

// A path to a CSV, a <name>.csv in track_directory(), or a built-in
// fixture name. Throws ConfigError listing the fixtures otherwise.
Track resolve_track(const std::string& name_or_path);

// Immutable evaluation context for one experiment: either the racing stack
// (track, search space, simulator settings) or an analytic benchmark.
class Problem {
 public:
  static Problem from_config(const ExperimentConfig& config);

  bool is_race() const { return race_ != nullptr; }
  std::size_t dimension() const;
  double evaluate(std::span<const double> unit) const;
  // Thread-safe closure sharing this problem's data.
  Objective objective() const;

  // Racing only: full rollout with the trajectory recorded.
  LapResult replay(std::span<const double> unit) const;
  const Track& track() const;
  const SearchSpace& space() const;
  const SimConfig& sim() const;

  // Unit vector, score, and decoded values.
  nlohmann::json describe(std::span<const double> unit, double score) const;

 private:
  struct Race {
    Track track;
    SearchSpace space;
    SimConfig sim;
  };
  std::shared_ptr<const Race> race_;
  std::shared_ptr<const BenchFunction> bench_;
};

struct ExperimentResult {
  RunResult run;
  nlohmann::json best;
  std::optional<LapResult> best_replay;
};

// Runs the configured experiment. With a non-empty out_dir, writes
// config.json, generations.csv, best_candidate.json and, for racing
// objectives, trajectory.csv.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                WorkerPool& pool);
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir = {});

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_generations_csv(const std::filesystem::path& path, const std::vector<GenerationLog>& generations);
void write_sensitivity_csv(const std::filesystem::path& path, const std::vector<SensitivityRow>& rows);

}  // namespace raceopt
