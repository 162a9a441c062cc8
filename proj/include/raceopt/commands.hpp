#pragma once

// Multi-run experiment drivers shared by the command-line tool and tests.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "raceopt/experiment.hpp"

namespace raceopt {

struct ComparisonRun {
  OptimizerKind kind = OptimizerKind::Cma;
  std::uint64_t seed = 0;
  double best_s = 0.0;
  std::size_t evaluations = 0;
  std::size_t successes = 0;
  double initial_cov_norm = 0.0;
  double final_cov_norm = 0.0;
};

struct ComparisonSummary {
  std::size_t rank = 0;  // 1 = lowest median
  OptimizerKind kind = OptimizerKind::Cma;
  std::size_t runs = 0;
  double median_best_s = 0.0;
  double mean_best_s = 0.0;
  double min_best_s = 0.0;
  double max_best_s = 0.0;
};

double median(std::vector<double> values);

// One run per (kind, seed); sub-directories <out>/<kind>/seed_<seed> when
// out_dir is non-empty.
std::vector<ComparisonRun> compare_optimizers(const ExperimentConfig& base, std::span<const OptimizerKind> kinds,
                                              std::span<const std::uint64_t> seeds,
                                              const std::filesystem::path& out_dir, WorkerPool& pool);

// Ranked by median best score; ties keep the order of first appearance.
std::vector<ComparisonSummary> summarize_comparison(const std::vector<ComparisonRun>& runs);

void write_comparison_runs_csv(const std::filesystem::path& path, const std::vector<ComparisonRun>& runs);
void write_comparison_summary_csv(const std::filesystem::path& path, const std::vector<ComparisonSummary>& rows);

struct SweepCell {
  std::string label;
  ExperimentConfig config;
};

struct SweepRow {
  std::string label;
  ExperimentConfig config;
  RunResult run;
};

// Runs each cell into <out>/<label> when out_dir is non-empty.
std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& cells, const std::filesystem::path& out_dir,
                                WorkerPool& pool);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

}  // namespace raceopt
