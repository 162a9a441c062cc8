#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "raceopt/optimizers.hpp"
#include "raceopt/param_space.hpp"

namespace raceopt {

// Fixed pool of worker threads executing index-parallel loops. A pool of
// size 1 runs everything on the calling thread.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return size_; }

  // Calls fn(i) for every i in [0, count) and waits for all of them. If any
  // call throws, the exception from the lowest failing index is rethrown.
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

 private:
  std::size_t size_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t job_count_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  std::uint64_t epoch_ = 0;
  bool stop_ = false;
  std::vector<std::exception_ptr> errors_;

  void worker_loop();
  void drain(std::unique_lock<std::mutex>& lock);
};

// Pure, thread-safe objective over the unit cube. Lower is better; a score
// below kDnfPenalty marks a valid (successful) candidate.
using Objective = std::function<double(std::span<const double>)>;

struct GenerationLog {
  std::size_t generation = 0;
  std::vector<double> scores;
  double mean_s = 0.0;
  double std_s = 0.0;
  double best_s = 0.0;    // cumulative over all generations so far
  double cov_norm = 0.0;  // NaN when fewer than two points are available
};

// Summary statistics for one generation. `cov_points` is the batch whose
// spread is reported (normally the generation's own candidates).
GenerationLog reduce_generation(std::size_t generation, std::span<const double> scores, const Batch& cov_points,
                                double prior_best = std::numeric_limits<double>::infinity());

struct RunOptions {
  OptimizerSettings optimizer;
  std::size_t budget = 9600;
  std::uint64_t seed = 0;
  // Called on the coordinating thread after each generation.
  std::function<void(const GenerationLog&)> on_generation;
};

struct RunResult {
  std::vector<GenerationLog> generations;
  Point best_unit;
  double best_score = std::numeric_limits<double>::infinity();
  std::size_t popsize = 0;
  std::size_t evaluations = 0;
  std::size_t successes = 0;  // evaluations scoring below kDnfPenalty
  double wall_time_s = 0.0;
};

// Generation-synchronous ask / evaluate / tell loop. Runs budget / popsize
// whole generations; throws ConfigError when the budget is below one.
RunResult run_optimization(const Objective& objective, std::size_t dimension, const RunOptions& options,
                           WorkerPool& pool);

struct SensitivityRow {
  double sigma = 0.0;
  Subset subset = Subset::All;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
};

// Adds N(0, sigma^2) noise to the masked components of `base_unit`, clamps,
// evaluates `trials` samples per sigma. Each trial draws from its own
// generator seeded by (seed, sigma index, trial), so results do not depend
// on the pool size. Throws Error("solution not valid") when the unperturbed
// base fails.
std::vector<SensitivityRow> sensitivity_analysis(const Objective& objective, std::span<const double> base_unit,
                                                 const std::vector<bool>& mask, Subset subset,
                                                 std::span<const double> sigmas, std::size_t trials,
                                                 std::uint64_t seed, WorkerPool& pool);

// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

// Least-squares non-decreasing fit (pool adjacent violators).
std::vector<double> isotonic_fit(std::span<const double> values);

// True when the non-decreasing fit is flat, i.e. the data carry no
// increasing trend.
bool has_no_increasing_trend(std::span<const double> values, double tol = 1e-12);

}  // namespace raceopt
