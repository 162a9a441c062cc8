#include "raceopt/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <string>

#include "raceopt/error.hpp"
#include "raceopt/evaluator.hpp"

namespace raceopt {

WorkerPool::WorkerPool(std::size_t workers) : size_(workers) {
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (workers == 1) return;
  threads_.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::worker_loop() {
  std::unique_lock lock(mutex_);
  std::uint64_t seen = 0;
  for (;;) {
    wake_.wait(lock, [&] { return stop_ || epoch_ != seen; });
    if (stop_) return;
    seen = epoch_;
    drain(lock);
  }
}

void WorkerPool::drain(std::unique_lock<std::mutex>& lock) {
  while (job_ != nullptr && next_ < job_count_) {
    const std::size_t i = next_++;
    const auto* job = job_;
    lock.unlock();
    std::exception_ptr error;
    try {
      (*job)(i);
    } catch (...) {
      error = std::current_exception();
    }
    lock.lock();
    if (error) errors_[i] = error;
    if (++finished_ == job_count_) done_.notify_all();
  }
}

void WorkerPool::parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (threads_.empty()) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::unique_lock lock(mutex_);
  job_ = &fn;
  job_count_ = count;
  next_ = 0;
  finished_ = 0;
  errors_.assign(count, nullptr);
  ++epoch_;
  wake_.notify_all();
  done_.wait(lock, [&] { return finished_ == job_count_; });
  job_ = nullptr;
  for (auto& e : errors_) {
    if (e) std::rethrow_exception(e);
  }
}

GenerationLog reduce_generation(std::size_t generation, std::span<const double> scores, const Batch& cov_points,
                                double prior_best) {
  GenerationLog log;
  log.generation = generation;
  log.scores.assign(scores.begin(), scores.end());
  const double n = static_cast<double>(scores.size());
  double sum = 0.0;
  double best = prior_best;
  for (double s : scores) {
    sum += s;
    best = std::min(best, s);
  }
  log.mean_s = scores.empty() ? 0.0 : sum / n;
  double ss = 0.0;
  for (double s : scores) ss += (s - log.mean_s) * (s - log.mean_s);
  log.std_s = scores.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  log.best_s = best;
  log.cov_norm = cov_points.size() >= 2 ? covariance_norm(cov_points) : std::nan("");
  return log;
}

RunResult run_optimization(const Objective& objective, std::size_t dimension, const RunOptions& options,
                           WorkerPool& pool) {
  const auto start = std::chrono::steady_clock::now();
  auto optimizer = make_optimizer(options.optimizer, dimension, options.seed);
  const std::size_t lambda = optimizer->popsize();
  if (options.budget < lambda) {
    throw ConfigError("budget " + std::to_string(options.budget) + " is below one generation of " +
                      std::to_string(lambda));
  }
  const std::size_t generations = options.budget / lambda;

  RunResult result;
  result.popsize = lambda;
  result.generations.reserve(generations);

  // Single-point generations report the spread of a trailing window instead.
  const std::size_t window = std::max<std::size_t>(2, options.optimizer.nominal_workers);
  std::deque<Point> recent;

  std::vector<double> scores(lambda);
  for (std::size_t g = 0; g < generations; ++g) {
    const Batch batch = optimizer->ask();
    try {
      pool.parallel_for(lambda, [&](std::size_t i) { scores[i] = objective(batch[i]); });
    } catch (const std::exception& e) {
      throw Error("evaluation failed in generation " + std::to_string(g) + ": " + e.what());
    }
    for (std::size_t i = 0; i < lambda; ++i) {
      if (!std::isfinite(scores[i])) {
        throw Error("non-finite score in generation " + std::to_string(g) + ", candidate " + std::to_string(i));
      }
      if (scores[i] < result.best_score) {
        result.best_score = scores[i];
        result.best_unit = batch[i];
      }
      if (scores[i] < kDnfPenalty) ++result.successes;
    }
    optimizer->tell(batch, scores);

    GenerationLog log;
    const double prior = result.generations.empty() ? std::numeric_limits<double>::infinity()
                                                    : result.generations.back().best_s;
    if (lambda >= 2) {
      log = reduce_generation(g, scores, batch, prior);
    } else {
      for (const auto& p : batch) recent.push_back(p);
      while (recent.size() > window) recent.pop_front();
      log = reduce_generation(g, scores, Batch(recent.begin(), recent.end()), prior);
    }
    if (options.on_generation) options.on_generation(log);
    result.generations.push_back(std::move(log));
    result.evaluations += lambda;
  }
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<SensitivityRow> sensitivity_analysis(const Objective& objective, std::span<const double> base_unit,
                                                 const std::vector<bool>& mask, Subset subset,
                                                 std::span<const double> sigmas, std::size_t trials,
                                                 std::uint64_t seed, WorkerPool& pool) {
  if (trials == 0) throw ConfigError("trials must be > 0");
  if (mask.size() != base_unit.size()) throw ConfigError("mask length does not match the candidate");
  for (double s : sigmas) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("sigma must be finite and >= 0");
  }
  if (!(objective(base_unit) < kDnfPenalty)) throw Error("solution not valid");

  const std::size_t total = sigmas.size() * trials;
  std::vector<char> ok(total, 0);
  const auto seed_lo = static_cast<std::uint32_t>(seed);
  const auto seed_hi = static_cast<std::uint32_t>(seed >> 32);
  pool.parallel_for(total, [&](std::size_t k) {
    const std::size_t si = k / trials;
    const std::size_t t = k % trials;
    std::seed_seq seq{seed_lo, seed_hi, static_cast<std::uint32_t>(si), static_cast<std::uint32_t>(t)};
    Rng rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(base_unit.begin(), base_unit.end());
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (mask[j]) x[j] = std::clamp(x[j] + sigmas[si] * normal(rng), 0.0, 1.0);
    }
    ok[k] = objective(x) < kDnfPenalty ? 1 : 0;
  });

  std::vector<SensitivityRow> rows;
  rows.reserve(sigmas.size());
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    SensitivityRow row;
    row.sigma = sigmas[si];
    row.subset = subset;
    row.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) row.successes += static_cast<std::size_t>(ok[si * trials + t]);
    row.success_rate = static_cast<double>(row.successes) / static_cast<double>(trials);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("log_spaced needs 0 < lo <= hi");
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> isotonic_fit(std::span<const double> values) {
  struct Block {
    double sum;
    std::size_t count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean());
  return out;
}

bool has_no_increasing_trend(std::span<const double> values, double tol) {
  const auto fit = isotonic_fit(values);
  if (fit.empty()) return true;
  return fit.back() - fit.front() <= tol;
}

}  // namespace raceopt
