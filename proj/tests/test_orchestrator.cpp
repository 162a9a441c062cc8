#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "raceopt/benchfns.hpp"
#include "raceopt/error.hpp"
#include "raceopt/evaluator.hpp"
#include "raceopt/orchestrator.hpp"

using namespace raceopt;

namespace {

Objective sphere_objective(std::size_t n) {
  const BenchFunction fn = parse_bench("sphere:" + std::to_string(n));
  return [fn](std::span<const double> x) { return eval_bench(fn, x); };
}

// Succeeds while every coordinate stays within `radius` of the centre.
Objective box_objective(double radius) {
  return [radius](std::span<const double> x) {
    for (double v : x) {
      if (std::abs(v - 0.5) > radius) return kDnfPenalty;
    }
    return 1.0;
  };
}

bool same_logs(const RunResult& a, const RunResult& b) {
  if (a.generations.size() != b.generations.size()) return false;
  for (std::size_t g = 0; g < a.generations.size(); ++g) {
    const auto& x = a.generations[g];
    const auto& y = b.generations[g];
    if (x.scores != y.scores || x.mean_s != y.mean_s || x.std_s != y.std_s || x.best_s != y.best_s) return false;
    if (!(x.cov_norm == y.cov_norm || (std::isnan(x.cov_norm) && std::isnan(y.cov_norm)))) return false;
  }
  return a.best_unit == b.best_unit && a.best_score == b.best_score;
}

}  // namespace

TEST_CASE("worker pool visits every index once") {
  for (std::size_t workers : {1u, 3u, 8u}) {
    WorkerPool pool(workers);
    CHECK(pool.size() == workers);
    std::vector<std::atomic<int>> hits(1000);
    pool.parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
    pool.parallel_for(0, [](std::size_t) { FAIL("called for an empty range"); });
  }
}

TEST_CASE("worker pool rethrows the lowest failing index") {
  WorkerPool pool(4);
  try {
    pool.parallel_for(200, [](std::size_t i) {
      if (i % 50 == 17) throw std::runtime_error("index " + std::to_string(i));
    });
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "index 17");
  }
  // The pool is reusable afterwards.
  std::atomic<int> n{0};
  pool.parallel_for(10, [&](std::size_t) { ++n; });
  CHECK(n.load() == 10);
}

TEST_CASE("generation summary statistics") {
  const std::vector<double> scores{10.0, 20.0};
  const GenerationLog log = reduce_generation(3, scores, {{0.0}, {1.0}});
  CHECK(log.generation == 3);
  CHECK(log.mean_s == 15.0);
  CHECK(log.std_s == doctest::Approx(7.0710678118654755));
  CHECK(log.best_s == 10.0);
  CHECK(log.cov_norm == doctest::Approx(0.5));

  CHECK(reduce_generation(4, scores, {{0.0}, {1.0}}, 8.0).best_s == 8.0);

  const std::vector<double> dnf(5, kDnfPenalty);
  const GenerationLog all_dnf = reduce_generation(0, dnf, Batch(5, Point{0.2, 0.7}));
  CHECK(all_dnf.mean_s == kDnfPenalty);
  CHECK(all_dnf.std_s == 0.0);
  CHECK(all_dnf.best_s == kDnfPenalty);
  CHECK(all_dnf.cov_norm < 1e-15);

  const GenerationLog single = reduce_generation(0, std::vector<double>{4.0}, {{0.5}});
  CHECK(single.std_s == 0.0);
  CHECK(std::isnan(single.cov_norm));
}

TEST_CASE("budget is spent in whole generations") {
  WorkerPool pool(1);
  RunOptions opt;
  opt.optimizer.kind = OptimizerKind::RandomSearch;
  opt.optimizer.popsize = 24;
  opt.budget = 9600;
  std::size_t calls = 0;
  opt.on_generation = [&](const GenerationLog& g) { CHECK(g.generation == calls++); };
  const RunResult r = run_optimization(sphere_objective(3), 3, opt, pool);
  CHECK(r.generations.size() == 400);
  CHECK(calls == 400);
  CHECK(r.evaluations == 9600);
  CHECK(r.popsize == 24);
  CHECK(r.successes == 9600);

  opt.budget = 100;
  opt.on_generation = nullptr;
  const RunResult partial = run_optimization(sphere_objective(3), 3, opt, pool);
  CHECK(partial.generations.size() == 4);
  CHECK(partial.evaluations == 96);

  opt.budget = 10;
  CHECK_THROWS_AS(run_optimization(sphere_objective(3), 3, opt, pool), ConfigError);
}

TEST_CASE("best score is cumulative and matches the best point") {
  WorkerPool pool(2);
  for (OptimizerKind kind : all_optimizers()) {
    CAPTURE(optimizer_name(kind));
    RunOptions opt;
    opt.optimizer.kind = kind;
    opt.budget = 600;
    opt.seed = 5;
    const auto obj = sphere_objective(4);
    const RunResult r = run_optimization(obj, 4, opt, pool);
    double prev = std::numeric_limits<double>::infinity();
    double min_seen = prev;
    for (const auto& g : r.generations) {
      CHECK(g.best_s <= prev);
      for (double s : g.scores) min_seen = std::min(min_seen, s);
      CHECK(g.best_s == min_seen);
      prev = g.best_s;
    }
    CHECK(r.best_score == prev);
    CHECK(obj(r.best_unit) == r.best_score);
  }
}

TEST_CASE("results do not depend on the number of workers") {
  for (OptimizerKind kind : all_optimizers()) {
    CAPTURE(optimizer_name(kind));
    RunOptions opt;
    opt.optimizer.kind = kind;
    opt.budget = 480;
    opt.seed = 7;
    WorkerPool one(1), four(4);
    const RunResult a = run_optimization(sphere_objective(6), 6, opt, one);
    const RunResult b = run_optimization(sphere_objective(6), 6, opt, four);
    CHECK(same_logs(a, b));
  }
}

TEST_CASE("single-point generations report a trailing-window spread") {
  WorkerPool pool(1);
  RunOptions opt;
  opt.optimizer.kind = OptimizerKind::OnePlusOne;
  opt.budget = 50;
  const RunResult r = run_optimization(sphere_objective(3), 3, opt, pool);
  REQUIRE(r.generations.size() == 50);
  CHECK(std::isnan(r.generations[0].cov_norm));
  for (std::size_t g = 1; g < r.generations.size(); ++g) CHECK(std::isfinite(r.generations[g].cov_norm));
}

TEST_CASE("evaluation failures are reported") {
  WorkerPool pool(2);
  RunOptions opt;
  opt.optimizer.kind = OptimizerKind::RandomSearch;
  opt.optimizer.popsize = 4;
  opt.budget = 8;
  const Objective nan_obj = [](std::span<const double>) { return std::nan(""); };
  CHECK_THROWS_AS(run_optimization(nan_obj, 2, opt, pool), Error);
  const Objective throwing = [](std::span<const double>) -> double { throw std::runtime_error("boom"); };
  CHECK_THROWS_AS(run_optimization(throwing, 2, opt, pool), Error);
}

TEST_CASE("sensitivity at zero noise reproduces the valid base") {
  WorkerPool pool(2);
  const std::vector<double> base(5, 0.5);
  const std::vector<double> sigmas{0.0, 0.01, 1.0};
  const auto rows = sensitivity_analysis(box_objective(0.2), base, std::vector<bool>(5, true), Subset::All, sigmas,
                                         50, 3, pool);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].success_rate == 1.0);
  CHECK(rows[0].successes == 50);
  CHECK(rows[1].success_rate == 1.0);
  CHECK(rows[2].success_rate < 0.2);
  for (const auto& r : rows) {
    CHECK(r.trials == 50);
    CHECK(r.subset == Subset::All);
  }
}

TEST_CASE("sensitivity leaves unmasked coordinates alone") {
  WorkerPool pool(1);
  // Only coordinate 0 matters; perturbing the others never hurts.
  const Objective obj = [](std::span<const double> x) { return std::abs(x[0] - 0.5) < 0.1 ? 1.0 : kDnfPenalty; };
  const std::vector<double> base(4, 0.5);
  const std::vector<double> sigmas{0.5};
  const auto rows =
      sensitivity_analysis(obj, base, {false, true, true, true}, Subset::Decision, sigmas, 100, 1, pool);
  CHECK(rows[0].success_rate == 1.0);
}

TEST_CASE("sensitivity is independent of the pool and reproducible") {
  const std::vector<double> base(6, 0.5);
  const auto sigmas = log_spaced(1e-3, 1.0, 7);
  WorkerPool one(1), five(5);
  const auto mask = std::vector<bool>(6, true);
  const auto a = sensitivity_analysis(box_objective(0.25), base, mask, Subset::All, sigmas, 40, 9, one);
  const auto b = sensitivity_analysis(box_objective(0.25), base, mask, Subset::All, sigmas, 40, 9, five);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].successes == b[i].successes);
  const auto c = sensitivity_analysis(box_objective(0.25), base, mask, Subset::All, sigmas, 40, 10, one);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i].successes != c[i].successes;
  CHECK(diff > 0);
}

TEST_CASE("sensitivity rejects an invalid base") {
  WorkerPool pool(1);
  const std::vector<double> base(3, 0.95);
  const std::vector<double> sigmas{0.1};
  CHECK_THROWS_WITH_AS(sensitivity_analysis(box_objective(0.2), base, std::vector<bool>(3, true), Subset::All,
                                            sigmas, 10, 0, pool),
                       "solution not valid", Error);
  const std::vector<double> ok(3, 0.5);
  CHECK_THROWS_AS(sensitivity_analysis(box_objective(0.2), ok, std::vector<bool>(2, true), Subset::All, sigmas, 10,
                                       0, pool),
                  ConfigError);
  const std::vector<double> negative{-0.1};
  CHECK_THROWS_AS(sensitivity_analysis(box_objective(0.2), ok, std::vector<bool>(3, true), Subset::All, negative,
                                       10, 0, pool),
                  ConfigError);
}

TEST_CASE("log spacing") {
  const auto v = log_spaced(1e-4, 1.0, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 1e-4);
  CHECK(v.back() == 1.0);
  CHECK(v[2] == doctest::Approx(1e-2));
  for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] / v[i - 1] == doctest::Approx(10.0));
  CHECK(log_spaced(0.5, 0.5, 1) == std::vector<double>{0.5});
  CHECK_THROWS_AS(log_spaced(0.0, 1.0, 3), ConfigError);
}

TEST_CASE("isotonic fit pools adjacent violators") {
  CHECK(isotonic_fit(std::vector<double>{1, 3, 2, 4}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(isotonic_fit(std::vector<double>{3, 2, 1}) == std::vector<double>{2, 2, 2});
  CHECK(isotonic_fit(std::vector<double>{1, 2, 3}) == std::vector<double>{1, 2, 3});
  CHECK(isotonic_fit(std::vector<double>{}).empty());

  // Monotone output, same total as the input.
  const std::vector<double> noisy{0.9, 1.0, 0.7, 0.8, 0.3, 0.5, 0.1, 0.0};
  const auto fit = isotonic_fit(noisy);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) {
    a += fit[i];
    b += noisy[i];
    if (i > 0) CHECK(fit[i] >= fit[i - 1]);
  }
  CHECK(a == doctest::Approx(b));
}

TEST_CASE("trend detection on success-rate curves") {
  CHECK(has_no_increasing_trend(std::vector<double>{1.0, 1.0, 0.98, 0.7, 0.2, 0.0}));
  CHECK(has_no_increasing_trend(std::vector<double>{1.0, 0.9, 0.92, 0.5}));
  CHECK_FALSE(has_no_increasing_trend(std::vector<double>{0.2, 0.4, 0.3, 0.9}));
  CHECK(has_no_increasing_trend(std::vector<double>{}));
}
