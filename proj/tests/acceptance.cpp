// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "raceopt/benchfns.hpp"
#include "raceopt/experiment.hpp"
#include "raceopt/io.hpp"
#include "raceopt/optimizers.hpp"
#include "raceopt/orchestrator.hpp"
#include "raceopt/raceline.hpp"
#include "raceopt/track.hpp"
#include "raceopt/vehicle.hpp"

using namespace raceopt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

WorkerPool& pool() {
  static WorkerPool p(std::max(1u, std::thread::hardware_concurrency()));
  return p;
}

fs::path scratch() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / "raceopt_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + RACEOPT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunResult run_bench(const std::string& objective, OptimizerKind kind, std::size_t budget, std::uint64_t seed,
                    std::optional<std::size_t> popsize = std::nullopt) {
  const BenchFunction fn = parse_bench(objective);
  RunOptions opt;
  opt.optimizer.kind = kind;
  opt.optimizer.popsize = popsize;
  opt.budget = budget;
  opt.seed = seed;
  const Objective obj = [fn](std::span<const double> x) { return eval_bench(fn, x); };
  return run_optimization(obj, fn.dimension, opt, pool());
}

// The oval experiment shared by criteria 7 to 10.
ExperimentConfig oval_config(ControllerKind controller, const std::string& bounds) {
  ExperimentConfig c;
  c.track = "oval";
  c.controller = controller;
  c.bounds = bounds;
  c.n_control_points = 30;
  c.budget = 960;
  c.seed = 0;
  c.optimizer.kind = OptimizerKind::Cma;
  c.optimizer.popsize = 24;
  return c;
}

struct OvalRun {
  RunResult run;
  double baseline_s = 0.0;
  double seconds = 0.0;
};

const OvalRun& oval_run(ControllerKind controller, const std::string& bounds = "original") {
  static std::map<std::pair<int, std::string>, OvalRun> cache;
  const auto key = std::make_pair(static_cast<int>(controller), bounds);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = oval_config(controller, bounds);
  const Problem problem = Problem::from_config(cfg);
  OvalRun r;
  r.baseline_s = problem.evaluate(std::vector<double>(problem.dimension(), 0.5));
  RunOptions opt;
  opt.optimizer = cfg.optimizer;
  opt.budget = cfg.budget;
  opt.seed = cfg.seed;
  r.run = run_optimization(problem.objective(), problem.dimension(), opt, pool());
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return cache.emplace(key, std::move(r)).first->second;
}

Outcome criterion_1() {
  const fs::path a = scratch() / "det_w1", b = scratch() / "det_w8";
  const auto t0 = std::chrono::steady_clock::now();
  const int ra = run_cli("optimize --budget 480 --seed 7 --workers 1 --out " + a.string());
  const int rb = run_cli("optimize --budget 480 --seed 7 --workers 8 --out " + b.string());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (ra != 0 || rb != 0) return {false, "CLI exit codes " + std::to_string(ra) + "/" + std::to_string(rb)};
  const bool gens = io::read_file(a / "generations.csv") == io::read_file(b / "generations.csv");
  const bool best = io::read_file(a / "best_candidate.json") == io::read_file(b / "best_candidate.json");
  return {gens && best && secs < 120.0, std::string("generations.csv ") + (gens ? "identical" : "DIFFERENT") +
                                            ", best_candidate.json " + (best ? "identical" : "DIFFERENT") +
                                            ", both runs " + fmt(secs) + " s"};
}

Outcome criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::map<OptimizerKind, double> med;
  for (OptimizerKind k : all_optimizers()) {
    std::vector<double> best;
    for (std::uint64_t seed = 0; seed < 10; ++seed) best.push_back(run_bench("rosenbrock:5", k, 2000, seed).best_score);
    med[k] = median_of(best);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = secs < 60.0;
  std::string detail = "medians:";
  for (OptimizerKind k : all_optimizers()) {
    detail += " " + std::string(optimizer_name(k)) + "=" + fmt(med[k]);
    if (k != OptimizerKind::RandomSearch && !(med[k] < med[OptimizerKind::RandomSearch])) ok = false;
  }
  return {ok, detail + ", " + fmt(secs) + " s"};
}

Outcome criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> best;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    best.push_back(run_bench("sphere:10", OptimizerKind::Cma, 4800, seed, 24).best_score);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double m = median_of(best);
  return {m < 1e-6 && secs < 30.0, "CMA seed-median best " + fmt(m) + " (< 1e-6), " + fmt(secs) + " s"};
}

Outcome criterion_4() {
  const std::vector<OptimizerKind> kinds{OptimizerKind::Cma,  OptimizerKind::OnePlusOne, OptimizerKind::RandomSearch,
                                         OptimizerKind::Pso,  OptimizerKind::TwoPointsDe, OptimizerKind::NoisyDe};
  int cma_ok = 0, one_ok = 0, rs_ok = 0, pso_ok = 0;
  std::string pso_norms, tp_norms, noisy_norms;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::map<OptimizerKind, RunResult> r;
    for (OptimizerKind k : kinds) {
      r[k] = run_bench("sphere:10", k, 4800, seed, k == OptimizerKind::Cma ? std::optional<std::size_t>(24) : std::nullopt);
    }
    auto final_norm = [&](OptimizerKind k) { return r[k].generations.back().cov_norm; };
    cma_ok += final_norm(OptimizerKind::Cma) < 1e-3;
    one_ok += final_norm(OptimizerKind::OnePlusOne) < 1e-3;
    const double ratio = final_norm(OptimizerKind::RandomSearch) / r[OptimizerKind::RandomSearch].generations.front().cov_norm;
    rs_ok += ratio >= 0.5 && ratio <= 2.0;
    const double pso = final_norm(OptimizerKind::Pso);
    pso_ok += pso > final_norm(OptimizerKind::TwoPointsDe) && pso > final_norm(OptimizerKind::NoisyDe);
    pso_norms += (seed ? "/" : "") + fmt(pso);
    tp_norms += (seed ? "/" : "") + fmt(final_norm(OptimizerKind::TwoPointsDe));
    noisy_norms += (seed ? "/" : "") + fmt(final_norm(OptimizerKind::NoisyDe));
  }
  const bool ok = cma_ok >= 3 && one_ok >= 3 && rs_ok >= 3 && pso_ok >= 3;
  return {ok, "seeds passing of 5: CMA<1e-3 " + std::to_string(cma_ok) + ", (1+1)<1e-3 " + std::to_string(one_ok) +
                  ", RandomSearch ratio in [0.5,2] " + std::to_string(rs_ok) + ", PSO>DE " + std::to_string(pso_ok) +
                  " (final norms PSO " + pso_norms + "; TwoPointsDE " + tp_norms + "; NoisyDE " + noisy_norms + ")"};
}

Outcome criterion_5() {
  const VehicleParams p;
  VehicleState s;
  for (int i = 0; i < 100; ++i) s = step(s, p, {0.0, 2.0});
  const double straight_err = std::abs(s.x_m - 1.0);

  const double v = 0.4, delta = 0.2;
  VehicleState k;
  k.v_mps = v;
  k.steer_rad = delta;
  k.yaw_rate_radps = v * std::tan(delta) / p.wheelbase();
  k.slip_angle_rad = std::atan(p.l_r_m() * std::tan(delta) / p.wheelbase());
  double yaw_err = 0.0;
  for (int i = 0; i < 50; ++i) {
    const VehicleState next = step(k, p, {});
    yaw_err = std::max(yaw_err, std::abs((next.yaw_rad - k.yaw_rad) / kDefaultTimeStep - v * std::tan(delta) / p.wheelbase()));
    k = next;
  }

  double gap = 0.0;
  for (double d : {0.0, 0.05, -0.2, 0.4}) {
    for (double a : {0.0, 3.0, -3.0}) {
      VehicleState lo, hi;
      for (auto [st, vel] : {std::pair<VehicleState*, double>{&lo, 0.5 - 1e-6}, {&hi, 0.5 + 1e-6}}) {
        st->v_mps = vel;
        st->steer_rad = d;
        st->yaw_rate_radps = vel * std::tan(d) / p.wheelbase();
        st->slip_angle_rad = std::atan(p.l_r_m() * std::tan(d) / p.wheelbase());
      }
      const VehicleState x = step(lo, p, {0.5, a}), y = step(hi, p, {0.5, a});
      gap = std::max({gap, std::abs(x.x_m - y.x_m), std::abs(x.y_m - y.y_m), std::abs(x.yaw_rad - y.yaw_rad),
                      std::abs(x.v_mps - y.v_mps), std::abs(x.steer_rad - y.steer_rad),
                      std::abs(x.yaw_rate_radps - y.yaw_rate_radps), std::abs(x.slip_angle_rad - y.slip_angle_rad)});
    }
  }
  return {straight_err < 1e-3 && yaw_err < 1e-6 && gap < 1e-3,
          "straight error " + fmt(straight_err) + " m, yaw-rate error " + fmt(yaw_err) + ", blend gap " + fmt(gap)};
}

Outcome criterion_6() {
  const Track circle = make_circle_track(10.0, 64, 2.0, true);
  double kappa_err = 0.0;
  for (int k = 0; k < 400; ++k) {
    kappa_err = std::max(kappa_err, std::abs(curvature_at(circle.spline(), circle.length() * k / 400.0) - 0.1));
  }

  double raceline_err = 0.0;
  for (const char* name : {"oval", "spielberg", "silverstone", "monza"}) {
    const Track t = make_fixture(name);
    const Raceline r = build_raceline(t, std::vector<double>(100, 0.0), 2.0, 8.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      raceline_err = std::max(raceline_err, std::abs(t.project({r.x()[i], r.y()[i]}).d));
    }
  }

  double roundtrip_err = 0.0;
  for (const char* name : {"oval", "spielberg", "circle"}) {
    const Track t = make_fixture(name);
    for (int k = 0; k < 200; ++k) {
      const double s = t.length() * (k + 0.37) / 200.0;
      const double d = 1.2 * std::sin(0.7 * k);
      const CenterlineProjection pr = t.project(t.offset_point(s, d));
      double ds = std::abs(pr.s - s);
      ds = std::min(ds, t.length() - ds);
      roundtrip_err = std::max({roundtrip_err, ds, std::abs(pr.d - d)});
    }
  }
  return {kappa_err < 1e-3 && raceline_err < 1e-6 && roundtrip_err < 1e-3,
          "circle curvature error " + fmt(kappa_err) + ", zero-perturbation deviation " + fmt(raceline_err) +
              " m, offset/project roundtrip " + fmt(roundtrip_err)};
}

Outcome criterion_7() {
  const OvalRun& r = oval_run(ControllerKind::PurePursuit);
  const double ratio = r.run.best_score / r.baseline_s;
  return {r.baseline_s < kDnfPenalty && ratio <= 0.9 && r.seconds < 180.0,
          "best " + fmt(r.run.best_score) + " s vs midpoint baseline " + fmt(r.baseline_s) + " s (ratio " +
              fmt(ratio) + " <= 0.9), " + fmt(r.seconds) + " s"};
}

Outcome criterion_8() {
  bool ok = true;
  std::string detail;
  for (ControllerKind k : {ControllerKind::PurePursuit, ControllerKind::Stanley, ControllerKind::Lqr}) {
    const double best = oval_run(k).run.best_score;
    ok = ok && best < kDnfPenalty;
    detail += (detail.empty() ? "" : ", ") + std::string(controller_name(k)) + " best " + fmt(best) + " s";
  }
  return {ok, detail};
}

Outcome criterion_9() {
  const auto t0 = std::chrono::steady_clock::now();
  const OvalRun& r = oval_run(ControllerKind::PurePursuit);
  const Problem problem = Problem::from_config(oval_config(ControllerKind::PurePursuit, "original"));
  std::vector<double> sigmas{0.0};
  const auto grid = log_spaced(1e-4, 1.0, 13);
  sigmas.insert(sigmas.end(), grid.begin(), grid.end());
  const auto rows = sensitivity_analysis(problem.objective(), r.run.best_unit, problem.space().mask(Subset::All),
                                         Subset::All, sigmas, 100, 0, pool());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<double> rates;
  for (std::size_t i = 1; i < rows.size(); ++i) rates.push_back(rows[i].success_rate);
  const bool at_zero = rows[0].success_rate == 1.0;
  const bool monotone = has_no_increasing_trend(rates);
  const bool drop = rates.back() < rates.front();
  std::string curve;
  for (double x : rates) curve += (curve.empty() ? "" : " ") + fmt(x);
  return {at_zero && monotone && drop && secs < 300.0,
          "rate at 0 = " + fmt(rows[0].success_rate) + ", rates over sigma 1e-4..1: [" + curve + "], " +
              (monotone ? "no" : "an") + " increasing trend, " + fmt(secs) + " s"};
}

Outcome criterion_10() {
  const std::size_t relaxed = oval_run(ControllerKind::PurePursuit, "relaxed").run.successes;
  const std::size_t original = oval_run(ControllerKind::PurePursuit, "original").run.successes;
  return {relaxed <= original,
          "successful candidates: relaxed " + std::to_string(relaxed) + ", original " + std::to_string(original)};
}

Outcome criterion_11() {
  const bool popsizes = de_default_popsize(PopsizePolicy::Standard, 105, 24) == 30 &&
                        de_default_popsize(PopsizePolicy::Dimension, 105, 24) == 106 &&
                        de_default_popsize(PopsizePolicy::Large, 105, 24) == 735;

  const Batch pop{{6.0}, {1.0}, {5.0}, {2.0}, {4.0}, {3.0}};
  const std::vector<double> fit{6, 1, 5, 2, 4, 3};
  const bool noisy = std::abs(noisy_de_base(pop, fit)[0] - 2.0) < 1e-12;

  Batch genomes;
  std::vector<double> scores;
  for (int i = 0; i < 8; ++i) {
    genomes.push_back({0.1 * i, 1.0 - 0.1 * i});
    scores.push_back(std::abs(i - 5.0));
  }
  Rng rng(0);
  bool two_points = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t target = static_cast<std::size_t>(trial) % genomes.size();
    const TwoPointsDonor d = two_points_donor(genomes, scores, target, 0.8, rng);
    std::vector<std::size_t> picks(d.picks.begin(), d.picks.end());
    std::sort(picks.begin(), picks.end());
    two_points = two_points && d.base == 5 && std::adjacent_find(picks.begin(), picks.end()) == picks.end() &&
                 std::find(picks.begin(), picks.end(), target) == picks.end();
    for (std::size_t j = 0; j < 2; ++j) {
      const auto& [a, b, c, e] = d.picks;
      const double want = genomes[5][j] + 0.8 * (genomes[a][j] - genomes[b][j]) + 0.8 * (genomes[c][j] - genomes[e][j]);
      two_points = two_points && std::abs(d.donor[j] - want) < 1e-12;
    }
  }
  return {popsizes && noisy && two_points, std::string("DE popsize 30/106/735 ") + (popsizes ? "ok" : "WRONG") +
                                               ", NoisyDE base " + (noisy ? "ok" : "WRONG") + ", TwoPointsDE donor " +
                                               (two_points ? "ok" : "WRONG")};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                       criterion_5, criterion_6, criterion_7, criterion_8,
                                                       criterion_9, criterion_10, criterion_11};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
