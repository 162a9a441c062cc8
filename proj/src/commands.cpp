#include "raceopt/commands.hpp"

#include <algorithm>
#include <numeric>

#include "raceopt/error.hpp"
#include "raceopt/io.hpp"

namespace raceopt {

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<ComparisonRun> compare_optimizers(const ExperimentConfig& base, std::span<const OptimizerKind> kinds,
                                              std::span<const std::uint64_t> seeds,
                                              const std::filesystem::path& out_dir, WorkerPool& pool) {
  if (kinds.empty() || seeds.empty()) throw ConfigError("comparison needs at least one optimizer and one seed");
  std::vector<ComparisonRun> runs;
  for (OptimizerKind kind : kinds) {
    for (std::uint64_t seed : seeds) {
      ExperimentConfig cfg = base;
      cfg.optimizer.kind = kind;
      // A popsize forced for one kind may be invalid for another.
      if (kind == OptimizerKind::OnePlusOne) cfg.optimizer.popsize.reset();
      cfg.seed = seed;
      const auto dir = out_dir.empty()
                           ? std::filesystem::path{}
                           : out_dir / std::string(optimizer_name(kind)) / ("seed_" + std::to_string(seed));
      const ExperimentResult r = run_experiment(cfg, dir, pool);
      ComparisonRun row;
      row.kind = kind;
      row.seed = seed;
      row.best_s = r.run.best_score;
      row.evaluations = r.run.evaluations;
      row.successes = r.run.successes;
      row.initial_cov_norm = r.run.generations.front().cov_norm;
      row.final_cov_norm = r.run.generations.back().cov_norm;
      runs.push_back(row);
    }
  }
  return runs;
}

std::vector<ComparisonSummary> summarize_comparison(const std::vector<ComparisonRun>& runs) {
  std::vector<OptimizerKind> order;
  for (const auto& r : runs) {
    if (std::find(order.begin(), order.end(), r.kind) == order.end()) order.push_back(r.kind);
  }
  std::vector<ComparisonSummary> out;
  for (OptimizerKind kind : order) {
    std::vector<double> best;
    for (const auto& r : runs) {
      if (r.kind == kind) best.push_back(r.best_s);
    }
    ComparisonSummary s;
    s.kind = kind;
    s.runs = best.size();
    s.median_best_s = median(best);
    s.mean_best_s = std::accumulate(best.begin(), best.end(), 0.0) / static_cast<double>(best.size());
    s.min_best_s = *std::min_element(best.begin(), best.end());
    s.max_best_s = *std::max_element(best.begin(), best.end());
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ComparisonSummary& a, const ComparisonSummary& b) { return a.median_best_s < b.median_best_s; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

void write_comparison_runs_csv(const std::filesystem::path& path, const std::vector<ComparisonRun>& runs) {
  io::CsvWriter w(path);
  w.header({"optimizer", "seed", "best_s", "evaluations", "successes", "initial_cov_norm", "final_cov_norm"});
  for (const auto& r : runs) {
    w.row({std::string(optimizer_name(r.kind)), std::to_string(r.seed), io::format_double(r.best_s),
           std::to_string(r.evaluations), std::to_string(r.successes), io::format_double(r.initial_cov_norm),
           io::format_double(r.final_cov_norm)});
  }
}

void write_comparison_summary_csv(const std::filesystem::path& path, const std::vector<ComparisonSummary>& rows) {
  io::CsvWriter w(path);
  w.header({"rank", "optimizer", "runs", "median_best_s", "mean_best_s", "min_best_s", "max_best_s"});
  for (const auto& r : rows) {
    w.row({std::to_string(r.rank), std::string(optimizer_name(r.kind)), std::to_string(r.runs),
           io::format_double(r.median_best_s), io::format_double(r.mean_best_s), io::format_double(r.min_best_s),
           io::format_double(r.max_best_s)});
  }
}

std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& cells, const std::filesystem::path& out_dir,
                                WorkerPool& pool) {
  std::vector<SweepRow> rows;
  rows.reserve(cells.size());
  for (const auto& cell : cells) {
    const auto dir = out_dir.empty() ? std::filesystem::path{} : out_dir / cell.label;
    rows.push_back({cell.label, cell.config, run_experiment(cell.config, dir, pool).run});
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  io::CsvWriter w(path);
  w.header({"cell", "optimizer", "popsize", "objective", "controller", "track", "bounds", "seed", "budget",
            "evaluations", "successes", "best_s"});
  for (const auto& r : rows) {
    const auto& c = r.config;
    w.row({r.label, std::string(optimizer_name(c.optimizer.kind)), std::to_string(r.run.popsize), c.objective,
           std::string(controller_name(c.controller)), c.track, c.bounds, std::to_string(c.seed),
           std::to_string(c.budget), std::to_string(r.run.evaluations), std::to_string(r.run.successes),
           io::format_double(r.run.best_score)});
  }
}

}  // namespace raceopt
