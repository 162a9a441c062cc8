#include <algorithm>
#include <vector>

#include "raceopt/error.hpp"
#include "raceopt/optimizer_impls.hpp"

namespace raceopt {

namespace {

// k distinct indices from [0, size) excluding `skip`, by partial Fisher-Yates.
template <std::size_t K>
std::array<std::size_t, K> distinct_picks(std::size_t size, std::size_t skip, Rng& rng) {
  if (size < K + 1) throw ConfigError("population too small for the requested picks");
  std::vector<std::size_t> pool;
  pool.reserve(size - 1);
  for (std::size_t i = 0; i < size; ++i) {
    if (i != skip) pool.push_back(i);
  }
  std::array<std::size_t, K> out{};
  for (std::size_t k = 0; k < K; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
    std::swap(pool[k], pool[pick(rng)]);
    out[k] = pool[k];
  }
  return out;
}

void check_population(const Batch& population, std::span<const double> fitness, std::size_t target) {
  if (population.size() != fitness.size()) throw ConfigError("population and fitness sizes differ");
  if (target >= population.size()) throw ConfigError("target index out of range");
}

}  // namespace

TwoPointsDonor two_points_donor(const Batch& population, std::span<const double> fitness, std::size_t target,
                                double weight, Rng& rng) {
  check_population(population, fitness, target);
  TwoPointsDonor d;
  d.base = argmin_score(fitness);
  d.picks = distinct_picks<4>(population.size(), target, rng);
  const Point& b = population[d.base];
  const auto& [a, c, e, f] = d.picks;
  d.donor.resize(b.size());
  for (std::size_t j = 0; j < b.size(); ++j) {
    d.donor[j] = b[j] + weight * (population[a][j] - population[c][j]) +
                 weight * (population[e][j] - population[f][j]);
  }
  return d;
}

Point noisy_de_base(const Batch& population, std::span<const double> fitness) {
  if (population.empty() || population.size() != fitness.size()) throw ConfigError("bad population");
  std::vector<double> sorted(fitness.begin(), fitness.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

  Point base(population.front().size(), 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (fitness[i] < median) {
      for (std::size_t j = 0; j < base.size(); ++j) base[j] += population[i][j];
      ++count;
    }
  }
  if (count == 0) {
    for (const auto& x : population) {
      for (std::size_t j = 0; j < base.size(); ++j) base[j] += x[j];
    }
    count = m;
  }
  for (auto& v : base) v /= static_cast<double>(count);
  return base;
}

NoisyDonor noisy_de_donor(const Batch& population, std::span<const double> fitness, std::size_t target,
                          double weight, Rng& rng) {
  check_population(population, fitness, target);
  NoisyDonor d;
  d.donor = noisy_de_base(population, fitness);
  d.picks = distinct_picks<2>(population.size(), target, rng);
  const Point& a = population[d.picks[0]];
  const Point& b = population[d.picks[1]];
  for (std::size_t j = 0; j < d.donor.size(); ++j) d.donor[j] += weight * (a[j] - b[j]);
  return d;
}

Point binomial_crossover(const Point& target, const Point& donor, double crossover, Rng& rng) {
  if (target.size() != donor.size() || target.empty()) throw ConfigError("crossover size mismatch");
  std::uniform_int_distribution<std::size_t> pick(0, target.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t forced = pick(rng);
  Point trial = target;
  for (std::size_t j = 0; j < trial.size(); ++j) {
    if (j == forced || u(rng) < crossover) trial[j] = donor[j];
  }
  return trial;
}

DifferentialEvolution::DifferentialEvolution(Variant variant, std::size_t dimension, std::size_t popsize,
                                             double weight, double crossover, std::uint64_t seed)
    : Optimizer(variant == Variant::TwoPoints ? OptimizerKind::TwoPointsDe : OptimizerKind::NoisyDe, dimension,
                popsize, seed),
      variant_(variant),
      weight_(weight),
      crossover_(crossover) {
  const std::size_t needed = variant == Variant::TwoPoints ? 5 : 3;
  if (popsize < needed) throw ConfigError("DE population too small");
}

Batch DifferentialEvolution::do_ask() {
  Batch out;
  out.reserve(popsize());
  if (!initialized_) {
    for (std::size_t i = 0; i < popsize(); ++i) out.push_back(uniform_point());
    return out;
  }
  for (std::size_t i = 0; i < popsize(); ++i) {
    Point donor = variant_ == Variant::TwoPoints
                      ? two_points_donor(population_, fitness_, i, weight_, rng()).donor
                      : noisy_de_donor(population_, fitness_, i, weight_, rng()).donor;
    out.push_back(binomial_crossover(population_[i], donor, crossover_, rng()));
  }
  return out;
}

void DifferentialEvolution::do_tell(const Batch& batch, std::span<const double> scores) {
  if (!initialized_) {
    population_ = batch;
    fitness_.assign(scores.begin(), scores.end());
    initialized_ = true;
    return;
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (scores[i] <= fitness_[i]) {
      population_[i] = batch[i];
      fitness_[i] = scores[i];
    }
  }
}

}  // namespace raceopt
