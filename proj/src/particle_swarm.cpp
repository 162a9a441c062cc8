#include <algorithm>

#include "raceopt/error.hpp"
#include "raceopt/optimizer_impls.hpp"

namespace raceopt {

Point pso_velocity(const Point& velocity, const Point& position, const Point& personal_best,
                   const Point& global_best, std::span<const double> r_p, std::span<const double> r_g,
                   double omega, double phi_p, double phi_g) {
  const std::size_t n = velocity.size();
  if (position.size() != n || personal_best.size() != n || global_best.size() != n || r_p.size() != n ||
      r_g.size() != n) {
    throw ConfigError("pso_velocity size mismatch");
  }
  Point out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = omega * velocity[j] + phi_p * r_p[j] * (personal_best[j] - position[j]) +
             phi_g * r_g[j] * (global_best[j] - position[j]);
  }
  return out;
}

ParticleSwarm::ParticleSwarm(std::size_t dimension, std::size_t popsize, double omega, double phi_p, double phi_g,
                             double initial_speed, std::uint64_t seed)
    : Optimizer(OptimizerKind::Pso, dimension, popsize, seed), omega_(omega), phi_p_(phi_p), phi_g_(phi_g) {
  std::uniform_real_distribution<double> v(-initial_speed, initial_speed);
  for (std::size_t i = 0; i < popsize; ++i) {
    positions_.push_back(uniform_point());
    Point vel(dimension);
    for (auto& x : vel) x = v(rng());
    velocities_.push_back(std::move(vel));
  }
}

Batch ParticleSwarm::do_ask() {
  if (!initialized_) return positions_;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> r_p(dimension()), r_g(dimension());
  for (std::size_t i = 0; i < popsize(); ++i) {
    for (std::size_t j = 0; j < dimension(); ++j) {
      r_p[j] = u(rng());
      r_g[j] = u(rng());
    }
    Point& x = positions_[i];
    Point& v = velocities_[i];
    v = pso_velocity(v, x, personal_best_[i], global_best_, r_p, r_g, omega_, phi_p_, phi_g_);
    for (std::size_t j = 0; j < dimension(); ++j) {
      x[j] += v[j];
      // Absorbing walls: stop at the face and drop that velocity component.
      if (x[j] < 0.0 || x[j] > 1.0) {
        x[j] = std::clamp(x[j], 0.0, 1.0);
        v[j] = 0.0;
      }
    }
  }
  return positions_;
}

void ParticleSwarm::do_tell(const Batch& batch, std::span<const double> scores) {
  if (!initialized_) {
    personal_best_ = batch;
    personal_score_.assign(scores.begin(), scores.end());
    const std::size_t best = argmin_score(scores);
    global_best_ = batch[best];
    global_score_ = scores[best];
    initialized_ = true;
    return;
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (scores[i] < personal_score_[i]) {
      personal_best_[i] = batch[i];
      personal_score_[i] = scores[i];
    }
    if (scores[i] < global_score_) {
      global_best_ = batch[i];
      global_score_ = scores[i];
    }
  }
}

}  // namespace raceopt
