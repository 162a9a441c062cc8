#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace raceopt {

using Point = std::vector<double>;
using Batch = std::vector<Point>;
using Rng = std::mt19937_64;

enum class OptimizerKind { Cma, TwoPointsDe, NoisyDe, Pso, OnePlusOne, RandomSearch };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);
const std::array<OptimizerKind, 6>& all_optimizers();

// DE population heuristics keyed by the nominal worker count.
enum class PopsizePolicy { Standard, Dimension, Large };
std::string_view popsize_policy_name(PopsizePolicy p);
PopsizePolicy parse_popsize_policy(std::string_view name);
std::size_t de_default_popsize(PopsizePolicy policy, std::size_t n, std::size_t workers);

// Standard CMA-ES strategy parameters (log-rank weights, mu = floor(lambda / 2)).
struct CmaParams {
  std::size_t lambda = 0;
  std::size_t mu = 0;
  std::vector<double> weights;
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;
};

// Throws ConfigError for n < 1 or lambda < 2.
CmaParams cma_defaults(std::size_t n, std::size_t lambda);

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::Cma;
  std::optional<std::size_t> popsize;  // unset: kind default
  // Worker count the population heuristics assume. Deliberately separate
  // from the execution thread count so results do not depend on it.
  std::size_t nominal_workers = 24;
  double sigma0 = 0.3;
  PopsizePolicy de_policy = PopsizePolicy::Standard;
  double de_weight = 0.8;
  double de_crossover = 0.5;
  double pso_omega = 0.7298;
  double pso_phi_p = 1.49618;
  double pso_phi_g = 1.49618;
  double one_plus_one_factor = 1.5;

  std::size_t resolved_popsize(std::size_t dimension) const;
  // Throws ConfigError.
  void validate(std::size_t dimension) const;
};

void to_json(nlohmann::json& j, const OptimizerSettings& s);
void from_json(const nlohmann::json& j, OptimizerSettings& s);

// Generation-synchronous ask/tell optimizer over [0, 1]^n. Every emitted
// point is clamped into the cube; the best told point is kept on record.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, std::size_t dimension, std::size_t popsize, std::uint64_t seed);
  virtual ~Optimizer() = default;
  Optimizer(const Optimizer&) = delete;
  Optimizer& operator=(const Optimizer&) = delete;

  // Throws ProtocolError when the previous batch has not been told.
  Batch ask();
  // Throws ProtocolError unless batch is exactly the pending ask and the
  // scores are finite and one per point.
  void tell(const Batch& batch, std::span<const double> scores);

  OptimizerKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t popsize() const { return popsize_; }
  std::size_t generation() const { return generation_; }
  bool has_best() const { return !best_point_.empty(); }
  const Point& best_point() const { return best_point_; }
  double best_score() const { return best_score_; }

 protected:
  virtual Batch do_ask() = 0;
  virtual void do_tell(const Batch& batch, std::span<const double> scores) = 0;

  Rng& rng() { return rng_; }
  Point uniform_point();
  static void clamp_unit(Point& p);

 private:
  OptimizerKind kind_;
  std::size_t dimension_;
  std::size_t popsize_;
  Rng rng_;
  std::size_t generation_ = 0;
  std::optional<Batch> pending_;
  Point best_point_;
  double best_score_ = 0.0;
};

std::unique_ptr<Optimizer> make_optimizer(const OptimizerSettings& settings, std::size_t dimension,
                                          std::uint64_t seed);

// Frobenius norm of the unbiased sample covariance. Throws ConfigError for < 2 points.
double covariance_norm(const Batch& batch);

// Building blocks exposed for structural tests.

// Indices of the best-scoring genome (ties: lowest index).
std::size_t argmin_score(std::span<const double> scores);

struct TwoPointsDonor {
  std::size_t base = 0;
  std::array<std::size_t, 4> picks{};
  Point donor;
};

// best + F (x_a - x_b) + F (x_c - x_d) with a..d distinct and != target.
TwoPointsDonor two_points_donor(const Batch& population, std::span<const double> fitness, std::size_t target,
                                double weight, Rng& rng);

// Mean of the genomes scoring strictly better than the median; the whole
// population when none does.
Point noisy_de_base(const Batch& population, std::span<const double> fitness);

struct NoisyDonor {
  std::array<std::size_t, 2> picks{};
  Point donor;
};

NoisyDonor noisy_de_donor(const Batch& population, std::span<const double> fitness, std::size_t target,
                          double weight, Rng& rng);

// Binomial crossover with one guaranteed donor coordinate.
Point binomial_crossover(const Point& target, const Point& donor, double crossover, Rng& rng);

// v' = omega v + phi_p r_p (p_best - x) + phi_g r_g (g_best - x), element-wise.
Point pso_velocity(const Point& velocity, const Point& position, const Point& personal_best,
                   const Point& global_best, std::span<const double> r_p, std::span<const double> r_g,
                   double omega, double phi_p, double phi_g);

class OnePlusOneOptimizer;
class CmaOptimizer;

}  // namespace raceopt
