#pragma once

// Concrete optimizer classes. Most callers only need make_optimizer; tests
// reach in here to inspect internal state.

#include <Eigen/Dense>

#include "raceopt/optimizers.hpp"

namespace raceopt {

class CmaOptimizer final : public Optimizer {
 public:
  CmaOptimizer(std::size_t dimension, std::size_t lambda, double sigma0, std::uint64_t seed);

  const Eigen::VectorXd& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  const CmaParams& params() const { return params_; }

 protected:
  Batch do_ask() override;
  void do_tell(const Batch& batch, std::span<const double> scores) override;

 private:
  CmaParams params_;
  Eigen::VectorXd mean_;
  double sigma_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd basis_;      // eigenvectors of cov_
  Eigen::VectorXd axis_;       // sqrt of eigenvalues
  Eigen::VectorXd path_sigma_;
  Eigen::VectorXd path_c_;
  std::size_t updates_ = 0;

  void decompose();
};

class DifferentialEvolution final : public Optimizer {
 public:
  enum class Variant { TwoPoints, Noisy };
  DifferentialEvolution(Variant variant, std::size_t dimension, std::size_t popsize, double weight,
                        double crossover, std::uint64_t seed);

  const Batch& population() const { return population_; }
  const std::vector<double>& fitness() const { return fitness_; }

 protected:
  Batch do_ask() override;
  void do_tell(const Batch& batch, std::span<const double> scores) override;

 private:
  Variant variant_;
  double weight_;
  double crossover_;
  Batch population_;
  std::vector<double> fitness_;
  bool initialized_ = false;
};

class ParticleSwarm final : public Optimizer {
 public:
  ParticleSwarm(std::size_t dimension, std::size_t popsize, double omega, double phi_p, double phi_g,
                double initial_speed, std::uint64_t seed);

  const Batch& positions() const { return positions_; }
  const Batch& velocities() const { return velocities_; }

 protected:
  Batch do_ask() override;
  void do_tell(const Batch& batch, std::span<const double> scores) override;

 private:
  double omega_, phi_p_, phi_g_;
  Batch positions_;
  Batch velocities_;
  Batch personal_best_;
  std::vector<double> personal_score_;
  Point global_best_;
  double global_score_ = 0.0;
  bool initialized_ = false;
};

class OnePlusOneOptimizer final : public Optimizer {
 public:
  OnePlusOneOptimizer(std::size_t dimension, double sigma0, double factor, std::uint64_t seed);

  double step_size() const { return step_; }
  const Point& incumbent() const { return incumbent_; }

 protected:
  Batch do_ask() override;
  void do_tell(const Batch& batch, std::span<const double> scores) override;

 private:
  double step_;
  double factor_;
  Point incumbent_;
  double incumbent_score_ = 0.0;
  bool initialized_ = false;
};

class RandomSearch final : public Optimizer {
 public:
  RandomSearch(std::size_t dimension, std::size_t popsize, std::uint64_t seed);

 protected:
  Batch do_ask() override;
  void do_tell(const Batch&, std::span<const double>) override {}
};

}  // namespace raceopt
