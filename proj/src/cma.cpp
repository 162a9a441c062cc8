#include <algorithm>
#include <cmath>
#include <numeric>

#include "raceopt/error.hpp"
#include "raceopt/optimizer_impls.hpp"

namespace raceopt {

CmaOptimizer::CmaOptimizer(std::size_t dimension, std::size_t lambda, double sigma0, std::uint64_t seed)
    : Optimizer(OptimizerKind::Cma, dimension, lambda, seed),
      params_(cma_defaults(dimension, lambda)),
      mean_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dimension), 0.5)),
      sigma_(sigma0),
      cov_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(dimension))),
      basis_(cov_),
      axis_(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dimension))),
      path_sigma_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension))),
      path_c_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension))) {
  if (!(sigma0 > 0.0)) throw ConfigError("CMA sigma0 must be > 0");
}

void CmaOptimizer::decompose() {
  cov_ = 0.5 * (cov_ + cov_.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_);
  basis_ = eig.eigenvectors();
  axis_ = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt();
}

Batch CmaOptimizer::do_ask() {
  const auto n = static_cast<Eigen::Index>(dimension());
  std::normal_distribution<double> normal(0.0, 1.0);
  Batch out;
  out.reserve(popsize());
  Eigen::VectorXd z(n);
  for (std::size_t k = 0; k < popsize(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng());
    const Eigen::VectorXd x = mean_ + sigma_ * (basis_ * axis_.cwiseProduct(z));
    out.emplace_back(x.data(), x.data() + n);
  }
  return out;
}

void CmaOptimizer::do_tell(const Batch& batch, std::span<const double> scores) {
  const auto n = static_cast<Eigen::Index>(dimension());
  const auto& p = params_;

  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Steps of the selected (clamped) points relative to the old mean.
  Eigen::MatrixXd steps(n, static_cast<Eigen::Index>(p.mu));
  for (std::size_t i = 0; i < p.mu; ++i) {
    const Point& x = batch[order[i]];
    for (Eigen::Index j = 0; j < n; ++j) steps(j, static_cast<Eigen::Index>(i)) = (x[j] - mean_(j)) / sigma_;
  }
  const Eigen::Map<const Eigen::VectorXd> w(p.weights.data(), static_cast<Eigen::Index>(p.mu));
  const Eigen::VectorXd y_w = steps * w;
  mean_ += sigma_ * y_w;

  const Eigen::MatrixXd inv_sqrt = basis_ * axis_.cwiseInverse().asDiagonal() * basis_.transpose();
  path_sigma_ = (1.0 - p.c_sigma) * path_sigma_ + std::sqrt(p.c_sigma * (2.0 - p.c_sigma) * p.mu_eff) * (inv_sqrt * y_w);

  ++updates_;
  const double ps_norm = path_sigma_.norm();
  const double decay = 1.0 - std::pow(1.0 - p.c_sigma, 2.0 * static_cast<double>(updates_));
  const double nd = static_cast<double>(dimension());
  const bool h_sigma = ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (nd + 1.0)) * p.chi_n;

  path_c_ = (1.0 - p.c_c) * path_c_;
  if (h_sigma) path_c_ += std::sqrt(p.c_c * (2.0 - p.c_c) * p.mu_eff) * y_w;

  const double stall = h_sigma ? 0.0 : p.c_1 * p.c_c * (2.0 - p.c_c);
  cov_ = (1.0 - p.c_1 - p.c_mu + stall) * cov_ + p.c_1 * (path_c_ * path_c_.transpose()) +
         p.c_mu * (steps * w.asDiagonal() * steps.transpose());

  sigma_ *= std::exp((p.c_sigma / p.d_sigma) * (ps_norm / p.chi_n - 1.0));
  decompose();
}

}  // namespace raceopt
