#include "raceopt/riccati.hpp"

#include <cmath>

namespace raceopt {

std::optional<DareSolution> solve_dare_iterative(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                 const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                                                 double tol, int max_iterations) {
  Eigen::MatrixXd p = q;
  const Eigen::MatrixXd at = a.transpose();
  const Eigen::MatrixXd bt = b.transpose();
  for (int k = 1; k <= max_iterations; ++k) {
    const Eigen::MatrixXd pa = p * a;
    const Eigen::MatrixXd btpa = bt * pa;
    const Eigen::MatrixXd s = r + bt * p * b;
    Eigen::MatrixXd next = q + at * pa - btpa.transpose() * s.ldlt().solve(btpa);
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) return std::nullopt;
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    const double delta = (next - p).cwiseAbs().maxCoeff();
    p = std::move(next);
    if (delta <= tol * scale) return DareSolution{p, k};
  }
  return std::nullopt;
}

Eigen::MatrixXd dare_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& r,
                          const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd bt = b.transpose();
  return (r + bt * p * b).ldlt().solve(bt * p * a);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace raceopt
