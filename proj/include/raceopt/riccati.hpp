#pragma once

#include <optional>

#include <Eigen/Dense>

namespace raceopt {

struct DareSolution {
  Eigen::MatrixXd p;
  int iterations = 0;
};

// Fixed-point iteration of the discrete algebraic Riccati equation
//   P = Q + A'PA - A'PB (R + B'PB)^-1 B'PA
// starting from P = Q. Converged when max|P_{k+1} - P_k| <= tol * max(1, max|P_k|).
// Returns nullopt when max_iterations is reached or the iterate stops being finite.
std::optional<DareSolution> solve_dare_iterative(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                                 const Eigen::MatrixXd& q, const Eigen::MatrixXd& r,
                                                 double tol = 1e-6, int max_iterations = 200);

// K = (R + B'PB)^-1 B'PA
Eigen::MatrixXd dare_gain(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& r,
                          const Eigen::MatrixXd& p);

double spectral_radius(const Eigen::MatrixXd& m);

}  // namespace raceopt
