#pragma once

#include <span>
#include <string>
#include <vector>

namespace raceopt {

// Analytic test objective over the unit cube, mapped affinely onto the
// function's conventional domain.
struct BenchFunction {
  enum class Kind { Sphere, Rosenbrock, Rastrigin };

  Kind kind = Kind::Sphere;
  std::size_t dimension = 2;

  double domain_lower() const;
  double domain_upper() const;
  std::string name() const;
  // Unit-cube location of the global minimum (value 0).
  std::vector<double> minimizer_unit() const;
};

// Parses "sphere:5" or "bench:sphere:5". Throws ConfigError.
BenchFunction parse_bench(const std::string& text);

// Throws ConfigError on a dimension mismatch.
double eval_bench(const BenchFunction& fn, std::span<const double> unit);

}  // namespace raceopt
