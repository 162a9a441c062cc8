#include "raceopt/benchfns.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "raceopt/error.hpp"

namespace raceopt {

double BenchFunction::domain_lower() const {
  switch (kind) {
    case Kind::Sphere:
      return -5.0;
    case Kind::Rosenbrock:
      return -2.0;
    case Kind::Rastrigin:
      return -5.12;
  }
  return 0.0;
}

double BenchFunction::domain_upper() const { return -domain_lower(); }

std::string BenchFunction::name() const {
  switch (kind) {
    case Kind::Sphere:
      return "sphere";
    case Kind::Rosenbrock:
      return "rosenbrock";
    case Kind::Rastrigin:
      return "rastrigin";
  }
  return "unknown";
}

std::vector<double> BenchFunction::minimizer_unit() const {
  const double opt = kind == Kind::Rosenbrock ? 1.0 : 0.0;
  return std::vector<double>(dimension, (opt - domain_lower()) / (domain_upper() - domain_lower()));
}

BenchFunction parse_bench(const std::string& text) {
  std::string body = text;
  if (body.rfind("bench:", 0) == 0) body = body.substr(6);
  const auto colon = body.find(':');
  if (colon == std::string::npos) throw ConfigError("bench objective must look like bench:<name>:<dim>");
  BenchFunction fn;
  const std::string name = body.substr(0, colon);
  if (name == "sphere") {
    fn.kind = BenchFunction::Kind::Sphere;
  } else if (name == "rosenbrock") {
    fn.kind = BenchFunction::Kind::Rosenbrock;
  } else if (name == "rastrigin") {
    fn.kind = BenchFunction::Kind::Rastrigin;
  } else {
    throw ConfigError("unknown bench function: " + name);
  }
  try {
    std::size_t used = 0;
    const std::string dim = body.substr(colon + 1);
    const long d = std::stol(dim, &used);
    if (used != dim.size() || d < 1) throw std::invalid_argument(dim);
    fn.dimension = static_cast<std::size_t>(d);
  } catch (const std::exception&) {
    throw ConfigError("bench dimension must be a positive integer");
  }
  if (fn.kind == BenchFunction::Kind::Rosenbrock && fn.dimension < 2) {
    throw ConfigError("rosenbrock needs dimension >= 2");
  }
  return fn;
}

double eval_bench(const BenchFunction& fn, std::span<const double> unit) {
  if (unit.size() != fn.dimension) {
    throw ConfigError("bench dimension mismatch: got " + std::to_string(unit.size()) + ", expected " +
                      std::to_string(fn.dimension));
  }
  const double lo = fn.domain_lower();
  const double span = fn.domain_upper() - lo;
  auto x = [&](std::size_t i) { return lo + unit[i] * span; };
  double f = 0.0;
  switch (fn.kind) {
    case BenchFunction::Kind::Sphere:
      for (std::size_t i = 0; i < unit.size(); ++i) f += x(i) * x(i);
      break;
    case BenchFunction::Kind::Rosenbrock:
      for (std::size_t i = 0; i + 1 < unit.size(); ++i) {
        const double a = x(i + 1) - x(i) * x(i);
        const double b = 1.0 - x(i);
        f += 100.0 * a * a + b * b;
      }
      break;
    case BenchFunction::Kind::Rastrigin:
      f = 10.0 * static_cast<double>(unit.size());
      for (std::size_t i = 0; i < unit.size(); ++i) {
        f += x(i) * x(i) - 10.0 * std::cos(2.0 * std::numbers::pi * x(i));
      }
      // cos(2 pi x) rounds away from exactly 1 only at the last ulp.
      if (f < 0.0) f = 0.0;
      break;
  }
  return f;
}

}  // namespace raceopt
