#include "raceopt/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "raceopt/error.hpp"
#include "raceopt/optimizer_impls.hpp"

namespace raceopt {

namespace {

constexpr std::array<OptimizerKind, 6> kAllKinds{OptimizerKind::Cma,        OptimizerKind::TwoPointsDe,
                                                 OptimizerKind::NoisyDe,    OptimizerKind::Pso,
                                                 OptimizerKind::OnePlusOne, OptimizerKind::RandomSearch};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string_view optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Cma:
      return "cma";
    case OptimizerKind::TwoPointsDe:
      return "twopointsde";
    case OptimizerKind::NoisyDe:
      return "noisyde";
    case OptimizerKind::Pso:
      return "pso";
    case OptimizerKind::OnePlusOne:
      return "oneplusone";
    case OptimizerKind::RandomSearch:
      return "randomsearch";
  }
  return "unknown";
}

OptimizerKind parse_optimizer(std::string_view name) {
  const std::string key = lower(name);
  for (auto kind : kAllKinds) {
    if (key == optimizer_name(kind)) return kind;
  }
  if (key == "cma-es" || key == "cmaes") return OptimizerKind::Cma;
  if (key == "(1+1)" || key == "1+1") return OptimizerKind::OnePlusOne;
  if (key == "random") return OptimizerKind::RandomSearch;
  throw ConfigError("unknown optimizer: " + std::string(name));
}

const std::array<OptimizerKind, 6>& all_optimizers() { return kAllKinds; }

std::string_view popsize_policy_name(PopsizePolicy p) {
  switch (p) {
    case PopsizePolicy::Standard:
      return "standard";
    case PopsizePolicy::Dimension:
      return "dimension";
    case PopsizePolicy::Large:
      return "large";
  }
  return "unknown";
}

PopsizePolicy parse_popsize_policy(std::string_view name) {
  const std::string key = lower(name);
  if (key == "standard") return PopsizePolicy::Standard;
  if (key == "dimension") return PopsizePolicy::Dimension;
  if (key == "large") return PopsizePolicy::Large;
  throw ConfigError("unknown popsize policy: " + std::string(name));
}

std::size_t de_default_popsize(PopsizePolicy policy, std::size_t n, std::size_t workers) {
  const std::size_t standard = std::max<std::size_t>(workers, 30);
  switch (policy) {
    case PopsizePolicy::Standard:
      return standard;
    case PopsizePolicy::Dimension:
      return std::max(standard, n + 1);
    case PopsizePolicy::Large:
      return std::max(standard, 7 * n);
  }
  return standard;
}

CmaParams cma_defaults(std::size_t n, std::size_t lambda) {
  if (n < 1) throw ConfigError("CMA needs dimension >= 1");
  if (lambda < 2) throw ConfigError("CMA needs popsize >= 2");
  CmaParams p;
  p.lambda = lambda;
  p.mu = lambda / 2;
  const double nd = static_cast<double>(n);
  const double half = static_cast<double>(lambda) / 2.0;

  p.weights.resize(p.mu);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.mu; ++i) {
    p.weights[i] = std::log(half + 0.5) - std::log(static_cast<double>(i + 1));
    sum += p.weights[i];
  }
  double sum_sq = 0.0;
  for (auto& w : p.weights) {
    w /= sum;
    sum_sq += w * w;
  }
  p.mu_eff = 1.0 / sum_sq;

  p.c_sigma = (p.mu_eff + 2.0) / (nd + p.mu_eff + 5.0);
  p.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (nd + 1.0)) - 1.0) + p.c_sigma;
  p.c_c = (4.0 + p.mu_eff / nd) / (nd + 4.0 + 2.0 * p.mu_eff / nd);
  p.c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + p.mu_eff);
  p.c_mu = std::min(1.0 - p.c_1,
                    2.0 * (p.mu_eff - 2.0 + 1.0 / p.mu_eff) / ((nd + 2.0) * (nd + 2.0) + p.mu_eff));
  p.chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));
  return p;
}

std::size_t OptimizerSettings::resolved_popsize(std::size_t dimension) const {
  if (popsize) return *popsize;
  switch (kind) {
    case OptimizerKind::TwoPointsDe:
    case OptimizerKind::NoisyDe:
      return de_default_popsize(de_policy, dimension, nominal_workers);
    case OptimizerKind::OnePlusOne:
      return 1;
    default:
      return nominal_workers;
  }
}

void OptimizerSettings::validate(std::size_t dimension) const {
  if (dimension < 1) throw ConfigError("optimizer dimension must be >= 1");
  if (nominal_workers < 1) throw ConfigError("nominal_workers must be >= 1");
  const std::size_t lambda = resolved_popsize(dimension);
  if (lambda < 1) throw ConfigError("popsize must be >= 1");
  switch (kind) {
    case OptimizerKind::Cma:
      if (lambda < 2) throw ConfigError("CMA needs popsize >= 2");
      break;
    case OptimizerKind::TwoPointsDe:
      if (lambda < 5) throw ConfigError("TwoPointsDE needs popsize >= 5");
      break;
    case OptimizerKind::NoisyDe:
      if (lambda < 3) throw ConfigError("NoisyDE needs popsize >= 3");
      break;
    case OptimizerKind::OnePlusOne:
      if (lambda != 1) throw ConfigError("OnePlusOne has popsize 1");
      break;
    default:
      break;
  }
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ConfigError("sigma0 must be > 0");
  if (!(de_weight > 0.0) || !std::isfinite(de_weight)) throw ConfigError("de_weight must be > 0");
  if (!(de_crossover >= 0.0 && de_crossover <= 1.0)) throw ConfigError("de_crossover must lie in [0, 1]");
  if (!(pso_omega >= 0.0 && pso_omega <= 1.0)) throw ConfigError("pso_omega must lie in [0, 1]");
  if (!(pso_phi_p >= 0.0) || !(pso_phi_g >= 0.0)) throw ConfigError("pso coefficients must be >= 0");
  if (!(one_plus_one_factor > 1.0)) throw ConfigError("one_plus_one_factor must be > 1");
}

void to_json(nlohmann::json& j, const OptimizerSettings& s) {
  j = nlohmann::json{{"kind", optimizer_name(s.kind)},
                     {"nominal_workers", s.nominal_workers},
                     {"sigma0", s.sigma0},
                     {"de_policy", popsize_policy_name(s.de_policy)},
                     {"de_weight", s.de_weight},
                     {"de_crossover", s.de_crossover},
                     {"pso_omega", s.pso_omega},
                     {"pso_phi_p", s.pso_phi_p},
                     {"pso_phi_g", s.pso_phi_g},
                     {"one_plus_one_factor", s.one_plus_one_factor}};
  if (s.popsize) {
    j["popsize"] = *s.popsize;
  } else {
    j["popsize"] = nullptr;
  }
}

void from_json(const nlohmann::json& j, OptimizerSettings& s) {
  OptimizerSettings out;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      out.kind = parse_optimizer(value.get<std::string>());
    } else if (key == "popsize") {
      if (!value.is_null()) out.popsize = value.get<std::size_t>();
    } else if (key == "nominal_workers") {
      out.nominal_workers = value.get<std::size_t>();
    } else if (key == "sigma0") {
      out.sigma0 = value.get<double>();
    } else if (key == "de_policy") {
      out.de_policy = parse_popsize_policy(value.get<std::string>());
    } else if (key == "de_weight") {
      out.de_weight = value.get<double>();
    } else if (key == "de_crossover") {
      out.de_crossover = value.get<double>();
    } else if (key == "pso_omega") {
      out.pso_omega = value.get<double>();
    } else if (key == "pso_phi_p") {
      out.pso_phi_p = value.get<double>();
    } else if (key == "pso_phi_g") {
      out.pso_phi_g = value.get<double>();
    } else if (key == "one_plus_one_factor") {
      out.one_plus_one_factor = value.get<double>();
    } else {
      throw ConfigError("unknown optimizer setting: " + key);
    }
  }
  s = out;
}

Optimizer::Optimizer(OptimizerKind kind, std::size_t dimension, std::size_t popsize, std::uint64_t seed)
    : kind_(kind), dimension_(dimension), popsize_(popsize), rng_(seed) {
  if (dimension < 1) throw ConfigError("optimizer dimension must be >= 1");
  if (popsize < 1) throw ConfigError("popsize must be >= 1");
}

Batch Optimizer::ask() {
  if (pending_) throw ProtocolError("ask called twice without tell");
  Batch batch = do_ask();
  for (auto& p : batch) clamp_unit(p);
  pending_ = batch;
  return batch;
}

void Optimizer::tell(const Batch& batch, std::span<const double> scores) {
  if (!pending_) throw ProtocolError("tell without a pending ask");
  if (batch != *pending_) throw ProtocolError("told batch does not match the last ask");
  if (scores.size() != batch.size()) throw ProtocolError("score count does not match batch size");
  for (double s : scores) {
    if (!std::isfinite(s)) throw ProtocolError("scores must be finite");
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (best_point_.empty() || scores[i] < best_score_) {
      best_point_ = batch[i];
      best_score_ = scores[i];
    }
  }
  do_tell(batch, scores);
  pending_.reset();
  ++generation_;
}

Point Optimizer::uniform_point() {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p(dimension_);
  for (auto& x : p) x = u(rng_);
  return p;
}

void Optimizer::clamp_unit(Point& p) {
  for (auto& x : p) x = std::clamp(x, 0.0, 1.0);
}

std::unique_ptr<Optimizer> make_optimizer(const OptimizerSettings& settings, std::size_t dimension,
                                          std::uint64_t seed) {
  settings.validate(dimension);
  const std::size_t lambda = settings.resolved_popsize(dimension);
  switch (settings.kind) {
    case OptimizerKind::Cma:
      return std::make_unique<CmaOptimizer>(dimension, lambda, settings.sigma0, seed);
    case OptimizerKind::TwoPointsDe:
      return std::make_unique<DifferentialEvolution>(DifferentialEvolution::Variant::TwoPoints, dimension, lambda,
                                                     settings.de_weight, settings.de_crossover, seed);
    case OptimizerKind::NoisyDe:
      return std::make_unique<DifferentialEvolution>(DifferentialEvolution::Variant::Noisy, dimension, lambda,
                                                     settings.de_weight, settings.de_crossover, seed);
    case OptimizerKind::Pso:
      return std::make_unique<ParticleSwarm>(dimension, lambda, settings.pso_omega, settings.pso_phi_p,
                                             settings.pso_phi_g, settings.sigma0, seed);
    case OptimizerKind::OnePlusOne:
      return std::make_unique<OnePlusOneOptimizer>(dimension, settings.sigma0, settings.one_plus_one_factor, seed);
    case OptimizerKind::RandomSearch:
      return std::make_unique<RandomSearch>(dimension, lambda, seed);
  }
  throw ConfigError("unhandled optimizer kind");
}

double covariance_norm(const Batch& batch) {
  if (batch.size() < 2) throw ConfigError("covariance_norm needs at least 2 points");
  const auto m = static_cast<Eigen::Index>(batch.size());
  const auto n = static_cast<Eigen::Index>(batch.front().size());
  Eigen::MatrixXd x(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(batch[i].size()) != n) throw ConfigError("covariance_norm: ragged batch");
    for (Eigen::Index j = 0; j < n; ++j) x(i, j) = batch[i][j];
  }
  x.rowwise() -= x.colwise().mean();
  // ||X^T X||_F == ||X X^T||_F; pick the smaller Gram matrix.
  const Eigen::MatrixXd gram = (m <= n) ? Eigen::MatrixXd(x * x.transpose()) : Eigen::MatrixXd(x.transpose() * x);
  return gram.norm() / static_cast<double>(m - 1);
}

std::size_t argmin_score(std::span<const double> scores) {
  if (scores.empty()) throw ConfigError("argmin of an empty score list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  return best;
}

RandomSearch::RandomSearch(std::size_t dimension, std::size_t popsize, std::uint64_t seed)
    : Optimizer(OptimizerKind::RandomSearch, dimension, popsize, seed) {}

Batch RandomSearch::do_ask() {
  Batch out;
  out.reserve(popsize());
  for (std::size_t i = 0; i < popsize(); ++i) out.push_back(uniform_point());
  return out;
}

OnePlusOneOptimizer::OnePlusOneOptimizer(std::size_t dimension, double sigma0, double factor, std::uint64_t seed)
    : Optimizer(OptimizerKind::OnePlusOne, dimension, 1, seed), step_(sigma0), factor_(factor) {}

Batch OnePlusOneOptimizer::do_ask() {
  if (!initialized_) return {Point(dimension(), 0.5)};
  std::normal_distribution<double> normal(0.0, 1.0);
  Point p = incumbent_;
  for (auto& x : p) x += step_ * normal(rng());
  return {p};
}

void OnePlusOneOptimizer::do_tell(const Batch& batch, std::span<const double> scores) {
  if (!initialized_) {
    incumbent_ = batch.front();
    incumbent_score_ = scores.front();
    initialized_ = true;
    return;
  }
  // Ties move the incumbent but do not count as success, so a flat DNF
  // plateau cannot inflate the step without bound.
  const double score = scores.front();
  if (score < incumbent_score_) {
    step_ *= factor_;
  } else {
    step_ *= std::pow(factor_, -0.25);
  }
  if (score <= incumbent_score_) {
    incumbent_ = batch.front();
    incumbent_score_ = score;
  }
}

}  // namespace raceopt
