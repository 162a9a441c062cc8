#include "raceopt/raceline.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "raceopt/error.hpp"
#include "raceopt/io.hpp"
#include "raceopt/kernels/nearest.hpp"
#include "raceopt/spline.hpp"

namespace raceopt {

std::vector<ControlPoint> control_points(const Track& track, std::size_t n) {
  if (n < 4) throw ConfigError("control point count must be >= 4");
  const ClosedSpline& c = track.spline();
  std::vector<ControlPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = c.length() * static_cast<double>(i) / static_cast<double>(n);
    const auto d = c.derivs_at_param(c.param_at(s));
    const Vec2 tangent = (1.0 / norm(d.d1)) * d.d1;
    out.push_back({s, d.p, left_normal(tangent)});
  }
  return out;
}

namespace {

constexpr std::array<double, 5> kNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                          0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kWeights = {0.2369268850561891, 0.4786286704993665,
                                            0.5688888888888889, 0.4786286704993665,
                                            0.2369268850561891};

// Raceline r(t) = c(t) + d(sigma(t)) n(t), with t the centerline spline
// parameter and sigma the centerline arc length.
class OffsetCurve {
 public:
  OffsetCurve(const ClosedSpline& center, const PeriodicCubic& offset)
      : c_(center), d_(offset) {}

  struct Sample {
    Vec2 p;
    double heading;
    double kappa;
    double speed;  // |dr/dt|
  };

  Sample eval(double t, double sigma) const {
    const auto cd = c_.derivs_at_param(t);
    const double sp = norm(cd.d1);
    const Vec2 tangent = (1.0 / sp) * cd.d1;
    const Vec2 nrm = left_normal(tangent);
    const double kappa = curvature_from_derivs(cd.d1, cd.d2);
    const auto off = d_.eval(sigma);

    const double a = 1.0 - off.value * kappa;
    const double b = off.d1;
    Sample out;
    out.p = cd.p + off.value * nrm;
    out.speed = sp * std::hypot(a, b);
    out.heading = std::atan2(tangent.y, tangent.x) + std::atan2(b, a);
    if (off.value == 0.0 && off.d1 == 0.0 && off.d2 == 0.0) {
      out.kappa = kappa;
      return out;
    }
    const double sp2 = sp * sp;
    const double dkappa =
        (cross(cd.d1, cd.d3) * sp2 - 3.0 * cross(cd.d1, cd.d2) * dot(cd.d1, cd.d2)) / (sp2 * sp2 * sp) / sp;
    const double da = -(off.d1 * kappa + off.value * dkappa);
    const double db = off.d2;
    const double num = a * (a * kappa + db) - b * (da - b * kappa);
    out.kappa = num / std::pow(a * a + b * b, 1.5);
    return out;
  }

  double speed(double t, double sigma) const {
    const auto cd = c_.derivs_at_param(t);
    const double sp = norm(cd.d1);
    const double kappa = curvature_from_derivs(cd.d1, cd.d2);
    const auto off = d_.eval(sigma);
    return sp * std::hypot(1.0 - off.value * kappa, off.d1);
  }

 private:
  const ClosedSpline& c_;
  const PeriodicCubic& d_;
};

}  // namespace

Raceline::Raceline(std::vector<double> x, std::vector<double> y, std::vector<double> heading,
                   std::vector<double> kappa, std::vector<double> v_ref, double length)
    : x_(std::move(x)),
      y_(std::move(y)),
      heading_(std::move(heading)),
      kappa_(std::move(kappa)),
      v_ref_(std::move(v_ref)),
      length_(length),
      ds_(length / static_cast<double>(x_.size())),
      grid_(x_, y_) {}

void Raceline::set_speed_profile(std::vector<double> v_ref) {
  if (v_ref.size() != x_.size()) throw ConfigError("speed profile size mismatch");
  v_ref_ = std::move(v_ref);
}

Raceline build_raceline(const Track& track, std::span<const double> perturbs_m, double v_min,
                        double v_max, const RacelineOptions& options) {
  const std::size_t n = perturbs_m.size();
  if (n < 4) throw ConfigError("raceline needs at least 4 control points");
  for (double p : perturbs_m) {
    if (!std::isfinite(p)) throw ConfigError("non-finite perturbation");
  }
  if (!std::isfinite(v_min) || !std::isfinite(v_max)) throw ConfigError("non-finite velocity bound");
  if (v_min > v_max) throw ConfigError("v_min must not exceed v_max");

  const ClosedSpline& c = track.spline();
  const double lc = c.length();
  std::vector<double> knots(n + 1);
  for (std::size_t i = 0; i <= n; ++i) knots[i] = lc * static_cast<double>(i) / static_cast<double>(n);
  const PeriodicCubic offset(knots, std::vector<double>(perturbs_m.begin(), perturbs_m.end()));
  const OffsetCurve curve(c, offset);

  // Arc-length table of the raceline over the centerline's (t, sigma) table.
  // Inside one table interval both sigma(t) and the raceline arc r(t) are
  // replaced by cubic Hermite interpolants built from end values and speeds;
  // intervals are short enough that the error is far below the sampling step.
  const auto& tt = c.table_param();
  const auto& ts = c.table_arc();
  const std::size_t m = tt.size() - 1;
  std::vector<double> center_speed(m + 1), line_speed(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    center_speed[k] = norm(c.derivs_at_param(tt[k]).d1);
    line_speed[k] = curve.speed(tt[k], ts[k]);
  }
  auto hermite = [](double u, double h, double y0, double y1, double v0, double v1) {
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * v0 + (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * v1;
  };
  auto hermite_slope = [](double u, double h, double y0, double y1, double v0, double v1) {
    const double u2 = u * u;
    return ((6 * u2 - 6 * u) * y0 + (-6 * u2 + 6 * u) * y1) / h + (3 * u2 - 4 * u + 1) * v0 + (3 * u2 - 2 * u) * v1;
  };
  auto sigma_at = [&](std::size_t k, double t) {
    const double h = tt[k + 1] - tt[k];
    return hermite((t - tt[k]) / h, h, ts[k], ts[k + 1], center_speed[k], center_speed[k + 1]);
  };

  std::vector<double> rs(m + 1, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double half = 0.5 * (tt[k + 1] - tt[k]);
    const double mid = 0.5 * (tt[k + 1] + tt[k]);
    double acc = 0.0;
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      const double t = mid + half * kNodes[q];
      acc += kWeights[q] * curve.speed(t, sigma_at(k, t));
    }
    rs[k + 1] = rs[k] + acc * half;
  }
  const double length = rs[m];

  const auto count = std::max<std::size_t>(4, static_cast<std::size_t>(std::llround(length / options.ds)));
  const double ds = length / static_cast<double>(count);
  std::vector<double> xs(count), ys(count), hs(count), ks(count);
  std::size_t k = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double target = ds * static_cast<double>(j);
    while (k + 1 < m && rs[k + 1] <= target) ++k;
    const double h = tt[k + 1] - tt[k];
    const double y0 = rs[k], y1 = rs[k + 1], v0 = line_speed[k], v1 = line_speed[k + 1];
    double u = (target - y0) / (y1 - y0);
    for (int iter = 0; iter < 20; ++iter) {
      const double f = hermite(u, h, y0, y1, v0, v1) - target;
      const double g = hermite_slope(u, h, y0, y1, v0, v1);
      if (!(g > 0.0)) break;
      const double next = std::clamp(u - f / g, 0.0, 1.0);
      const double moved = std::abs(next - u);
      u = next;
      if (moved < 1e-15) break;
    }
    const double t = tt[k] + u * h;
    const auto sample = curve.eval(t, sigma_at(k, t));
    xs[j] = sample.p.x;
    ys[j] = sample.p.y;
    hs[j] = wrap_angle(sample.heading);
    ks[j] = sample.kappa;
  }
  std::vector<double> v = velocity_profile(ks, ds, v_min, v_max, options.a_long_max);
  return Raceline(std::move(xs), std::move(ys), std::move(hs), std::move(ks), std::move(v), length);
}

std::vector<double> curvature_speed_map(std::span<const double> kappa, double v_min, double v_max) {
  double kmax = 0.0;
  for (double k : kappa) kmax = std::max(kmax, std::abs(k));
  std::vector<double> v(kappa.size(), v_max);
  if (kmax < 1e-9) return v;
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    v[i] = v_min + (v_max - v_min) * (1.0 - std::abs(kappa[i]) / kmax);
  }
  return v;
}

void limit_acceleration(std::vector<double>& v, double ds, double a_max) {
  const std::size_t n = v.size();
  if (n < 2) return;
  const double budget = 2.0 * a_max * ds;
  for (std::size_t k = 1; k <= 2 * n; ++k) {
    const std::size_t i = k % n;
    const std::size_t prev = (k - 1) % n;
    v[i] = std::min(v[i], std::sqrt(v[prev] * v[prev] + budget));
  }
  for (std::size_t k = 2 * n; k-- > 0;) {
    const std::size_t i = k % n;
    const std::size_t next = (k + 1) % n;
    v[i] = std::min(v[i], std::sqrt(v[next] * v[next] + budget));
  }
}

std::vector<double> velocity_profile(std::span<const double> kappa, double ds, double v_min,
                                     double v_max, double a_max) {
  std::vector<double> v = curvature_speed_map(kappa, v_min, v_max);
  limit_acceleration(v, ds, a_max);
  return v;
}

Raceline::Projection Raceline::project(Vec2 q) const {
  const std::size_t n = x_.size();
  const auto coarse = grid_.nearest(q.x, q.y);
  Projection best;
  double best_d2 = coarse.dist2;
  best.segment = coarse.index;
  best.fraction = 0.0;
  best.foot = {x_[coarse.index], y_[coarse.index]};
  for (std::size_t seg : {(coarse.index + n - 1) % n, coarse.index}) {
    const Vec2 a{x_[seg], y_[seg]};
    const Vec2 b{x_[(seg + 1) % n], y_[(seg + 1) % n]};
    const Vec2 ab = b - a;
    const double f = std::clamp(dot(q - a, ab) / dot(ab, ab), 0.0, 1.0);
    const Vec2 foot = a + f * ab;
    const Vec2 r = q - foot;
    const double d2 = dot(r, r);
    if (d2 < best_d2) {
      best_d2 = d2;
      best.segment = seg;
      best.fraction = f;
      best.foot = foot;
    }
  }
  const std::size_t seg = best.segment;
  const Vec2 a{x_[seg], y_[seg]};
  const Vec2 b{x_[(seg + 1) % n], y_[(seg + 1) % n]};
  const Vec2 dir = (1.0 / norm(b - a)) * (b - a);
  best.s = ds_ * (static_cast<double>(seg) + best.fraction);
  best.lateral = cross(dir, q - best.foot);
  return best;
}

Raceline::Pose Raceline::at(double s) const {
  const std::size_t n = x_.size();
  const double sw = wrap_periodic(s, length_);
  std::size_t i = std::min(static_cast<std::size_t>(sw / ds_), n - 1);
  const double f = (sw - ds_ * static_cast<double>(i)) / ds_;
  const std::size_t j = (i + 1) % n;
  Pose p;
  p.position = {x_[i] + f * (x_[j] - x_[i]), y_[i] + f * (y_[j] - y_[i])};
  p.heading = wrap_angle(heading_[i] + f * wrap_angle(heading_[j] - heading_[i]));
  p.kappa = kappa_[i] + f * (kappa_[j] - kappa_[i]);
  p.v_ref = v_ref_[i] + f * (v_ref_[j] - v_ref_[i]);
  return p;
}

void write_raceline_csv(const std::filesystem::path& path, const Raceline& raceline) {
  io::CsvWriter w(path);
  w.header({"s_m", "x_m", "y_m", "heading_rad", "kappa", "v_ref"});
  for (std::size_t i = 0; i < raceline.size(); ++i) {
    w.row(std::vector<double>{raceline.s(i), raceline.x()[i], raceline.y()[i], raceline.heading()[i],
                              raceline.kappa()[i], raceline.v_ref()[i]});
  }
}

}  // namespace raceopt
