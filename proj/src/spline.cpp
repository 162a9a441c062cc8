#include "raceopt/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "raceopt/error.hpp"

namespace raceopt {

namespace {

// Cyclic tridiagonal solve (Sherman-Morrison on top of Thomas).
// sub[i] couples x[i-1], sup[i] couples x[i+1], with wraparound at both ends.
std::vector<double> solve_cyclic(const std::vector<double>& sub, const std::vector<double>& diag,
                                 const std::vector<double>& sup, const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  const double alpha = sup[n - 1];  // A[n-1][0]
  const double beta = sub[0];       // A[0][n-1]
  const double gamma = -diag[0];

  std::vector<double> bb(diag);
  bb[0] = diag[0] - gamma;
  bb[n - 1] = diag[n - 1] - alpha * beta / gamma;

  auto thomas = [&](const std::vector<double>& r) {
    std::vector<double> c(n), x(n);
    double denom = bb[0];
    x[0] = r[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
      c[i] = sup[i - 1] / denom;
      denom = bb[i] - sub[i] * c[i];
      x[i] = (r[i] - sub[i] * x[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i + 1] * x[i + 1];
    return x;
  };

  std::vector<double> x = thomas(rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const std::vector<double> z = thomas(u);
  const double fact =
      (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights = {0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

}  // namespace

PeriodicCubic::PeriodicCubic(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const std::size_t n = values_.size();
  if (n < 3 || knots_.size() != n + 1) throw FitError("periodic cubic needs >= 3 samples");
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = knots_[i + 1] - knots_[i];
    if (!(h[i] > 0.0)) throw FitError("periodic cubic knots must be strictly increasing");
  }
  std::vector<double> sub(n), diag(n), sup(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t prev = (i + n - 1) % n;
    const std::size_t next = (i + 1) % n;
    sub[i] = h[prev];
    diag[i] = 2.0 * (h[prev] + h[i]);
    sup[i] = h[i];
    rhs[i] = 6.0 * ((values_[next] - values_[i]) / h[i] - (values_[i] - values_[prev]) / h[prev]);
  }
  second_ = solve_cyclic(sub, diag, sup, rhs);
}

double PeriodicCubic::wrap(double t) const {
  return knots_.front() + wrap_periodic(t - knots_.front(), period());
}

std::size_t PeriodicCubic::segment_of(double wrapped_t) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), wrapped_t);
  std::size_t seg = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
  return std::min(seg, values_.size() - 1);
}

PeriodicCubic::Eval PeriodicCubic::eval(double t) const {
  const double tw = wrap(t);
  const std::size_t i = segment_of(tw);
  const std::size_t j = (i + 1) % values_.size();
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - tw) / h;
  const double b = (tw - knots_[i]) / h;
  const double mi = second_[i];
  const double mj = second_[j];
  Eval e{};
  e.value = a * values_[i] + b * values_[j] + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
  e.d1 = (values_[j] - values_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * mi +
         (3.0 * b * b - 1.0) / 6.0 * h * mj;
  e.d2 = a * mi + b * mj;
  e.d3 = (mj - mi) / h;
  return e;
}

ClosedSpline ClosedSpline::fit(std::span<const Vec2> points) {
  const std::size_t n = points.size();
  if (n < 4) throw FitError("too few points: closed spline needs at least 4, got " + std::to_string(n));
  std::vector<double> knots(n + 1, 0.0);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = points[i];
    const Vec2 b = points[(i + 1) % n];
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
      throw FitError("non-finite point at index " + std::to_string(i));
    }
    const double chord = norm(b - a);
    if (!(chord > 1e-9)) {
      throw FitError("coincident consecutive points at index " + std::to_string(i));
    }
    knots[i + 1] = knots[i] + chord;
    xs[i] = a.x;
    ys[i] = a.y;
  }

  ClosedSpline s;
  s.x_ = PeriodicCubic(knots, xs);
  s.y_ = PeriodicCubic(knots, ys);

  s.table_t_.reserve(n * kTableOversample + 1);
  s.table_s_.reserve(n * kTableOversample + 1);
  s.knot_arc_.resize(n);
  double arc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.knot_arc_[i] = arc;
    const double h = knots[i + 1] - knots[i];
    for (int k = 0; k < kTableOversample; ++k) {
      const double t0 = knots[i] + h * k / kTableOversample;
      const double t1 = (k + 1 == kTableOversample) ? knots[i + 1] : knots[i] + h * (k + 1) / kTableOversample;
      s.table_t_.push_back(t0);
      s.table_s_.push_back(arc);
      arc += s.integrate_speed(t0, t1);
    }
  }
  s.table_t_.push_back(knots.back());
  s.table_s_.push_back(arc);
  s.length_ = arc;
  return s;
}

ClosedSpline::Derivs ClosedSpline::derivs_at_param(double t) const {
  const auto ex = x_.eval(t);
  const auto ey = y_.eval(t);
  return {{ex.value, ey.value}, {ex.d1, ey.d1}, {ex.d2, ey.d2}, {ex.d3, ey.d3}};
}

double ClosedSpline::speed(double t) const {
  return std::hypot(x_.eval(t).d1, y_.eval(t).d1);
}

double ClosedSpline::integrate_speed(double t0, double t1) const {
  const double half = 0.5 * (t1 - t0);
  const double mid = 0.5 * (t1 + t0);
  double acc = 0.0;
  for (std::size_t k = 0; k < kGaussNodes.size(); ++k) acc += kGaussWeights[k] * speed(mid + half * kGaussNodes[k]);
  return acc * half;
}

double ClosedSpline::arc_at(double t) const {
  const double tw = x_.wrap(t);
  const auto it = std::upper_bound(table_t_.begin(), table_t_.end(), tw);
  std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - table_t_.begin() - 1, 0));
  k = std::min(k, table_t_.size() - 2);
  return table_s_[k] + integrate_speed(table_t_[k], tw);
}

double ClosedSpline::param_at(double s) const {
  const double sw = wrap_periodic(s, length_);
  const auto it = std::upper_bound(table_s_.begin(), table_s_.end(), sw);
  std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - table_s_.begin() - 1, 0));
  k = std::min(k, table_s_.size() - 2);
  const double t_lo = table_t_[k];
  const double t_hi = table_t_[k + 1];
  const double s_lo = table_s_[k];
  const double s_hi = table_s_[k + 1];
  double t = t_lo + (sw - s_lo) / (s_hi - s_lo) * (t_hi - t_lo);
  for (int iter = 0; iter < 12; ++iter) {
    const double f = s_lo + integrate_speed(t_lo, t) - sw;
    const double v = speed(t);
    const double next = std::clamp(t - f / v, t_lo, t_hi);
    const double moved = std::abs(next - t);
    t = next;
    if (moved < 1e-14 * (1.0 + std::abs(t))) break;
  }
  return t;
}

double curvature_from_derivs(Vec2 d1, Vec2 d2) {
  const double sp = norm(d1);
  return cross(d1, d2) / (sp * sp * sp);
}

Vec2 ClosedSpline::position(double s) const { return derivs_at_param(param_at(s)).p; }

Vec2 ClosedSpline::tangent(double s) const {
  const Vec2 d1 = derivs_at_param(param_at(s)).d1;
  return (1.0 / norm(d1)) * d1;
}

Vec2 ClosedSpline::normal(double s) const { return left_normal(tangent(s)); }

double ClosedSpline::heading(double s) const {
  const Vec2 d1 = derivs_at_param(param_at(s)).d1;
  return std::atan2(d1.y, d1.x);
}

double ClosedSpline::curvature(double s) const {
  const auto d = derivs_at_param(param_at(s));
  return curvature_from_derivs(d.d1, d.d2);
}

double ClosedSpline::curvature_rate(double s) const {
  const auto d = derivs_at_param(param_at(s));
  const double sp2 = dot(d.d1, d.d1);
  const double sp = std::sqrt(sp2);
  const double c = cross(d.d1, d.d2);
  // d/dt of c / |r'|^3, then divide by |r'| to get d/ds.
  const double dc = cross(d.d1, d.d3);
  const double dsp2 = 2.0 * dot(d.d1, d.d2);
  const double dkappa_dt = (dc * sp2 - 1.5 * c * dsp2) / (sp2 * sp2 * sp);
  return dkappa_dt / sp;
}

}  // namespace raceopt
