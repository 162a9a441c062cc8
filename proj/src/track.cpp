#include "raceopt/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "raceopt/error.hpp"
#include "raceopt/io.hpp"
#include "raceopt/kernels/nearest.hpp"

namespace raceopt {

Track Track::from_points(std::string name, std::vector<Vec2> centerline,
                         std::vector<double> width_left, std::vector<double> width_right) {
  const std::size_t n = centerline.size();
  if (n < 4) throw LoadError("too few points: track needs at least 4, got " + std::to_string(n));
  if (width_left.size() != n || width_right.size() != n) {
    throw LoadError("width arrays must match the centerline length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(centerline[i].x) || !std::isfinite(centerline[i].y)) {
      throw LoadError("non-finite coordinate at row " + std::to_string(i + 1));
    }
    if (!(width_left[i] > 0.0) || !(width_right[i] > 0.0)) {
      throw LoadError("non-positive width at row " + std::to_string(i + 1));
    }
    const Vec2 next = centerline[(i + 1) % n];
    if (!(norm(next - centerline[i]) > 1e-9)) {
      throw LoadError("duplicate consecutive point at row " + std::to_string((i + 1) % n + 1));
    }
  }

  Track t;
  t.name_ = std::move(name);
  t.centerline_ = std::move(centerline);
  t.width_left_ = std::move(width_left);
  t.width_right_ = std::move(width_right);
  try {
    t.spline_ = ClosedSpline::fit(t.centerline_);
  } catch (const FitError& e) {
    throw LoadError(std::string("centerline fit failed: ") + e.what());
  }
  const auto& table_t = t.spline_.table_param();
  t.lookup_x_.reserve(table_t.size() - 1);
  t.lookup_y_.reserve(table_t.size() - 1);
  for (std::size_t k = 0; k + 1 < table_t.size(); ++k) {
    const Vec2 p = t.spline_.derivs_at_param(table_t[k]).p;
    t.lookup_x_.push_back(p.x);
    t.lookup_y_.push_back(p.y);
  }
  t.lookup_grid_ = PointGrid(t.lookup_x_, t.lookup_y_);
  return t;
}

double Track::interpolate_width(const std::vector<double>& w, double s) const {
  const double sw = wrap_periodic(s, length());
  const std::size_t n = w.size();
  std::size_t lo = 0, hi = n;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (spline_.knot_arc(mid) <= sw) lo = mid; else hi = mid;
  }
  const double s0 = spline_.knot_arc(lo);
  const double s1 = (lo + 1 < n) ? spline_.knot_arc(lo + 1) : length();
  const double f = (s1 > s0) ? (sw - s0) / (s1 - s0) : 0.0;
  return w[lo] + f * (w[(lo + 1) % n] - w[lo]);
}

double Track::width_left(double s) const { return interpolate_width(width_left_, s); }
double Track::width_right(double s) const { return interpolate_width(width_right_, s); }

CenterlineProjection Track::project(Vec2 q) const {
  const auto coarse = lookup_grid_.nearest(q.x, q.y);
  const auto& table_t = spline_.table_param();
  const std::size_t m = lookup_x_.size();
  const double period = spline_.param_period();

  // Bracket [t_{k-1}, t_{k+1}] around the winning sample, unwrapped.
  const std::size_t k = coarse.index;
  const double tk = table_t[k];
  const double t_prev = (k == 0) ? table_t[m - 1] - period : table_t[k - 1];
  const double t_next = table_t[k + 1];

  auto dist2_at = [&](double t) {
    const Vec2 p = spline_.derivs_at_param(t).p - q;
    return dot(p, p);
  };

  double t = tk;
  for (int iter = 0; iter < 30; ++iter) {
    const auto d = spline_.derivs_at_param(t);
    const Vec2 r = d.p - q;
    const double g = dot(r, d.d1);
    const double h = dot(d.d1, d.d1) + dot(r, d.d2);
    double next = (h > 0.0) ? t - g / h : t - g / dot(d.d1, d.d1);
    next = std::clamp(next, t_prev, t_next);
    const double moved = std::abs(next - t);
    t = next;
    if (moved < 1e-13 * (1.0 + std::abs(t))) break;
  }
  if (dist2_at(t) > coarse.dist2) t = tk;

  const auto d = spline_.derivs_at_param(t);
  const Vec2 tangent = (1.0 / norm(d.d1)) * d.d1;
  CenterlineProjection out;
  out.s = wrap_periodic(spline_.arc_at(t), length());
  out.d = cross(tangent, q - d.p);
  return out;
}

Vec2 Track::offset_point(double s, double d) const { return raceopt::offset_point(spline_, s, d); }

ClosedSpline fit_closed_spline(std::span<const Vec2> points) { return ClosedSpline::fit(points); }

double curvature_at(const ClosedSpline& spline, double s) { return spline.curvature(s); }

Vec2 offset_point(const ClosedSpline& spline, double s, double d) {
  const auto deriv = spline.derivs_at_param(spline.param_at(s));
  const Vec2 tangent = (1.0 / norm(deriv.d1)) * deriv.d1;
  return deriv.p + d * left_normal(tangent);
}

CenterlineProjection project_to_centerline(const Track& track, Vec2 point) {
  return track.project(point);
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t#");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

Track parse_track_csv(const std::string& text, std::string name) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) {
      for (auto& h : io::split_csv_line(line)) header.push_back(trim(h));
      break;
    }
  }
  if (header.empty()) throw LoadError("empty track file");
  auto column = [&](const char* key) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), key);
    if (it == header.end()) throw LoadError(std::string("missing column ") + key);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t cx = column("x_m");
  const std::size_t cy = column("y_m");
  const std::size_t cl = column("w_tr_left_m");
  const std::size_t cr = column("w_tr_right_m");
  const std::size_t needed = std::max({cx, cy, cl, cr}) + 1;

  std::vector<Vec2> pts;
  std::vector<double> wl, wr;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = io::split_csv_line(line);
    if (fields.size() < needed) throw LoadError("too few fields at row " + std::to_string(row));
    auto num = [&](std::size_t c) {
      try {
        std::size_t used = 0;
        const std::string f = trim(fields[c]);
        const double v = std::stod(f, &used);
        if (used != f.size()) throw std::invalid_argument(f);
        return v;
      } catch (const std::exception&) {
        throw LoadError("unparsable number at row " + std::to_string(row));
      }
    };
    pts.push_back({num(cx), num(cy)});
    wl.push_back(num(cl));
    wr.push_back(num(cr));
  }
  return Track::from_points(std::move(name), std::move(pts), std::move(wl), std::move(wr));
}

Track load_track(const std::filesystem::path& path) {
  return parse_track_csv(io::read_file(path), path.stem().string());
}

void save_track(const std::filesystem::path& path, const Track& track) {
  io::CsvWriter w(path);
  w.header({"x_m", "y_m", "w_tr_left_m", "w_tr_right_m"});
  for (std::size_t i = 0; i < track.centerline().size(); ++i) {
    w.row(std::vector<double>{track.centerline()[i].x, track.centerline()[i].y, track.widths_left()[i],
                              track.widths_right()[i]});
  }
}

}  // namespace raceopt
