#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "exofab/error.hpp"
#include "exofab/geometry.hpp"

namespace exofab {

namespace detail {

// Abscissae {0, S, 2S, ..., floor(len/S)*S} plus the endpoint len.
inline std::vector<double> stitch_abscissae(double len, double spacing) {
  std::vector<double> out;
  auto count = static_cast<long>(std::floor(len / spacing + 1e-9));
  out.reserve(static_cast<std::size_t>(count) + 2);
  for (long j = 0; j <= count; ++j) out.push_back(std::min(static_cast<double>(j) * spacing, len));
  if (len - out.back() > 1e-9)
    out.push_back(len);
  else
    out.back() = len;
  return out;
}

class PlanBuilder {
 public:
  explicit PlanBuilder(StitchPlan& plan) : plan_(plan) {}

  bool empty() const { return plan_.points.empty(); }
  Point2 last() const { return plan_.points.back().pos; }

  void jump_to(Point2 p, std::uint32_t run) {
    plan_.points.push_back({p, StitchKind::jump, run});
    plan_.points.push_back({p, StitchKind::stitch, run});
  }
  void stitch(Point2 p, std::uint32_t run) { plan_.points.push_back({p, StitchKind::stitch, run}); }

  // Sews `pts` as one run. The entry is a jump unless `connect` allows a
  // direct stitch from the current position.
  void run(const std::vector<Point2>& pts, std::uint32_t run, bool connect) {
    if (pts.empty()) return;
    std::size_t start = 0;
    if (empty() || !connect) {
      jump_to(pts.front(), run);
      start = 1;
    } else if (last() == pts.front()) {
      start = 1;
    }
    for (std::size_t i = start; i < pts.size(); ++i) stitch(pts[i], run);
  }

 private:
  StitchPlan& plan_;
};

// Sorted inside intervals of the line {u*dir + v*normal} for one fixed v.
inline std::vector<std::pair<double, double>> scanline_intervals(const std::vector<Point2>& local_ring, double v) {
  std::vector<double> xs;
  const std::size_t n = local_ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point2 a = local_ring[i], b = local_ring[(i + 1) % n];
    if ((a.y <= v && v < b.y) || (b.y <= v && v < a.y)) {
      double t = (v - a.y) / (b.y - a.y);
      xs.push_back(a.x + t * (b.x - a.x));
    }
  }
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
    if (xs[i + 1] - xs[i] > 1e-9) out.emplace_back(xs[i], xs[i + 1]);
  return out;
}

// Samples a parametric curve at arc-length multiples of `spacing` (plus the
// endpoint). Arc length is integrated with composite Gauss-Legendre, and each
// sample is solved to machine precision, so consecutive chords never exceed
// `spacing`.
class ArcLengthSampler {
 public:
  using PointFn = std::function<Point2(double)>;
  using SpeedFn = std::function<double(double)>;

  ArcLengthSampler(PointFn point, SpeedFn speed, double t0, double t1, std::size_t segments)
      : point_(std::move(point)), speed_(std::move(speed)) {
    segments = std::max<std::size_t>(segments, 1);
    knots_.resize(segments + 1);
    cumulative_.resize(segments + 1);
    for (std::size_t i = 0; i <= segments; ++i)
      knots_[i] = (i == segments) ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(segments);
    cumulative_[0] = 0.0;
    for (std::size_t i = 0; i < segments; ++i)
      cumulative_[i + 1] = cumulative_[i] + integrate(knots_[i], knots_[i + 1]);
  }

  double length() const { return cumulative_.back(); }

  std::vector<Point2> sample(double spacing) const {
    std::vector<Point2> out;
    for (double s : stitch_abscissae(length(), spacing)) out.push_back(point_(parameter_at(s)));
    out.back() = point_(knots_.back());
    return out;
  }

 private:
  double integrate(double a, double b) const {
    static constexpr std::array<double, 8> x{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                             -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                             0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> w{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                             0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                             0.2223810344533745, 0.1012285362903763};
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * speed_(mid + half * x[i]);
    return sum * half;
  }

  double parameter_at(double s) const {
    if (s <= 0.0) return knots_.front();
    if (s >= length()) return knots_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    std::size_t seg = static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
    double lo = knots_[seg], hi = knots_[seg + 1], target = s - cumulative_[seg];
    // Bisection keeps the returned parameter at or before the target arc
    // length, so the chord to the previous sample stays within spacing.
    for (int iter = 0; iter < 60; ++iter) {
      double m = 0.5 * (lo + hi);
      if (integrate(knots_[seg], m) <= target)
        lo = m;
      else
        hi = m;
    }
    return lo;
  }

  PointFn point_;
  SpeedFn speed_;
  std::vector<double> knots_;
  std::vector<double> cumulative_;
};

inline std::size_t segments_for(double extent, double period, double amplitude) {
  double step = amplitude > 0.0 ? std::min(period / 32.0, 0.5) : 0.5;
  return static_cast<std::size_t>(std::ceil(extent / step)) + 1;
}

inline Point2 project_into_disk(Point2 p, Point2 center, double radius) {
  Point2 d = p - center;
  double r = norm(d);
  if (r <= radius) return p;
  return center + (radius / r) * d;
}

inline void require_circle(const Region& region, Primitive primitive) {
  if (region.kind() != RegionKind::circle)
    throw Error(ErrorCode::ConfigMismatch,
                fmt::format("{} fill needs a circle region, got {}", to_string(primitive), to_string(region.kind())));
}

}  // namespace detail

// Parallel lines at `line_spacing`, serpentine ordered. Lines run along
// `angle_deg`; the line count across the region's extent E perpendicular to
// them is round(E / line_spacing), at least one.
inline StitchPlan linear_fill(const Region& region, const EmbroideryConfig& config) {
  if (config.primitive != Primitive::linear)
    throw Error(ErrorCode::ConfigMismatch, "linear_fill needs a linear config");
  config.check();

  const Point2 dir = unit_direction(config.angle_deg);
  const Point2 normal{-dir.y, dir.x};
  auto to_local = [&](Point2 p) { return Point2{dot(p, dir), dot(p, normal)}; };
  auto to_world = [&](double u, double v) { return Point2{u * dir.x + v * normal.x, u * dir.y + v * normal.y}; };

  std::vector<Point2> ring;
  double vmin = 0, vmax = 0;
  Point2 center_local{};
  if (region.kind() == RegionKind::circle) {
    center_local = to_local(region.center());
    vmin = center_local.y - region.radius();
    vmax = center_local.y + region.radius();
  } else {
    for (const auto& p : region.outline()) ring.push_back(to_local(p));
    vmin = vmax = ring.front().y;
    for (const auto& p : ring) {
      vmin = std::min(vmin, p.y);
      vmax = std::max(vmax, p.y);
    }
  }
  const double extent = vmax - vmin;
  if (extent < 1e-6) throw Error(ErrorCode::RegionDegenerate, "region extent below 1e-6 mm");

  const long lines = std::max(1L, std::lround(extent / config.line_spacing));
  const double vc = 0.5 * (vmin + vmax);
  const double reach = std::max(config.line_spacing, config.stitch_spacing) + 1e-9;

  StitchPlan plan;
  plan.config = config;
  plan.region = region;
  detail::PlanBuilder builder(plan);

  for (long i = 0; i < lines; ++i) {
    const double v = vc + (static_cast<double>(i) - 0.5 * static_cast<double>(lines - 1)) * config.line_spacing;
    std::vector<std::pair<double, double>> intervals;
    if (region.kind() == RegionKind::circle) {
      double dv = v - center_local.y;
      double h = region.radius() * region.radius() - dv * dv;
      if (h > 0) {
        double du = std::sqrt(h);
        intervals.emplace_back(center_local.x - du, center_local.x + du);
      }
    } else {
      intervals = detail::scanline_intervals(ring, v);
    }
    const bool forward = (i % 2) == 0;
    if (!forward) std::reverse(intervals.begin(), intervals.end());

    const auto run = static_cast<std::uint32_t>(i);
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      auto [u0, u1] = intervals[k];
      std::vector<Point2> pts;
      for (double a : detail::stitch_abscissae(u1 - u0, config.stitch_spacing)) pts.push_back(to_world(u0 + a, v));
      if (!forward) std::reverse(pts.begin(), pts.end());
      bool connect = false;
      if (k == 0 && !builder.empty()) {
        Point2 from = builder.last();
        connect = distance(from, pts.front()) <= reach && region.contains(lerp(from, pts.front(), 0.5));
      }
      builder.run(pts, run, connect);
    }
  }
  return plan;
}

// Spokes from the circle center to the rim, N = round(2*pi*R / line_spacing).
// Even spokes are sewn outward and odd spokes inward; consecutive spokes meet
// at the center (shared stitch) or are joined by a jump along the rim.
inline StitchPlan radial_fill(const Region& region, const EmbroideryConfig& config) {
  if (config.primitive != Primitive::radial) throw Error(ErrorCode::ConfigMismatch, "radial_fill needs a radial config");
  detail::require_circle(region, config.primitive);
  config.check();
  const double radius = region.radius();
  const Point2 c = region.center();
  if (radius < 1e-6) throw Error(ErrorCode::RegionDegenerate, "circle radius below 1e-6 mm");

  const long spokes = std::max(1L, std::lround(2.0 * kPi * radius / config.line_spacing));
  const double amp = config.waviness_amplitude;
  const double k = amp > 0.0 ? 2.0 * kPi / config.waviness_period : 0.0;
  const std::size_t segments = detail::segments_for(radius, config.waviness_period, amp);

  StitchPlan plan;
  plan.config = config;
  plan.region = region;
  detail::PlanBuilder builder(plan);

  for (long i = 0; i < spokes; ++i) {
    const double phi = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(spokes);
    const Point2 d{std::cos(phi), std::sin(phi)};
    const Point2 n{-d.y, d.x};
    auto point = [=](double s) {
      double w = amp > 0.0 ? amp * std::sin(k * s) : 0.0;
      return Point2{c.x + s * d.x + w * n.x, c.y + s * d.y + w * n.y};
    };
    auto speed = [=](double s) {
      double dw = amp > 0.0 ? amp * k * std::cos(k * s) : 0.0;
      return std::sqrt(1.0 + dw * dw);
    };
    detail::ArcLengthSampler sampler(point, speed, 0.0, radius, segments);
    std::vector<Point2> pts = sampler.sample(config.stitch_spacing);
    pts.front() = c;
    for (auto& p : pts) p = detail::project_into_disk(p, c, radius);

    const bool outward = (i % 2) == 0;
    if (!outward) std::reverse(pts.begin(), pts.end());
    // Inward spokes start with a rim jump; outward spokes continue from the
    // center where the previous inward spoke ended.
    builder.run(pts, static_cast<std::uint32_t>(i), outward);
  }
  return plan;
}

// Rings at radii k*line_spacing, k = 1..floor(R / line_spacing), inner to
// outer, each closed and sewn counterclockwise from angle 0.
inline StitchPlan concentric_fill(const Region& region, const EmbroideryConfig& config) {
  if (config.primitive != Primitive::concentric)
    throw Error(ErrorCode::ConfigMismatch, "concentric_fill needs a concentric config");
  detail::require_circle(region, config.primitive);
  config.check();
  const double radius = region.radius();
  const Point2 c = region.center();
  const auto rings = static_cast<long>(std::floor(radius / config.line_spacing + 1e-9));
  if (rings < 1)
    throw Error(ErrorCode::RegionDegenerate,
                fmt::format("radius {} mm holds no ring at pitch {} mm", radius, config.line_spacing));

  StitchPlan plan;
  plan.config = config;
  plan.region = region;
  detail::PlanBuilder builder(plan);

  for (long ring = 1; ring <= rings; ++ring) {
    const double r = std::min(static_cast<double>(ring) * config.line_spacing, radius);
    const double amp = std::min(config.waviness_amplitude, r);
    double waves = 0.0;
    if (amp > 0.0) waves = std::max(1.0, std::round(2.0 * kPi * r / config.waviness_period));
    auto rho = [=](double phi) { return amp > 0.0 ? r + amp * std::sin(waves * phi) : r; };
    auto point = [=](double phi) {
      double p = rho(phi);
      return Point2{c.x + p * std::cos(phi), c.y + p * std::sin(phi)};
    };
    auto speed = [=](double phi) {
      double dp = amp > 0.0 ? amp * waves * std::cos(waves * phi) : 0.0;
      double p = rho(phi);
      return std::sqrt(dp * dp + p * p);
    };
    const std::size_t segments = detail::segments_for(2.0 * kPi * r, config.waviness_period, amp);
    detail::ArcLengthSampler sampler(point, speed, 0.0, 2.0 * kPi, segments);
    std::vector<Point2> pts = sampler.sample(config.stitch_spacing);
    pts.back() = pts.front();
    for (auto& p : pts) p = detail::project_into_disk(p, c, radius);
    builder.run(pts, static_cast<std::uint32_t>(ring - 1), false);
  }
  return plan;
}

namespace detail {

// Parameter intervals [t0, t1] of segment a->b lying inside the region.
inline std::vector<std::pair<double, double>> inside_intervals(const Region& region, Point2 a, Point2 b) {
  std::vector<std::pair<double, double>> out;
  Point2 ab = b - a;
  if (ab == Point2{}) {
    if (region.contains(a)) out.emplace_back(0.0, 1.0);
    return out;
  }
  if (region.kind() == RegionKind::circle) {
    Point2 f = a - region.center();
    double qa = dot(ab, ab), qb = 2.0 * dot(f, ab);
    double qc = dot(f, f) - region.radius() * region.radius();
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return out;
    double sq = std::sqrt(disc);
    double t0 = std::max(0.0, (-qb - sq) / (2.0 * qa));
    double t1 = std::min(1.0, (-qb + sq) / (2.0 * qa));
    if (region.contains(a)) t0 = 0.0;
    if (region.contains(b)) t1 = 1.0;
    if (t1 > t0) out.emplace_back(t0, t1);
    return out;
  }
  std::vector<double> ts{0.0, 1.0};
  const auto ring = region.outline();
  for (std::size_t i = 0; i < ring.size(); ++i) {
    Point2 p = ring[i], q = ring[(i + 1) % ring.size()];
    Point2 pq = q - p;
    double denom = cross(ab, pq);
    if (denom == 0.0) {
      // Collinear overlap: vertex projections are breakpoints.
      for (Point2 v : {p, q}) {
        double t = dot(v - a, ab) / dot(ab, ab);
        if (t > 0.0 && t < 1.0) ts.push_back(t);
      }
      continue;
    }
    double t = cross(p - a, pq) / denom;
    double s = cross(p - a, ab) / denom;
    if (t > 0.0 && t < 1.0 && s >= -1e-12 && s <= 1.0 + 1e-12) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    double t0 = ts[i], t1 = ts[i + 1];
    if (!region.contains(lerp(a, b, 0.5 * (t0 + t1)))) continue;
    if (!out.empty() && out.back().second == t0)
      out.back().second = t1;
    else
      out.emplace_back(t0, t1);
  }
  return out;
}

}  // namespace detail

// Keeps the parts of the plan's sewn segments that lie inside `region`.
// Severed runs resume with a jump to the boundary entry point.
inline StitchPlan clip_to_region(const StitchPlan& plan, const Region& region) {
  StitchPlan out;
  out.config = plan.config;
  out.region = region;
  out.layer_count = plan.layer_count;
  auto& pts = out.points;

  for (std::size_t i = 0; i < plan.points.size(); ++i) {
    const StitchPoint& cur = plan.points[i];
    if (i == 0 || cur.kind == StitchKind::jump) {
      if (region.contains(cur.pos)) pts.push_back(cur);
      continue;
    }
    const Point2 a = plan.points[i - 1].pos;
    const Point2 b = cur.pos;
    for (auto [t0, t1] : detail::inside_intervals(region, a, b)) {
      Point2 s = (t0 == 0.0) ? a : lerp(a, b, t0);
      Point2 e = (t1 == 1.0) ? b : lerp(a, b, t1);
      if (t1 <= t0 && !(a == b)) continue;
      if (pts.empty() || !(pts.back().pos == s)) {
        pts.push_back({s, StitchKind::jump, cur.run});
        pts.push_back({s, StitchKind::stitch, cur.run});
        if (s == e) continue;
      }
      pts.push_back({e, StitchKind::stitch, cur.run});
    }
  }
  return out;
}

// Dispatches on the configured primitive.
inline StitchPlan generate_plan(const Region& region, const EmbroideryConfig& config, int layers = 1) {
  StitchPlan plan;
  switch (config.primitive) {
    case Primitive::linear: plan = linear_fill(region, config); break;
    case Primitive::radial: plan = radial_fill(region, config); break;
    case Primitive::concentric: plan = concentric_fill(region, config); break;
  }
  plan.layer_count = std::max(1, layers);
  return plan;
}

}  // namespace exofab
