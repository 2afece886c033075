#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "exofab.hpp"

namespace exofab::test {

// Fixed seeds everywhere; failures print the case index so they replay.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

  Point2 point(double extent) { return {uniform(-extent, extent), uniform(-extent, extent)}; }

  // Star-shaped around `c`, so always simple and counterclockwise.
  // one vertex per angular sector, so the polygon is star-shaped about c
  Region star_polygon(Point2 c, int n, double r_lo, double r_hi) {
    std::vector<Point2> v;
    for (int i = 0; i < n; ++i) {
      double a = 2.0 * kPi * (i + uniform(0.1, 0.9)) / n;
      double r = uniform(r_lo, r_hi);
      v.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    return Region::polygon(std::move(v));
  }

  Region region() {
    switch (integer(0, 2)) {
      case 0: return Region::rectangle(uniform(5, 120), uniform(5, 120), point(40));
      case 1: return Region::circle(point(40), uniform(5, 60));
      default: return star_polygon(point(40), integer(3, 9), 10, 50);
    }
  }

  Region circle() { return Region::circle(point(40), uniform(5, 60)); }

  EmbroideryConfig linear_config() {
    EmbroideryConfig c;
    c.primitive = Primitive::linear;
    c.line_spacing = uniform(1.0, 6.0);
    c.stitch_spacing = uniform(1.0, 15.0);
    c.angle_deg = uniform(-180, 180);
    return c;
  }

  EmbroideryConfig circular_config(Primitive p) {
    EmbroideryConfig c;
    c.primitive = p;
    c.line_spacing = uniform(2.0, 8.0);
    c.stitch_spacing = uniform(1.0, 10.0);
    c.waviness_amplitude = coin() ? 0.0 : uniform(0.2, 2.5);
    c.waviness_period = uniform(4, 20);
    return c;
  }

  // Arbitrary plan: a random walk with jumps mixed in, every point within
  // `extent` of the origin.
  StitchPlan walk(std::size_t n, double extent, double step) {
    StitchPlan plan;
    Point2 p = point(extent * 0.5);
    std::uint32_t run = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool jump = i == 0 || integer(0, 30) == 0;
      Point2 d = jump ? point(step * 20) : point(step);
      p = {std::clamp(p.x + d.x, -extent, extent), std::clamp(p.y + d.y, -extent, extent)};
      if (jump) ++run;
      plan.points.push_back({p, jump ? StitchKind::jump : StitchKind::stitch, run});
    }
    return plan;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Point2 rotate90(Point2 p) { return {-p.y, p.x}; }

inline std::vector<StitchPoint> stitches_of(const StitchPlan& plan) {
  std::vector<StitchPoint> out;
  for (const auto& p : plan.points)
    if (p.kind == StitchKind::stitch) out.push_back(p);
  return out;
}

// A fill of a random region with a random primitive and config.
inline StitchPlan random_plan(Gen& g, Region& region_out) {
  switch (g.integer(0, 2)) {
    case 0:
      region_out = g.region();
      return linear_fill(region_out, g.linear_config());
    case 1:
      region_out = g.circle();
      return radial_fill(region_out, g.circular_config(Primitive::radial));
    default:
      region_out = g.circle();
      return concentric_fill(region_out, g.circular_config(Primitive::concentric));
  }
}

}  // namespace exofab::test
