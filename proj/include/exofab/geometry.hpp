#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "exofab/error.hpp"
#include "exofab/numeric.hpp"

namespace exofab {

inline constexpr double kPi = 3.14159265358979323846;

// Coordinates beyond this are rejected as nonsense input (millimeters).
inline constexpr double kCoordinateLimit = 10000.0;
// Boundary slack for containment tests (millimeters).
inline constexpr double kBoundaryTolerance = 1e-9;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}; }

inline bool is_sane(Point2 p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::abs(p.x) <= kCoordinateLimit &&
         std::abs(p.y) <= kCoordinateLimit;
}

// Unit vector at `degrees` from the x-axis. Multiples of 90 degrees are exact
// so quarter-turn rotations commute bit-for-bit with the fills.
inline Point2 unit_direction(double degrees) {
  double turns = degrees / 90.0;
  if (turns == std::floor(turns) && std::abs(turns) < 1e9) {
    long q = static_cast<long>(turns) % 4;
    if (q < 0) q += 4;
    constexpr std::array<Point2, 4> exact{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
    return exact[static_cast<std::size_t>(q)];
  }
  double rad = degrees * kPi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

struct BoundingBox {
  Point2 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point2 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  bool empty() const { return min.x > max.x || min.y > max.y; }
  void add(Point2 p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
  }
  bool contains(Point2 p, double tol) const {
    return p.x >= min.x - tol && p.x <= max.x + tol && p.y >= min.y - tol && p.y <= max.y + tol;
  }
};

// ---------------------------------------------------------------------------
// Region

enum class RegionKind { rectangle, circle, polygon };

constexpr std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::rectangle: return "rectangle";
    case RegionKind::circle: return "circle";
    case RegionKind::polygon: return "polygon";
  }
  return "?";
}

namespace detail {

inline double signed_area(const std::vector<Point2>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

inline int orientation(Point2 a, Point2 b, Point2 c) {
  double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

inline bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  int o1 = orientation(p1, p2, q1);
  int o2 = orientation(p1, p2, q2);
  int o3 = orientation(q1, q2, p1);
  int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  Point2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, lerp(a, b, t));
}

}  // namespace detail

class Region {
 public:
  static Region rectangle(double width, double height, Point2 center = {}) {
    if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height))
      throw Error(ErrorCode::InvalidRegion, "rectangle needs positive finite width and height");
    if (!is_sane(center) || width > 2 * kCoordinateLimit || height > 2 * kCoordinateLimit)
      throw Error(ErrorCode::InvalidRegion, "rectangle outside coordinate limits");
    Region r;
    r.kind_ = RegionKind::rectangle;
    r.center_ = center;
    r.width_ = width;
    r.height_ = height;
    return r;
  }

  static Region circle(Point2 center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
      throw Error(ErrorCode::InvalidRegion, "circle needs a positive finite radius");
    if (!is_sane(center) || radius > kCoordinateLimit)
      throw Error(ErrorCode::InvalidRegion, "circle outside coordinate limits");
    Region r;
    r.kind_ = RegionKind::circle;
    r.center_ = center;
    r.radius_ = radius;
    return r;
  }

  // Vertices must describe a simple counterclockwise polygon.
  static Region polygon(std::vector<Point2> vertices) {
    if (vertices.size() < 3) throw Error(ErrorCode::InvalidRegion, "polygon needs at least 3 vertices");
    for (const auto& p : vertices)
      if (!is_sane(p)) throw Error(ErrorCode::InvalidRegion, "polygon vertex outside coordinate limits");
    double area = detail::signed_area(vertices);
    if (!(area > 0.0))
      throw Error(ErrorCode::InvalidRegion, "polygon must have positive area with counterclockwise winding");
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      Point2 a = vertices[i], b = vertices[(i + 1) % n];
      if (a == b) throw Error(ErrorCode::InvalidRegion, "polygon has repeated consecutive vertices");
      for (std::size_t j = i + 1; j < n; ++j) {
        if (j == i + 1 || (i == 0 && j == n - 1)) continue;
        if (detail::segments_intersect(a, b, vertices[j], vertices[(j + 1) % n]))
          throw Error(ErrorCode::InvalidRegion, "polygon is not simple");
      }
    }
    Region r;
    r.kind_ = RegionKind::polygon;
    r.vertices_ = std::move(vertices);
    return r;
  }

  RegionKind kind() const { return kind_; }
  Point2 center() const { return center_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double radius() const { return radius_; }
  const std::vector<Point2>& vertices() const { return vertices_; }

  // Rectangles and polygons as a counterclockwise vertex ring.
  std::vector<Point2> outline() const {
    if (kind_ == RegionKind::polygon) return vertices_;
    if (kind_ == RegionKind::rectangle) {
      double hw = width_ / 2, hh = height_ / 2;
      return {{center_.x - hw, center_.y - hh},
              {center_.x + hw, center_.y - hh},
              {center_.x + hw, center_.y + hh},
              {center_.x - hw, center_.y + hh}};
    }
    return {};
  }

  BoundingBox bounds() const {
    BoundingBox box;
    if (kind_ == RegionKind::circle) {
      box.add({center_.x - radius_, center_.y - radius_});
      box.add({center_.x + radius_, center_.y + radius_});
    } else {
      for (const auto& p : outline()) box.add(p);
    }
    return box;
  }

  double area() const {
    if (kind_ == RegionKind::circle) return kPi * radius_ * radius_;
    if (kind_ == RegionKind::rectangle) return width_ * height_;
    return detail::signed_area(vertices_);
  }

  // Points on the boundary (within `tol`) count as inside.
  bool contains(Point2 p, double tol = kBoundaryTolerance) const {
    if (kind_ == RegionKind::circle) return distance(p, center_) <= radius_ + tol;
    if (kind_ == RegionKind::rectangle)
      return std::abs(p.x - center_.x) <= width_ / 2 + tol && std::abs(p.y - center_.y) <= height_ / 2 + tol;
    const auto& v = vertices_;
    bool inside = false;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      if (detail::point_segment_distance(p, v[j], v[i]) <= tol) return true;
      if ((v[i].y > p.y) != (v[j].y > p.y)) {
        double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
        if (p.x < x) inside = !inside;
      }
    }
    return inside;
  }

  Region translated(Point2 d) const {
    Region r = *this;
    r.center_ = r.center_ + d;
    for (auto& p : r.vertices_) p = p + d;
    return r;
  }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  Region() = default;

  RegionKind kind_ = RegionKind::rectangle;
  Point2 center_{};
  double width_ = 0.0;
  double height_ = 0.0;
  double radius_ = 0.0;
  std::vector<Point2> vertices_;
};

// ---------------------------------------------------------------------------
// Embroidery configuration and the nine-point design grid

enum class Primitive { linear, radial, concentric };

constexpr std::string_view to_string(Primitive p) {
  switch (p) {
    case Primitive::linear: return "linear";
    case Primitive::radial: return "radial";
    case Primitive::concentric: return "concentric";
  }
  return "?";
}

inline std::optional<Primitive> parse_primitive(std::string_view s) {
  if (s == "linear") return Primitive::linear;
  if (s == "radial") return Primitive::radial;
  if (s == "concentric") return Primitive::concentric;
  return std::nullopt;
}

inline constexpr double kMinLineSpacing = 0.66;
inline constexpr double kMaxLineSpacing = 10.0;
inline constexpr double kMinStitchSpacing = 0.5;
inline constexpr double kMaxStitchSpacing = 15.0;
inline constexpr double kDefaultWavinessAmplitude = 1.5;
inline constexpr double kDefaultWavinessPeriod = 10.0;

// The densest grid column is labelled "L0.66" but means 150 lines per 100 mm.
inline constexpr double kDensestLineSpacing = 2.0 / 3.0;

inline constexpr std::array<double, 3> kGridLineSpacings{2.0, 1.0, kDensestLineSpacing};
inline constexpr std::array<double, 3> kGridStitchSpacings{1.0, 5.0, 15.0};

inline std::string format_spacing(double mm) {
  if (mm == kDensestLineSpacing) return "0.66";
  return shortest(mm);
}

inline std::string format_config_id(double line_spacing, double stitch_spacing) {
  return "L" + format_spacing(line_spacing) + "_S" + format_spacing(stitch_spacing);
}

struct Spacing {
  double line = 0.0;
  double stitch = 0.0;
};

// "L0.66_S1" -> {2/3, 1}. Other values parse literally.
inline Spacing parse_config_id(std::string_view id) {
  auto fail = [&] { return Error(ErrorCode::UnknownConfig, fmt::format("malformed config id '{}'", id)); };
  if (id.size() < 5 || id.front() != 'L') throw fail();
  auto sep = id.find("_S");
  if (sep == std::string_view::npos) throw fail();
  std::string_view l = id.substr(1, sep - 1);
  std::string_view s = id.substr(sep + 2);
  auto lv = parse_double(l);
  auto sv = parse_double(s);
  if (!lv || !sv || *lv <= 0 || *sv <= 0) throw fail();
  double line = (l == "0.66") ? kDensestLineSpacing : *lv;
  double stitch = (s == "0.66") ? kDensestLineSpacing : *sv;
  return {line, stitch};
}

inline std::string canonical_config_id(std::string_view id) {
  Spacing sp = parse_config_id(id);
  return format_config_id(sp.line, sp.stitch);
}

struct EmbroideryConfig {
  Primitive primitive = Primitive::linear;
  double line_spacing = 1.0;    // mm
  double stitch_spacing = 5.0;  // mm
  double angle_deg = 0.0;       // linear only
  double waviness_amplitude = kDefaultWavinessAmplitude;
  double waviness_period = kDefaultWavinessPeriod;

  static EmbroideryConfig grid(std::string_view config_id, Primitive primitive = Primitive::linear) {
    Spacing sp = parse_config_id(config_id);
    EmbroideryConfig c;
    c.primitive = primitive;
    c.line_spacing = sp.line;
    c.stitch_spacing = sp.stitch;
    return c;
  }

  std::string id() const { return format_config_id(line_spacing, stitch_spacing); }

  // Hard limits enforced by the fills. validate_design() reports softer
  // fabrication concerns separately.
  void check() const {
    auto bad = [](const std::string& m) { return Error(ErrorCode::InvalidConfig, m); };
    if (!(line_spacing >= kMinLineSpacing && line_spacing <= kMaxLineSpacing))
      throw bad(fmt::format("line spacing {} mm outside [{}, {}]", line_spacing, kMinLineSpacing, kMaxLineSpacing));
    if (!(stitch_spacing >= kMinStitchSpacing && stitch_spacing <= kMaxStitchSpacing))
      throw bad(fmt::format("stitch spacing {} mm outside [{}, {}]", stitch_spacing, kMinStitchSpacing,
                            kMaxStitchSpacing));
    if (!std::isfinite(angle_deg)) throw bad("angle must be finite");
    if (!(waviness_amplitude >= 0.0) || !std::isfinite(waviness_amplitude))
      throw bad("waviness amplitude must be non-negative");
    if (waviness_amplitude > 0.0 && !(waviness_period > 0.0 && std::isfinite(waviness_period)))
      throw bad("waviness period must be positive when amplitude is positive");
  }

  friend bool operator==(const EmbroideryConfig&, const EmbroideryConfig&) = default;
};

// ---------------------------------------------------------------------------
// Stitch plan

enum class StitchKind : std::uint8_t { stitch, jump };

struct StitchPoint {
  Point2 pos;
  StitchKind kind = StitchKind::stitch;
  // Index of the line, spoke or ring the point belongs to.
  std::uint32_t run = 0;

  friend bool operator==(const StitchPoint&, const StitchPoint&) = default;
};

struct StitchPlan {
  std::vector<StitchPoint> points;
  std::optional<EmbroideryConfig> config;
  std::optional<Region> region;
  int layer_count = 1;

  std::size_t stitch_count() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(),
                                                  [](const StitchPoint& p) { return p.kind == StitchKind::stitch; }));
  }

  BoundingBox bounds() const {
    BoundingBox box;
    for (const auto& p : points) box.add(p.pos);
    return box;
  }

  friend bool operator==(const StitchPlan&, const StitchPlan&) = default;
};

}  // namespace exofab
