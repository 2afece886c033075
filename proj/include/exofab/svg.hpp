#pragma once

#include <string>

#include <fmt/format.h>

#include "exofab/geometry.hpp"

namespace exofab {

inline constexpr double kSvgMargin = 5.0;
inline constexpr std::size_t kSvgMaxDots = 2000;

namespace detail {

inline std::string svg_num(double v) {
  std::string s = fmt::format("{:.3f}", v);
  if (s == "-0.000") s = "0.000";
  return s;
}

}  // namespace detail

// SVG 1.1 preview, one user unit per millimeter with y flipped so the
// design's +y points up. Each run is a polyline; connecting stitches are
// solid lines and jumps dashed lines.
inline std::string write_svg(const StitchPlan& plan) {
  using detail::svg_num;
  BoundingBox box = plan.bounds();
  if (box.empty()) {
    box.add({0, 0});
  }
  const double min_x = box.min.x - kSvgMargin;
  const double min_y = -box.max.y - kSvgMargin;
  const double width = (box.max.x - box.min.x) + 2 * kSvgMargin;
  const double height = (box.max.y - box.min.y) + 2 * kSvgMargin;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}mm\" height=\"{}mm\" "
      "viewBox=\"{} {} {} {}\">\n",
      svg_num(width), svg_num(height), svg_num(min_x), svg_num(min_y), svg_num(width), svg_num(height));
  out += fmt::format("  <title>{} stitches, {} points</title>\n", plan.stitch_count(), plan.points.size());

  auto xy = [&](Point2 p) { return svg_num(p.x) + "," + svg_num(-p.y); };
  const auto& pts = plan.points;

  out += "  <g id=\"runs\" fill=\"none\" stroke=\"#1f3b73\" stroke-width=\"0.2\" stroke-linejoin=\"round\">\n";
  std::size_t i = 0;
  while (i < pts.size()) {
    if (pts[i].kind != StitchKind::stitch) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < pts.size() && pts[j + 1].kind == StitchKind::stitch && pts[j + 1].run == pts[i].run) ++j;
    out += "    <polyline points=\"";
    for (std::size_t k = i; k <= j; ++k) out += (k == i ? "" : " ") + xy(pts[k].pos);
    out += "\"/>\n";
    i = j + 1;
  }
  out += "  </g>\n";

  out += "  <g id=\"connectors\" stroke=\"#1f3b73\" stroke-width=\"0.2\">\n";
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k].kind == StitchKind::stitch && pts[k - 1].kind == StitchKind::stitch && pts[k].run != pts[k - 1].run)
      out += fmt::format("    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", svg_num(pts[k - 1].pos.x),
                         svg_num(-pts[k - 1].pos.y), svg_num(pts[k].pos.x), svg_num(-pts[k].pos.y));
  out += "  </g>\n";

  out += "  <g id=\"jumps\" stroke=\"#c0392b\" stroke-width=\"0.15\" stroke-dasharray=\"1,1\">\n";
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const Point2 from = pts[k - 1].pos;
    if (pts[k].kind != StitchKind::jump || from == pts[k].pos) continue;
    out += fmt::format("    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", svg_num(from.x), svg_num(-from.y),
                       svg_num(pts[k].pos.x), svg_num(-pts[k].pos.y));
  }
  out += "  </g>\n";

  if (pts.size() <= kSvgMaxDots) {
    out += "  <g id=\"needle-points\" fill=\"#1f3b73\">\n";
    for (const auto& p : pts)
      if (p.kind == StitchKind::stitch)
        out += fmt::format("    <circle cx=\"{}\" cy=\"{}\" r=\"0.25\"/>\n", svg_num(p.pos.x), svg_num(-p.pos.y));
    out += "  </g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace exofab
