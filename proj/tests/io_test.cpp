#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "support.hpp"

using namespace exofab;
using exofab::test::Gen;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(EXOFAB_SOURCE_DIR) + "/" + rel, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimalSpec = R"([design]
name = demo
fabric = stretch-390

[region]
shape = circle
radius_mm = 30

[pattern]
primitive = radial
line_spacing_mm = 4
stitch_spacing_mm = 3
)";

template <class F>
Error error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no exception";
  return Error(ErrorCode::ParseError, "none");
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

// --- design spec ------------------------------------------------------------

TEST(DesignSpec, CookbookSplint) {
  DesignSpec s = parse_design_spec(slurp("cookbook/splint.spec"));
  EXPECT_EQ(s.name, "finger-splint");
  EXPECT_EQ(s.fabric, "nonstretch-336");
  EXPECT_EQ(s.layers, 4);
  EXPECT_EQ(s.pattern.primitive, Primitive::linear);
  EXPECT_EQ(s.pattern.line_spacing, 2.0 / 3.0);
  EXPECT_EQ(s.pattern.stitch_spacing, 1.0);
  EXPECT_EQ(s.config_id, "L0.66_S1");
  EXPECT_EQ(s.thread, "nylon-tex60");
}

TEST(DesignSpec, DefaultsAreAppliedAndRecorded) {
  DesignSpec s = parse_design_spec(kMinimalSpec);
  EXPECT_EQ(s.pattern.angle_deg, 0.0);
  EXPECT_EQ(s.pattern.waviness_amplitude, 1.5);
  EXPECT_EQ(s.pattern.waviness_period, 10.0);
  EXPECT_EQ(s.layers, 1);
  EXPECT_EQ(s.thread_side, ThreadSide::back);
  for (const char* k : {"pattern.angle_deg", "pattern.waviness_amp_mm", "pattern.waviness_period_mm", "design.layers",
                        "design.thread", "design.thread_side", "region.center"})
    EXPECT_TRUE(s.defaulted.count(k)) << k;
  EXPECT_EQ(s.region, Region::circle({}, 30));
}

TEST(DesignSpec, MissingSectionIsNamed) {
  std::string text = slurp("cookbook/splint.spec");
  text = text.substr(0, text.find("[pattern]"));
  Error e = error_of([&] { parse_design_spec(text); });
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(e.what()).find("[pattern]"), std::string::npos);
}

TEST(DesignSpec, ErrorsCarryLineNumbers) {
  std::string text = kMinimalSpec;
  Error e = error_of([&] { parse_design_spec(text + "colour = red\n"); });
  EXPECT_EQ(e.code(), ErrorCode::UnknownKey);
  EXPECT_EQ(e.line(), 13);

  std::string bad_fabric = text;
  bad_fabric.replace(bad_fabric.find("stretch-390"), 11, "velvet");
  e = error_of([&] { parse_design_spec(bad_fabric); });
  EXPECT_EQ(e.code(), ErrorCode::UnknownFabric);
  EXPECT_EQ(e.line(), 3);

  std::string bad_number = text;
  bad_number.replace(bad_number.find("= 30"), 4, "= thirty");
  e = error_of([&] { parse_design_spec(bad_number); });
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_EQ(e.line(), 7);

  e = error_of([&] { parse_design_spec("name = x\n"); });
  EXPECT_EQ(e.line(), 1);
  e = error_of([&] { parse_design_spec("[design\n"); });
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  e = error_of([&] { parse_design_spec(text + "[extra]\n"); });
  EXPECT_EQ(e.line(), 13);
}

TEST(DesignSpec, SemanticChecks) {
  std::string text = kMinimalSpec;
  auto with = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_EQ(error_of([&] { parse_design_spec(with("radius_mm = 30", "radius_mm = -3")); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([&] { parse_design_spec(with("line_spacing_mm = 4", "line_spacing_mm = 40")); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([&] { parse_design_spec(with("primitive = radial", "primitive = spiral")); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([&] { parse_design_spec(with("radius_mm = 30", "radius_mm = 30\nwidth_mm = 3")); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([&] { parse_design_spec(with("fabric = stretch-390", "fabric = stretch-390\nlayers = 5")); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([&] { parse_design_spec(with("fabric = stretch-390", "fabric = stretch-390\nthread = silk")); })
                .code(),
            ErrorCode::UnknownThread);
  EXPECT_EQ(error_of([&] {
              parse_design_spec(with("line_spacing_mm = 4", "config = L1_S5\nline_spacing_mm = 4"));
            }).code(),
            ErrorCode::ParseError);
}

TEST(DesignSpec, PolygonRegion) {
  std::string text =
      "[design]\nname = p\nfabric = nonstretch-336\n"
      "[region]\nshape = polygon\nvertices = 0,0; 40,0; 40,30; 0,30  # a box\n"
      "[pattern]\nprimitive = linear\nconfig = L2_S5\nangle_deg = 45\n";
  DesignSpec s = parse_design_spec(text);
  ASSERT_EQ(s.region.kind(), RegionKind::polygon);
  EXPECT_EQ(s.region.vertices().size(), 4u);
  EXPECT_EQ(s.pattern.angle_deg, 45.0);
  EXPECT_EQ(parse_design_spec(print_design_spec(s)), s);
  std::string cw = text;
  cw.replace(cw.find("0,0; 40,0; 40,30; 0,30"), 22, "0,0; 0,30; 40,30; 40,0");
  EXPECT_EQ(error_of([&] { parse_design_spec(cw); }).code(), ErrorCode::ParseError);
}

TEST(DesignSpec, PrintParseRoundTrip) {
  for (const char* f : {"cookbook/splint.spec", "cookbook/bra.spec", "cookbook/lampshade.spec"}) {
    DesignSpec s = parse_design_spec(slurp(f));
    std::string printed = print_design_spec(s);
    EXPECT_EQ(parse_design_spec(printed), s) << f;
    EXPECT_EQ(print_design_spec(parse_design_spec(printed)), printed) << f;
  }
  DesignSpec m = parse_design_spec(kMinimalSpec);
  EXPECT_EQ(parse_design_spec(print_design_spec(m)), m);
}

TEST(DesignSpec, RandomRoundTrips) {
  Gen g(8);
  const std::vector<std::string> fabrics{"nonstretch-336", "nonstretch-167", "stretch-390", "stretch-189"};
  for (int i = 0; i < 60; ++i) {
    std::string t = "[design]\nname = d" + std::to_string(i) + "\nfabric = " + g.pick(fabrics) + "\n";
    if (g.coin()) t += "layers = " + std::to_string(g.integer(1, 4)) + "\n";
    if (g.coin()) t += "thread = nylon-tex45\n";
    if (g.coin()) t += std::string("thread_side = ") + (g.coin() ? "front" : "back") + "\n";
    bool circle = g.coin();
    t += "[region]\n";
    if (circle)
      t += "shape = circle\nradius_mm = " + shortest(g.uniform(5, 80)) + "\n";
    else
      t += "shape = rectangle\nwidth_mm = " + shortest(g.uniform(5, 80)) + "\nheight_mm = " + shortest(g.uniform(5, 80)) +
           "\n";
    if (g.coin()) t += "center = " + shortest(g.uniform(-9, 9)) + ", " + shortest(g.uniform(-9, 9)) + "\n";
    t += "[pattern]\n";
    const std::vector<std::string> prims = circle ? std::vector<std::string>{"linear", "radial", "concentric"}
                                                  : std::vector<std::string>{"linear"};
    t += "primitive = " + g.pick(prims) + "\n";
    if (g.coin())
      t += "config = " + format_config_id(kGridLineSpacings[g.integer(0, 2)], kGridStitchSpacings[g.integer(0, 2)]) + "\n";
    else
      t += "line_spacing_mm = " + shortest(g.uniform(0.66, 10)) + "\nstitch_spacing_mm = " + shortest(g.uniform(0.5, 15)) +
           "\n";
    if (g.coin()) t += "angle_deg = " + shortest(g.uniform(-90, 90)) + "\n";
    if (g.coin()) t += "waviness_amp_mm = " + shortest(g.uniform(0, 3)) + "\n";
    if (g.coin()) t += "waviness_period_mm = " + shortest(g.uniform(1, 20)) + "\n";

    DesignSpec s = parse_design_spec(t);
    EXPECT_EQ(parse_design_spec(print_design_spec(s)), s) << t;
  }
}

// --- requirements -----------------------------------------------------------

TEST(RequirementsFile, BraQuery) {
  Requirements r = parse_requirements(slurp("cookbook/bra.req"));
  EXPECT_EQ(r.geometry, GeometryTag::bra_dome);
  EXPECT_EQ(r.fabric_constraint, FabricConstraint::stretch);
  ASSERT_TRUE(r.min_compression);
  EXPECT_EQ(r.min_compression->force_n, 1.8);
  EXPECT_EQ(r.min_compression->displacement_mm, 19.0);
  EXPECT_EQ(r.formability, FormabilityNeed::double_curve);
  EXPECT_EQ(r.max_layers, 4);
  EXPECT_EQ(r.mold_diameter_mm, 30.0);
}

TEST(RequirementsFile, Rejections) {
  EXPECT_EQ(error_of([] {
              parse_requirements("[requirements]\nmin_compression_n = 2\nmin_compression_at_mm = -5\n");
            }).code(),
            ErrorCode::ParseError);
  Error e = error_of([] { parse_requirements("[requirements]\ngeometry = splint\nfabric = any\n"); });
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(e.what()).find("no constraint present"), std::string::npos);
  EXPECT_EQ(error_of([] { parse_requirements("[requirements]\nmin_compression_n = 2\n"); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([] { parse_requirements("[requirements]\nfabric = wool\nformability = single-curve\n"); }).code(),
            ErrorCode::UnknownFabric);
  EXPECT_EQ(error_of([] { parse_requirements("[requirements]\nformability = single-curve\nmold_diameter_mm = 25\n"); })
                .code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([] { parse_requirements("[requirements]\nformability = single-curve\nmax_layers = 9\n"); }).code(),
            ErrorCode::ParseError);
  EXPECT_EQ(error_of([] { parse_requirements("[requirements]\nsafety = 2\n"); }).code(), ErrorCode::UnknownKey);
  EXPECT_EQ(error_of([] { parse_requirements(""); }).code(), ErrorCode::ParseError);
}

TEST(RequirementsFile, RoundTrip) {
  for (const char* f : {"cookbook/splint.req", "cookbook/bra.req", "cookbook/strong.req"}) {
    Requirements r = parse_requirements(slurp(f));
    EXPECT_EQ(parse_requirements(print_requirements(r)), r) << f;
  }
  Requirements named = parse_requirements(
      "[requirements]\nfabric = stretch-189\nmax_tensile_n = 30\nmax_tensile_at_mm = 10\nmax_layers = 2\n");
  EXPECT_EQ(named.fabric_constraint, FabricConstraint::named);
  EXPECT_EQ(named.fabric_name, "stretch-189");
  EXPECT_EQ(parse_requirements(print_requirements(named)), named);
}

// --- svg --------------------------------------------------------------------

TEST(Svg, EmptyPlanIsAnEmptyCanvas) {
  std::string svg = write_svg(StitchPlan{});
  EXPECT_NE(svg.find("<svg "), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("width=\"10.000mm\""), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 0u);
}

TEST(Svg, SwatchHasOnePolylinePerLine) {
  StitchPlan plan = linear_fill(Region::rectangle(100, 100), EmbroideryConfig::grid("L2_S15"));
  std::string svg = write_svg(plan);
  EXPECT_EQ(count(svg, "<polyline"), 50u);
  EXPECT_EQ(count(svg, "<circle"), 400u);
  // lines sit at +-49, stitches span +-50, plus the margin
  EXPECT_NE(svg.find("viewBox=\"-55.000 -54.000 110.000 108.000\""), std::string::npos);
  EXPECT_NE(svg.find("width=\"110.000mm\" height=\"108.000mm\""), std::string::npos);
}

TEST(Svg, JumpsAreDashedAndDotsAreCapped) {
  EmbroideryConfig cfg = EmbroideryConfig::grid("L2_S5", Primitive::concentric);
  cfg.line_spacing = 5.0;
  StitchPlan rings = concentric_fill(Region::circle({}, 50), cfg);
  std::string svg = write_svg(rings);
  auto jumps = svg.substr(svg.find("<g id=\"jumps\""));
  jumps = jumps.substr(0, jumps.find("</g>"));
  EXPECT_NE(jumps.find("stroke-dasharray"), std::string::npos);
  EXPECT_EQ(count(jumps, "<line"), 9u);  // the opening jump has no origin segment
  EXPECT_EQ(count(svg, "<polyline"), 10u);

  StitchPlan dense = linear_fill(Region::rectangle(100, 100), EmbroideryConfig::grid("L1_S1"));
  EXPECT_EQ(count(write_svg(dense), "<circle"), 0u);
}

TEST(Svg, YAxisFlipped) {
  StitchPlan plan;
  plan.points = {{{0, 0}, StitchKind::jump, 0}, {{0, 0}, StitchKind::stitch, 0}, {{10, 20}, StitchKind::stitch, 0}};
  std::string svg = write_svg(plan);
  EXPECT_NE(svg.find("points=\"0.000,0.000 10.000,-20.000\""), std::string::npos);
  EXPECT_NE(svg.find("viewBox=\"-5.000 -25.000 20.000 30.000\""), std::string::npos);
}

// --- instructions ------------------------------------------------------------

TEST(Instructions, SplintSheet) {
  std::string sheet = render_instructions(parse_design_spec(slurp("cookbook/splint.spec")));
  EXPECT_NE(sheet.find("embroider 4 copies and stack"), std::string::npos);
  EXPECT_NE(sheet.find("heat to 70 °C for 10 s; cool 20 s to 22 °C"), std::string::npos);
  EXPECT_NE(sheet.find("47–57 °C"), std::string::npos);
  EXPECT_NE(sheet.find("back side"), std::string::npos);
  EXPECT_NE(sheet.find("finger-splint"), std::string::npos);
  EXPECT_NE(sheet.find("nonstretch-336"), std::string::npos);
}

TEST(Instructions, EverySpecGetsProtocolAndTg) {
  for (const char* f : {"cookbook/bra.spec", "cookbook/lampshade.spec"}) {
    std::string sheet = render_instructions(parse_design_spec(slurp(f)));
    EXPECT_NE(sheet.find("heat to 70 °C for 10 s; cool 20 s to 22 °C"), std::string::npos) << f;
    EXPECT_NE(sheet.find("Tg 47–57 °C"), std::string::npos) << f;
    EXPECT_EQ(sheet.find("copies and stack"), std::string::npos) << f;
  }
}

TEST(Instructions, ProtocolMatchesThreadData) {
  EXPECT_EQ(kMoldingProtocol.heat_temperature_c, 70.0);
  EXPECT_EQ(kMoldingProtocol.heat_seconds, 10.0);
  EXPECT_EQ(kMoldingProtocol.cool_seconds, 20.0);
  EXPECT_EQ(kMoldingProtocol.cool_temperature_c, 22.0);
  // heating must clear the glass transition of the default thread
  EXPECT_GT(kMoldingProtocol.heat_temperature_c, default_thread().tg_high);
}

TEST(Instructions, FrontSideAndDiagnostics) {
  std::string t = kMinimalSpec;
  t.replace(t.find("fabric = stretch-390"), 20, "fabric = stretch-390\nthread_side = front\nthread = nylon-tex80");
  std::string sheet = render_instructions(parse_design_spec(t));
  EXPECT_NE(sheet.find("front side"), std::string::npos);
  EXPECT_NE(sheet.find("machine jam risk"), std::string::npos);
}
