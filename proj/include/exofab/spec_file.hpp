#pragma once

// Line-oriented design and requirements files:
//
//   # comment
//   [section]
//   key = value
//
// Keys are case-sensitive; unknown sections or keys are errors.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "exofab/calibration.hpp"
#include "exofab/error.hpp"
#include "exofab/geometry.hpp"
#include "exofab/materials.hpp"
#include "exofab/numeric.hpp"
#include "exofab/solver.hpp"

namespace exofab {

namespace detail {

struct Entry {
  std::string value;
  long line = 0;
};

struct Section {
  long line = 0;
  std::map<std::string, Entry> entries;
};

struct IniDocument {
  std::map<std::string, Section> sections;
};

inline IniDocument parse_ini(std::string_view text, const std::map<std::string, std::set<std::string>>& schema) {
  IniDocument doc;
  Section* current = nullptr;
  std::string current_name;
  long line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw Error(ErrorCode::ParseError, fmt::format("line {}: malformed section header", line_no), line_no);
      current_name = std::string(trim(line.substr(1, line.size() - 2)));
      if (!schema.count(current_name))
        throw Error(ErrorCode::ParseError, fmt::format("line {}: unknown section [{}]", line_no, current_name),
                    line_no);
      if (doc.sections.count(current_name))
        throw Error(ErrorCode::ParseError, fmt::format("line {}: duplicate section [{}]", line_no, current_name),
                    line_no);
      current = &doc.sections[current_name];
      current->line = line_no;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: expected 'key = value'", line_no), line_no);
    if (!current)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: entry outside of any section", line_no), line_no);
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorCode::ParseError, fmt::format("line {}: empty key", line_no), line_no);
    if (!schema.at(current_name).count(key))
      throw Error(ErrorCode::UnknownKey, fmt::format("line {}: unknown key '{}' in [{}]", line_no, key, current_name),
                  line_no);
    if (current->entries.count(key))
      throw Error(ErrorCode::ParseError, fmt::format("line {}: duplicate key '{}'", line_no, key), line_no);
    current->entries[key] = {value, line_no};
  }
  return doc;
}

class SectionReader {
 public:
  SectionReader(const IniDocument& doc, std::string name, std::set<std::string>& defaulted)
      : name_(std::move(name)), defaulted_(defaulted) {
    auto it = doc.sections.find(name_);
    if (it == doc.sections.end())
      throw Error(ErrorCode::ParseError, fmt::format("missing [{}] section", name_), 0);
    section_ = &it->second;
  }

  bool has(const std::string& key) const { return section_->entries.count(key) > 0; }
  long line_of(const std::string& key) const { return has(key) ? section_->entries.at(key).line : section_->line; }

  const std::string& text(const std::string& key) const {
    auto it = section_->entries.find(key);
    if (it == section_->entries.end())
      throw Error(ErrorCode::ParseError,
                  fmt::format("line {}: [{}] is missing required key '{}'", section_->line, name_, key),
                  section_->line);
    return it->second.value;
  }

  std::string text_or(const std::string& key, std::string fallback) const {
    if (has(key)) return text(key);
    defaulted_.insert(name_ + "." + key);
    return fallback;
  }

  double number(const std::string& key) const {
    auto v = parse_double(text(key));
    if (!v)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: '{}' is not a number", line_of(key), key), line_of(key));
    return *v;
  }

  double number_or(const std::string& key, double fallback) const {
    if (has(key)) return number(key);
    defaulted_.insert(name_ + "." + key);
    return fallback;
  }

  long integer_or(const std::string& key, long fallback) const {
    if (!has(key)) {
      defaulted_.insert(name_ + "." + key);
      return fallback;
    }
    auto v = parse_long(text(key));
    if (!v)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: '{}' is not an integer", line_of(key), key),
                  line_of(key));
    return *v;
  }

  Point2 point(const std::string& key) const { return parse_point(text(key), line_of(key)); }

  Point2 point_or(const std::string& key, Point2 fallback) const {
    if (has(key)) return point(key);
    defaulted_.insert(name_ + "." + key);
    return fallback;
  }

  static Point2 parse_point(std::string_view s, long line) {
    auto comma = s.find(',');
    if (comma == std::string_view::npos)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: expected 'x, y'", line), line);
    auto x = parse_double(trim(s.substr(0, comma)));
    auto y = parse_double(trim(s.substr(comma + 1)));
    if (!x || !y) throw Error(ErrorCode::ParseError, fmt::format("line {}: bad point '{}'", line, s), line);
    return {*x, *y};
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", line_of(key), message), line_of(key));
  }

 private:
  std::string name_;
  const Section* section_ = nullptr;
  std::set<std::string>& defaulted_;
};

inline std::string format_point(Point2 p) { return shortest(p.x) + ", " + shortest(p.y); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Design spec

struct DesignSpec {
  std::string name;
  std::string fabric;
  int layers = 1;
  std::string thread = std::string(kDefaultThread);
  ThreadSide thread_side = ThreadSide::back;
  Region region = Region::rectangle(100.0, 100.0);
  EmbroideryConfig pattern;
  // Set when the pattern names a grid config ("L0.66_S1") instead of spacings.
  std::optional<std::string> config_id;
  // "section.key" for every key filled in by a default.
  std::set<std::string> defaulted;

  ThreadSpec thread_spec() const {
    ThreadSpec t = exofab::thread(thread);
    t.side = thread_side;
    return t;
  }

  friend bool operator==(const DesignSpec&, const DesignSpec&) = default;
};

inline const std::map<std::string, std::set<std::string>>& design_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"design", {"name", "fabric", "layers", "thread", "thread_side"}},
      {"region", {"shape", "width_mm", "height_mm", "radius_mm", "center", "vertices"}},
      {"pattern",
       {"primitive", "config", "line_spacing_mm", "stitch_spacing_mm", "angle_deg", "waviness_amp_mm",
        "waviness_period_mm"}},
  };
  return schema;
}

inline DesignSpec parse_design_spec(std::string_view text) {
  detail::IniDocument doc = detail::parse_ini(text, design_schema());
  DesignSpec spec;
  for (const char* section : {"design", "region", "pattern"})
    if (!doc.sections.count(section))
      throw Error(ErrorCode::ParseError, fmt::format("missing [{}] section", section), 0);

  detail::SectionReader design(doc, "design", spec.defaulted);
  spec.name = design.text("name");
  if (spec.name.empty()) design.fail("name", "design name is empty");
  spec.fabric = design.text("fabric");
  if (!find_fabric(spec.fabric))
    throw Error(ErrorCode::UnknownFabric,
                fmt::format("line {}: unknown fabric '{}'", design.line_of("fabric"), spec.fabric),
                design.line_of("fabric"));
  long layers = design.integer_or("layers", 1);
  if (layers < 1 || layers > kMaxLayers) design.fail("layers", fmt::format("layers must be in [1, {}]", kMaxLayers));
  spec.layers = static_cast<int>(layers);
  spec.thread = design.text_or("thread", std::string(kDefaultThread));
  try {
    exofab::thread(spec.thread);
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("line {}: {}", design.line_of("thread"), e.what()), design.line_of("thread"));
  }
  std::string side = design.text_or("thread_side", "back");
  if (side == "back")
    spec.thread_side = ThreadSide::back;
  else if (side == "front")
    spec.thread_side = ThreadSide::front;
  else
    design.fail("thread_side", "thread_side must be 'front' or 'back'");

  detail::SectionReader region(doc, "region", spec.defaulted);
  const std::string shape = region.text("shape");
  auto reject = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (region.has(k)) region.fail(k, fmt::format("'{}' does not apply to a {}", k, shape));
  };
  try {
    if (shape == "rectangle") {
      reject({"radius_mm", "vertices"});
      Point2 c = region.point_or("center", {});
      spec.region = Region::rectangle(region.number("width_mm"), region.number("height_mm"), c);
    } else if (shape == "circle") {
      reject({"width_mm", "height_mm", "vertices"});
      Point2 c = region.point_or("center", {});
      spec.region = Region::circle(c, region.number("radius_mm"));
    } else if (shape == "polygon") {
      reject({"width_mm", "height_mm", "radius_mm", "center"});
      std::vector<Point2> vertices;
      std::string_view rest = region.text("vertices");
      while (!rest.empty()) {
        auto semi = rest.find(';');
        std::string_view item = trim(rest.substr(0, semi));
        if (!item.empty()) vertices.push_back(detail::SectionReader::parse_point(item, region.line_of("vertices")));
        if (semi == std::string_view::npos) break;
        rest = rest.substr(semi + 1);
      }
      spec.region = Region::polygon(std::move(vertices));
    } else {
      region.fail("shape", fmt::format("unknown shape '{}'", shape));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidRegion) throw;
    throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", region.line_of("shape"), e.what()),
                region.line_of("shape"));
  }

  detail::SectionReader pattern(doc, "pattern", spec.defaulted);
  auto primitive = parse_primitive(pattern.text("primitive"));
  if (!primitive) pattern.fail("primitive", "primitive must be linear, radial or concentric");
  spec.pattern.primitive = *primitive;
  if (pattern.has("config")) {
    if (pattern.has("line_spacing_mm") || pattern.has("stitch_spacing_mm"))
      pattern.fail("config", "give either 'config' or the spacing keys, not both");
    try {
      Spacing sp = parse_config_id(pattern.text("config"));
      spec.config_id = format_config_id(sp.line, sp.stitch);
      spec.pattern.line_spacing = sp.line;
      spec.pattern.stitch_spacing = sp.stitch;
    } catch (const Error&) {
      pattern.fail("config", fmt::format("malformed config id '{}'", pattern.text("config")));
    }
  } else {
    spec.pattern.line_spacing = pattern.number("line_spacing_mm");
    spec.pattern.stitch_spacing = pattern.number("stitch_spacing_mm");
  }
  spec.pattern.angle_deg = pattern.number_or("angle_deg", 0.0);
  spec.pattern.waviness_amplitude = pattern.number_or("waviness_amp_mm", kDefaultWavinessAmplitude);
  spec.pattern.waviness_period = pattern.number_or("waviness_period_mm", kDefaultWavinessPeriod);
  try {
    spec.pattern.check();
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", pattern.line_of("primitive"), e.what()),
                pattern.line_of("primitive"));
  }
  return spec;
}

// Inverse of parse_design_spec; keys that were defaulted are left out.
inline std::string print_design_spec(const DesignSpec& spec) {
  auto keep = [&](const char* key) { return !spec.defaulted.count(key); };
  std::string out = "[design]\n";
  out += fmt::format("name = {}\n", spec.name);
  out += fmt::format("fabric = {}\n", spec.fabric);
  if (keep("design.layers")) out += fmt::format("layers = {}\n", spec.layers);
  if (keep("design.thread")) out += fmt::format("thread = {}\n", spec.thread);
  if (keep("design.thread_side")) out += fmt::format("thread_side = {}\n", to_string(spec.thread_side));

  out += "\n[region]\n";
  const Region& r = spec.region;
  out += fmt::format("shape = {}\n", to_string(r.kind()));
  if (r.kind() == RegionKind::rectangle) {
    out += fmt::format("width_mm = {}\nheight_mm = {}\n", shortest(r.width()), shortest(r.height()));
    if (keep("region.center")) out += fmt::format("center = {}\n", detail::format_point(r.center()));
  } else if (r.kind() == RegionKind::circle) {
    out += fmt::format("radius_mm = {}\n", shortest(r.radius()));
    if (keep("region.center")) out += fmt::format("center = {}\n", detail::format_point(r.center()));
  } else {
    std::string v;
    for (const auto& p : r.vertices()) v += (v.empty() ? "" : "; ") + detail::format_point(p);
    out += fmt::format("vertices = {}\n", v);
  }

  out += "\n[pattern]\n";
  const EmbroideryConfig& p = spec.pattern;
  out += fmt::format("primitive = {}\n", to_string(p.primitive));
  if (spec.config_id) {
    out += fmt::format("config = {}\n", *spec.config_id);
  } else {
    out += fmt::format("line_spacing_mm = {}\nstitch_spacing_mm = {}\n", shortest(p.line_spacing),
                       shortest(p.stitch_spacing));
  }
  if (keep("pattern.angle_deg")) out += fmt::format("angle_deg = {}\n", shortest(p.angle_deg));
  if (keep("pattern.waviness_amp_mm")) out += fmt::format("waviness_amp_mm = {}\n", shortest(p.waviness_amplitude));
  if (keep("pattern.waviness_period_mm"))
    out += fmt::format("waviness_period_mm = {}\n", shortest(p.waviness_period));
  return out;
}

// ---------------------------------------------------------------------------
// Requirements

inline const std::map<std::string, std::set<std::string>>& requirements_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"requirements",
       {"geometry", "fabric", "min_compression_n", "min_compression_at_mm", "max_tensile_n", "max_tensile_at_mm",
        "formability", "mold_diameter_mm", "max_layers"}},
  };
  return schema;
}

inline Requirements parse_requirements(std::string_view text) {
  detail::IniDocument doc = detail::parse_ini(text, requirements_schema());
  std::set<std::string> defaulted;
  detail::SectionReader sec(doc, "requirements", defaulted);
  Requirements req;

  std::string geometry = sec.text_or("geometry", "swatch-100");
  auto tag = parse_geometry_tag(geometry);
  if (!tag) sec.fail("geometry", fmt::format("unknown geometry '{}'", geometry));
  req.geometry = *tag;

  std::string fab = sec.text_or("fabric", "any");
  if (fab == "any") {
    req.fabric_constraint = FabricConstraint::any;
  } else if (fab == "non-stretch") {
    req.fabric_constraint = FabricConstraint::non_stretch;
  } else if (fab == "stretch") {
    req.fabric_constraint = FabricConstraint::stretch;
  } else if (find_fabric(fab)) {
    req.fabric_constraint = FabricConstraint::named;
    req.fabric_name = fab;
  } else {
    throw Error(ErrorCode::UnknownFabric, fmt::format("line {}: unknown fabric '{}'", sec.line_of("fabric"), fab),
                sec.line_of("fabric"));
  }

  auto force_pair = [&](const std::string& force_key, const std::string& at_key) -> std::optional<ForceRequirement> {
    bool f = sec.has(force_key), d = sec.has(at_key);
    if (!f && !d) return std::nullopt;
    if (f != d) sec.fail(f ? force_key : at_key, fmt::format("'{}' and '{}' must be given together", force_key, at_key));
    ForceRequirement r{sec.number(force_key), sec.number(at_key)};
    if (r.force_n < 0) sec.fail(force_key, "force must be non-negative");
    if (r.displacement_mm < 0) sec.fail(at_key, "displacement must be non-negative");
    return r;
  };
  req.min_compression = force_pair("min_compression_n", "min_compression_at_mm");
  req.max_tensile = force_pair("max_tensile_n", "max_tensile_at_mm");

  std::string form = sec.text_or("formability", "none");
  if (form == "none")
    req.formability = FormabilityNeed::none;
  else if (form == "single-curve")
    req.formability = FormabilityNeed::single_curve;
  else if (form == "double-curve")
    req.formability = FormabilityNeed::double_curve;
  else
    sec.fail("formability", "formability must be none, single-curve or double-curve");
  req.mold_diameter_mm = sec.number_or("mold_diameter_mm", 30.0);
  if (std::find(kTestedMoldDiameters.begin(), kTestedMoldDiameters.end(), req.mold_diameter_mm) ==
      kTestedMoldDiameters.end())
    sec.fail("mold_diameter_mm", "mold diameter must be 10, 20 or 30 mm");
  long max_layers = sec.integer_or("max_layers", kMaxLayers);
  if (max_layers < 1 || max_layers > kMaxLayers)
    sec.fail("max_layers", fmt::format("max_layers must be in [1, {}]", kMaxLayers));
  req.max_layers = static_cast<int>(max_layers);

  if (!req.has_constraint())
    throw Error(ErrorCode::ParseError, "no constraint present", doc.sections.at("requirements").line);
  return req;
}

inline std::string print_requirements(const Requirements& req) {
  std::string out = "[requirements]\n";
  out += fmt::format("geometry = {}\n", to_string(req.geometry));
  switch (req.fabric_constraint) {
    case FabricConstraint::any: out += "fabric = any\n"; break;
    case FabricConstraint::non_stretch: out += "fabric = non-stretch\n"; break;
    case FabricConstraint::stretch: out += "fabric = stretch\n"; break;
    case FabricConstraint::named: out += fmt::format("fabric = {}\n", req.fabric_name); break;
  }
  if (req.min_compression)
    out += fmt::format("min_compression_n = {}\nmin_compression_at_mm = {}\n", shortest(req.min_compression->force_n),
                       shortest(req.min_compression->displacement_mm));
  if (req.max_tensile)
    out += fmt::format("max_tensile_n = {}\nmax_tensile_at_mm = {}\n", shortest(req.max_tensile->force_n),
                       shortest(req.max_tensile->displacement_mm));
  out += fmt::format("formability = {}\n", to_string(req.formability));
  out += fmt::format("mold_diameter_mm = {}\n", shortest(req.mold_diameter_mm));
  out += fmt::format("max_layers = {}\n", req.max_layers);
  return out;
}

}  // namespace exofab
