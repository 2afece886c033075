#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "exofab/error.hpp"
#include "exofab/fill.hpp"
#include "exofab/geometry.hpp"
#include "exofab/materials.hpp"
#include "exofab/numeric.hpp"

namespace exofab {

// Calibration data is only valid for the specimen geometry it was measured on.
enum class GeometryTag { swatch100, splint, bra_dome };

constexpr std::string_view to_string(GeometryTag g) {
  switch (g) {
    case GeometryTag::swatch100: return "swatch-100";
    case GeometryTag::splint: return "splint";
    case GeometryTag::bra_dome: return "bra-dome";
  }
  return "?";
}

inline std::optional<GeometryTag> parse_geometry_tag(std::string_view s) {
  if (s == "swatch-100") return GeometryTag::swatch100;
  if (s == "splint") return GeometryTag::splint;
  if (s == "bra-dome") return GeometryTag::bra_dome;
  return std::nullopt;
}

enum class LoadMode { compression, tensile };

constexpr std::string_view to_string(LoadMode m) { return m == LoadMode::tensile ? "tensile" : "compression"; }

inline std::optional<LoadMode> parse_load_mode(std::string_view s) {
  if (s == "compression") return LoadMode::compression;
  if (s == "tensile") return LoadMode::tensile;
  return std::nullopt;
}

enum class Provenance { paper, derived, external };

constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::paper: return "paper";
    case Provenance::derived: return "derived";
    case Provenance::external: return "external";
  }
  return "?";
}

inline std::optional<Provenance> parse_provenance(std::string_view s) {
  if (s == "paper") return Provenance::paper;
  if (s == "derived") return Provenance::derived;
  if (s == "external") return Provenance::external;
  return std::nullopt;
}

struct Knot {
  double displacement_mm = 0.0;
  double force_n = 0.0;
  Provenance provenance = Provenance::paper;
  // Measured value is an upper bound ("remained below"), not a mean.
  bool upper_bound = false;

  friend bool operator==(const Knot&, const Knot&) = default;
};

struct SeriesKey {
  GeometryTag geometry = GeometryTag::swatch100;
  std::string config;  // canonical config id
  std::string fabric;
  int layers = 1;
  LoadMode mode = LoadMode::compression;

  friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

inline std::string to_string(const SeriesKey& k) {
  return fmt::format("{}/{}/{}/{} layer(s)/{}", to_string(k.geometry), k.config, k.fabric, k.layers,
                     to_string(k.mode));
}

inline constexpr std::string_view kCalibrationHeader =
    "geometry,config,fabric,layers,mode,displacement_mm,force_n,provenance";

inline constexpr std::string_view kBundledTableVersion = "exofab-cal-1";

// Only numerically quoted measurements; the (0 mm, 0 N) anchor is implicit.
inline constexpr std::string_view kBundledCalibrationCsv =
    R"(geometry,config,fabric,layers,mode,displacement_mm,force_n,provenance,qualifier
swatch-100,L2_S5,nonstretch-336,1,compression,10,2.4,paper,exact
swatch-100,L1_S5,nonstretch-336,1,compression,10,4.2,paper,exact
swatch-100,L0.66_S5,nonstretch-336,1,compression,10,5.9,paper,exact
swatch-100,L0.66_S1,nonstretch-336,1,compression,20,13.3,paper,exact
swatch-100,L0.66_S1,stretch-390,1,compression,20,17.2,paper,exact
swatch-100,L0.66_S1,nonstretch-336,4,compression,20,86.0,paper,exact
swatch-100,L0.66_S1,stretch-390,4,compression,20,96.6,paper,exact
swatch-100,L0.66_S1,stretch-390,1,tensile,20,62.3,paper,exact
swatch-100,L1_S1,stretch-390,1,tensile,20,41.0,paper,exact
swatch-100,L2_S15,stretch-390,1,tensile,20,7.0,paper,upper
splint,L0.66_S1,nonstretch-336,2,compression,5,2.6,paper,exact
splint,L0.66_S1,nonstretch-336,3,compression,5,6.3,paper,exact
splint,L0.66_S1,nonstretch-336,4,compression,5,7.8,paper,exact
bra-dome,L1_S15,stretch-390,1,compression,10,0.6,paper,exact
bra-dome,L1_S15,stretch-390,1,compression,15,0.9,paper,exact
bra-dome,L1_S15,stretch-390,1,compression,19,1.8,paper,exact
)";

class CalibrationTable {
 public:
  using Series = std::vector<Knot>;

  // Comma-separated rows with a required header. Blank lines and lines
  // starting with '#' are skipped. An optional ninth column `qualifier` takes
  // `exact` (default) or `upper`.
  static CalibrationTable parse(std::string_view text) {
    CalibrationTable table;
    std::map<SeriesKey, std::vector<std::pair<Knot, long>>> rows;
    bool header_seen = false;
    bool has_qualifier = false;
    long line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = trim(text.substr(pos, end - pos));
      pos = end + 1;
      ++line_no;
      if (line.empty() || line.front() == '#') {
        if (end == text.size()) break;
        continue;
      }
      std::vector<std::string_view> cols = split(line);
      if (!header_seen) {
        std::string joined;
        for (std::size_t i = 0; i < cols.size(); ++i) joined += (i ? "," : "") + std::string(trim(cols[i]));
        if (joined == kCalibrationHeader) {
          has_qualifier = false;
        } else if (joined == std::string(kCalibrationHeader) + ",qualifier") {
          has_qualifier = true;
        } else {
          throw Error(ErrorCode::ParseError,
                      fmt::format("line {}: expected header '{}[,qualifier]'", line_no, kCalibrationHeader), line_no);
        }
        header_seen = true;
        if (end == text.size()) break;
        continue;
      }
      const std::size_t expected = has_qualifier ? 9 : 8;
      if (cols.size() != expected)
        throw Error(ErrorCode::ParseError,
                    fmt::format("line {}: expected {} columns, got {}", line_no, expected, cols.size()), line_no);
      auto bad = [&](int column, std::string_view what) {
        return Error(ErrorCode::ParseError,
                     fmt::format("line {}, column {}: bad {} '{}'", line_no, column, what, trim(cols[column - 1])),
                     line_no);
      };
      SeriesKey key;
      Knot knot;
      auto geometry = parse_geometry_tag(trim(cols[0]));
      if (!geometry) throw bad(1, "geometry tag");
      key.geometry = *geometry;
      try {
        key.config = canonical_config_id(trim(cols[1]));
      } catch (const Error&) {
        throw bad(2, "config id");
      }
      key.fabric = std::string(trim(cols[2]));
      if (!find_fabric(key.fabric)) throw bad(3, "fabric");
      auto layers = parse_long(trim(cols[3]));
      if (!layers || *layers < 1 || *layers > 16) throw bad(4, "layer count");
      key.layers = static_cast<int>(*layers);
      auto mode = parse_load_mode(trim(cols[4]));
      if (!mode) throw bad(5, "mode");
      key.mode = *mode;
      auto d = parse_double(trim(cols[5]));
      if (!d || *d < 0.0) throw bad(6, "displacement");
      auto f = parse_double(trim(cols[6]));
      if (!f || *f < 0.0) throw bad(7, "force");
      auto prov = parse_provenance(trim(cols[7]));
      if (!prov) throw bad(8, "provenance");
      knot = {*d, *f, *prov, false};
      if (has_qualifier) {
        std::string_view q = trim(cols[8]);
        if (q == "upper")
          knot.upper_bound = true;
        else if (q != "exact" && !q.empty())
          throw bad(9, "qualifier");
      }
      rows[key].emplace_back(knot, line_no);
      if (end == text.size()) break;
    }
    if (!header_seen) throw Error(ErrorCode::ParseError, "calibration table has no header row", 1);

    for (auto& [key, knots] : rows) {
      std::stable_sort(knots.begin(), knots.end(),
                       [](const auto& a, const auto& b) { return a.first.displacement_mm < b.first.displacement_mm; });
      Series series;
      for (const auto& [knot, row] : knots) {
        if (!series.empty()) {
          const Knot& prev = series.back();
          if (knot.displacement_mm == prev.displacement_mm)
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("line {}: duplicate displacement {} mm in {}", row, knot.displacement_mm,
                                    to_string(key)),
                        row);
          if (knot.force_n < prev.force_n)
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("line {}: force {} N decreases below {} N in {}", row, knot.force_n, prev.force_n,
                                    to_string(key)),
                        row);
        }
        series.push_back(knot);
      }
      table.insert(key, std::move(series));
    }
    return table;
  }

  static const CalibrationTable& bundled() {
    static const CalibrationTable table = parse(kBundledCalibrationCsv);
    return table;
  }

  const Series* find(const SeriesKey& key) const {
    auto it = series_.find(key);
    return it == series_.end() ? nullptr : &it->second;
  }

  const std::map<SeriesKey, Series>& series() const { return series_; }

  std::size_t knot_count(std::optional<Provenance> provenance = std::nullopt) const {
    std::size_t n = 0;
    for (const auto& [key, s] : series_)
      for (const auto& k : s)
        if (!provenance || k.provenance == *provenance) ++n;
    return n;
  }

  // Adds `user` knots (re-tagged external) to a copy of this table. A user
  // knot at an existing displacement must carry the same force.
  CalibrationTable merged(const CalibrationTable& user) const {
    CalibrationTable out = *this;
    for (const auto& [key, user_series] : user.series_) {
      Series merged = out.series_.count(key) ? out.series_.at(key) : Series{};
      for (Knot k : user_series) {
        auto it = std::find_if(merged.begin(), merged.end(),
                               [&](const Knot& m) { return m.displacement_mm == k.displacement_mm; });
        if (it != merged.end()) {
          if (it->force_n != k.force_n)
            throw Error(ErrorCode::InvariantViolation,
                        fmt::format("conflicting knot at {} mm in {}: {} N vs {} N", k.displacement_mm,
                                    to_string(key), it->force_n, k.force_n));
          continue;
        }
        k.provenance = Provenance::external;
        merged.push_back(k);
      }
      std::sort(merged.begin(), merged.end(),
                [](const Knot& a, const Knot& b) { return a.displacement_mm < b.displacement_mm; });
      for (std::size_t i = 1; i < merged.size(); ++i)
        if (merged[i].force_n < merged[i - 1].force_n)
          throw Error(ErrorCode::InvariantViolation,
                      fmt::format("merged series {} is not monotone at {} mm", to_string(key),
                                  merged[i].displacement_mm));
      out.series_[key] = std::move(merged);
    }
    return out;
  }

  std::string to_csv() const {
    std::string out = std::string(kCalibrationHeader) + ",qualifier\n";
    for (const auto& [key, s] : series_)
      for (const auto& k : s)
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", to_string(key.geometry), key.config, key.fabric, key.layers,
                           to_string(key.mode), shortest(k.displacement_mm), shortest(k.force_n),
                           to_string(k.provenance), k.upper_bound ? "upper" : "exact");
    return out;
  }

 private:
  static std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string_view::npos) {
        out.push_back(line.substr(start));
        break;
      }
      out.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    return out;
  }

  void insert(const SeriesKey& key, Series series) {
    if (series.front().displacement_mm != 0.0) {
      series.insert(series.begin(), Knot{0.0, 0.0, Provenance::derived, false});
    } else if (series.front().force_n != 0.0) {
      throw Error(ErrorCode::InvariantViolation,
                  fmt::format("{} has non-zero force at 0 mm", to_string(key)));
    }
    series_[key] = std::move(series);
  }

  std::map<SeriesKey, Series> series_;
};

inline CalibrationTable load_calibration(std::string_view text) { return CalibrationTable::parse(text); }

// ---------------------------------------------------------------------------
// Force prediction

inline constexpr int kMaxLayers = 4;

struct PropertyQuery {
  std::string config;  // e.g. "L0.66_S1"
  std::string fabric;  // registry name
  int layers = 1;
  double displacement_mm = 0.0;
  LoadMode mode = LoadMode::compression;
  GeometryTag geometry = GeometryTag::swatch100;
};

struct PredictOptions {
  // Past the last knot, hold the last force instead of failing.
  bool extrapolate = false;
  // Multi-layer tensile from the single-layer series (1x at 1 layer, 3x at 4).
  bool tensile_layer_scaling = false;
};

struct Prediction {
  double force_n = 0.0;
  bool upper_bound = false;
  bool layer_interpolated = false;
  bool layer_scaled = false;
  bool extrapolated = false;
};

namespace detail {

inline Prediction interpolate(const CalibrationTable::Series& s, double d, const PredictOptions& opt,
                              const SeriesKey& key) {
  Prediction p;
  const Knot& last = s.back();
  if (d > last.displacement_mm) {
    if (!opt.extrapolate)
      throw Error(ErrorCode::InsufficientCalibration,
                  fmt::format("{} mm exceeds the last knot ({} mm) of {}", d, last.displacement_mm, to_string(key)));
    p.force_n = last.force_n;
    p.upper_bound = last.upper_bound;
    p.extrapolated = true;
    return p;
  }
  auto it = std::upper_bound(s.begin(), s.end(), d,
                             [](double v, const Knot& k) { return v < k.displacement_mm; });
  const Knot& lo = *std::prev(it);
  if (lo.displacement_mm == d) {
    p.force_n = lo.force_n;
    p.upper_bound = lo.upper_bound;
    return p;
  }
  const Knot& hi = *it;
  double w = (d - lo.displacement_mm) / (hi.displacement_mm - lo.displacement_mm);
  p.force_n = lo.force_n + w * (hi.force_n - lo.force_n);
  p.upper_bound = hi.upper_bound || (lo.upper_bound && w < 1.0);
  return p;
}

}  // namespace detail

// Force at the queried displacement, piecewise linear through the knots.
inline Prediction predict(const PropertyQuery& q, const CalibrationTable& table, const PredictOptions& opt = {}) {
  if (!(q.displacement_mm >= 0.0) || !std::isfinite(q.displacement_mm))
    throw Error(ErrorCode::InvalidQuery, "displacement must be a non-negative number");
  if (q.layers < 1 || q.layers > kMaxLayers)
    throw Error(ErrorCode::InvalidQuery, fmt::format("layers must be in [1, {}]", kMaxLayers));
  const FabricSpec& fab = fabric(q.fabric);
  if (q.mode == LoadMode::tensile && fab.stretch != StretchClass::stretch)
    throw Error(ErrorCode::NonStretchFabric, fmt::format("no tensile data for non-stretch fabric '{}'", q.fabric));

  SeriesKey key{q.geometry, canonical_config_id(q.config), q.fabric, q.layers, q.mode};
  if (const auto* s = table.find(key)) {
    if (q.displacement_mm == 0.0) return {};
    return detail::interpolate(*s, q.displacement_mm, opt, key);
  }

  auto with_layers = [&](int layers) {
    SeriesKey k = key;
    k.layers = layers;
    return k;
  };
  const SeriesKey one = with_layers(1), four = with_layers(4);

  if (q.geometry == GeometryTag::swatch100 && q.mode == LoadMode::compression && q.layers > 1 && q.layers < 4) {
    const auto* s1 = table.find(one);
    const auto* s4 = table.find(four);
    if (s1 && s4) {
      Prediction p1 = detail::interpolate(*s1, q.displacement_mm, opt, one);
      Prediction p4 = detail::interpolate(*s4, q.displacement_mm, opt, four);
      double w = static_cast<double>(q.layers - 1) / 3.0;
      Prediction p;
      p.force_n = p1.force_n + w * (p4.force_n - p1.force_n);
      p.upper_bound = p1.upper_bound || p4.upper_bound;
      p.extrapolated = p1.extrapolated || p4.extrapolated;
      p.layer_interpolated = true;
      return p;
    }
  }

  if (q.mode == LoadMode::tensile && opt.tensile_layer_scaling && q.layers > 1) {
    if (const auto* s1 = table.find(one)) {
      Prediction p = detail::interpolate(*s1, q.displacement_mm, opt, one);
      p.force_n *= 1.0 + 2.0 * static_cast<double>(q.layers - 1) / 3.0;
      p.layer_scaled = true;
      return p;
    }
  }

  throw Error(ErrorCode::UnknownConfig, fmt::format("no calibration for {}", to_string(key)));
}

inline Prediction predict_compression(PropertyQuery q, const CalibrationTable& table, const PredictOptions& opt = {}) {
  q.mode = LoadMode::compression;
  return predict(q, table, opt);
}

inline Prediction predict_tensile(PropertyQuery q, const CalibrationTable& table, const PredictOptions& opt = {}) {
  q.mode = LoadMode::tensile;
  return predict(q, table, opt);
}

// ---------------------------------------------------------------------------
// Formability

enum class FormClass { good, poor };

constexpr std::string_view to_string(FormClass f) { return f == FormClass::good ? "good" : "poor"; }

struct Formability {
  FormClass form = FormClass::poor;
  std::vector<std::string> warnings;
};

inline constexpr std::array<double, 3> kTestedMoldDiameters{10.0, 20.0, 30.0};

// Non-stretch fabric forms well with dense stitches (S <= 5 mm); stretch
// fabric forms well with dense lines (L <= 1 mm).
inline Formability classify_formability(const Spacing& spacing, const FabricSpec& fab, double mold_diameter_mm,
                                        int layers) {
  if (std::find(kTestedMoldDiameters.begin(), kTestedMoldDiameters.end(), mold_diameter_mm) ==
      kTestedMoldDiameters.end())
    throw Error(ErrorCode::UnsupportedMold,
                fmt::format("no formability data for a {} mm mold (tested: 10, 20, 30 mm)", mold_diameter_mm));
  Formability out;
  bool good = fab.stretch == StretchClass::non_stretch ? spacing.stitch <= 5.0 : spacing.line <= 1.0;
  out.form = good ? FormClass::good : FormClass::poor;
  if (layers >= 2) out.warnings.emplace_back("reduced mold conformance with multiple layers");
  return out;
}

inline Formability classify_formability(std::string_view config_id, std::string_view fabric_name,
                                        double mold_diameter_mm, int layers) {
  return classify_formability(parse_config_id(config_id), fabric(fabric_name), mold_diameter_mm, layers);
}

// ---------------------------------------------------------------------------
// Fabrication time

struct TimeAnchor {
  std::string config;
  double minutes = 0.0;
};

inline const std::vector<TimeAnchor>& bundled_time_anchors() {
  static const std::vector<TimeAnchor> anchors{{"L0.66_S1", 20.0}, {"L2_S15", 5.0}};
  return anchors;
}

// Stitches of a single layer of `config_id` on the 100 x 100 mm swatch.
inline std::size_t swatch_stitch_count(std::string_view config_id) {
  EmbroideryConfig cfg = EmbroideryConfig::grid(config_id);
  return linear_fill(Region::rectangle(100.0, 100.0), cfg).stitch_count();
}

// minutes = (intercept + per_stitch * stitches_per_layer) * layers
class TimeModel {
 public:
  TimeModel(double intercept_min, double per_stitch_min) : intercept_(intercept_min), per_stitch_(per_stitch_min) {}

  static TimeModel from_anchors(std::size_t stitches_a, double minutes_a, std::size_t stitches_b, double minutes_b) {
    if (stitches_a == stitches_b) throw Error(ErrorCode::InvariantViolation, "time anchors need distinct stitch counts");
    double sa = static_cast<double>(stitches_a), sb = static_cast<double>(stitches_b);
    double slope = (minutes_a - minutes_b) / (sa - sb);
    return {minutes_a - slope * sa, slope};
  }

  static const TimeModel& bundled() {
    static const TimeModel model = [] {
      const auto& a = bundled_time_anchors();
      return from_anchors(swatch_stitch_count(a[0].config), a[0].minutes, swatch_stitch_count(a[1].config),
                          a[1].minutes);
    }();
    return model;
  }

  double intercept() const { return intercept_; }
  double per_stitch() const { return per_stitch_; }

  double minutes(std::size_t stitches_per_layer, int layers = 1) const {
    return (intercept_ + per_stitch_ * static_cast<double>(stitches_per_layer)) * static_cast<double>(layers);
  }

 private:
  double intercept_;
  double per_stitch_;
};

inline double estimate_fabrication_time(const StitchPlan& plan, const TimeModel& model = TimeModel::bundled()) {
  if (plan.points.empty()) return 0.0;
  return model.minutes(plan.stitch_count(), plan.layer_count);
}

// ---------------------------------------------------------------------------
// Parameter / affordance matrix

enum class Affordance { stiffness, formability, stretchability, remoldability };

constexpr std::string_view to_string(Affordance a) {
  switch (a) {
    case Affordance::stiffness: return "stiffness";
    case Affordance::formability: return "formability";
    case Affordance::stretchability: return "stretchability";
    case Affordance::remoldability: return "re-moldability";
  }
  return "?";
}

inline Affordance parse_affordance(std::string_view s) {
  if (s == "stiffness") return Affordance::stiffness;
  if (s == "formability" || s == "geometrical-formability") return Affordance::formability;
  if (s == "stretchability") return Affordance::stretchability;
  if (s == "re-moldability" || s == "remoldability") return Affordance::remoldability;
  throw Error(ErrorCode::UnknownAffordance, fmt::format("unknown affordance '{}'", s));
}

struct ParameterHint {
  std::string parameter;
  std::string guidance;

  friend bool operator==(const ParameterHint&, const ParameterHint&) = default;
};

inline std::vector<ParameterHint> affordance_hints(Affordance a) {
  switch (a) {
    case Affordance::stiffness:
      return {
          {"thermoplastic quantity", "smaller line and stitch spacing, or more layers, add thermoplastic and stiffness"},
          {"thermoplastic direction", "threads parallel to the molding direction resist bending"},
          {"fabric type", "heavier fabric adds stiffness; stretch fabric resists compression more at high density"},
      };
    case Affordance::formability:
      return {
          {"thermoplastic direction",
           "straight lines along the bend for single curves; radial or concentric wavy layouts for domes"},
          {"fabric type", "non-stretch for crisp single curves; stretch fabric for doubly curved shapes"},
      };
    case Affordance::stretchability:
      return {
          {"thermoplastic direction", "threads perpendicular to the stretch direction keep the fabric stretchable"},
          {"fabric type", "only stretch fabric stretches; wider line and stitch spacing stretch more"},
      };
    case Affordance::remoldability:
      return {
          {"thermoplastic property", "glass transition (Tg 47-57 C) sets the reheat temperature for re-molding"},
      };
  }
  return {};
}

inline std::vector<ParameterHint> affordance_hints(std::string_view name) { return affordance_hints(parse_affordance(name)); }

}  // namespace exofab
