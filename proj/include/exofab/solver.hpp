#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "exofab/calibration.hpp"
#include "exofab/error.hpp"
#include "exofab/fill.hpp"
#include "exofab/geometry.hpp"
#include "exofab/materials.hpp"

namespace exofab {

enum class FabricConstraint { any, non_stretch, stretch, named };

enum class FormabilityNeed { none, single_curve, double_curve };

constexpr std::string_view to_string(FormabilityNeed f) {
  switch (f) {
    case FormabilityNeed::none: return "none";
    case FormabilityNeed::single_curve: return "single-curve";
    case FormabilityNeed::double_curve: return "double-curve";
  }
  return "?";
}

struct ForceRequirement {
  double force_n = 0.0;
  double displacement_mm = 0.0;

  friend bool operator==(const ForceRequirement&, const ForceRequirement&) = default;
};

struct Requirements {
  FabricConstraint fabric_constraint = FabricConstraint::any;
  std::string fabric_name;  // when fabric_constraint == named
  std::optional<ForceRequirement> min_compression;
  std::optional<ForceRequirement> max_tensile;
  FormabilityNeed formability = FormabilityNeed::none;
  double mold_diameter_mm = 30.0;
  GeometryTag geometry = GeometryTag::swatch100;
  int max_layers = kMaxLayers;

  bool has_constraint() const {
    return min_compression.has_value() || max_tensile.has_value() || formability != FormabilityNeed::none;
  }

  void check() const {
    auto bad = [](const std::string& m) { return Error(ErrorCode::InvalidRequirements, m); };
    if (!has_constraint()) throw bad("no constraint present");
    for (const auto* r : {&min_compression, &max_tensile})
      if (*r && (!((*r)->displacement_mm >= 0.0) || !((*r)->force_n >= 0.0)))
        throw bad("force and displacement must be non-negative");
    if (max_layers < 1 || max_layers > kMaxLayers) throw bad(fmt::format("max_layers must be in [1, {}]", kMaxLayers));
    if (fabric_constraint == FabricConstraint::named) fabric(fabric_name);
  }

  friend bool operator==(const Requirements&, const Requirements&) = default;
};

struct CandidateDesign {
  std::string config;
  Spacing spacing;
  Primitive primitive = Primitive::linear;
  std::string fabric;
  int layers = 1;

  std::optional<Prediction> compression;
  std::optional<Prediction> tensile;
  std::optional<Formability> formability;

  // Objectives, all minimized.
  double minutes = 0.0;
  std::size_t stitches = 0;

  // Set when a required prediction has no calibration behind it.
  std::optional<std::string> missing_calibration;
  std::vector<std::string> violations;
  // Sum of relative constraint shortfalls; 0 when feasible.
  double shortfall = 0.0;
  std::string explanation;

  bool evaluable() const { return !missing_calibration.has_value(); }
  bool feasible() const { return evaluable() && violations.empty(); }
};

struct SkippedCandidate {
  std::string config;
  std::string fabric;
  int layers = 1;
  std::string reason;
};

struct SolveResult {
  bool feasible = false;
  std::vector<CandidateDesign> pareto_front;
  std::size_t candidate_count = 0;
  std::size_t rejected_count = 0;
  std::size_t dominated_count = 0;
  std::vector<SkippedCandidate> skipped_for_missing_calibration;
  std::optional<CandidateDesign> nearest_miss;
  // First constraint the nearest miss violates ("" when feasible).
  std::string binding_constraint;
  Requirements requirements;
};

struct SolverContext {
  const CalibrationTable* table = &CalibrationTable::bundled();
  const TimeModel* time_model = &TimeModel::bundled();
  PredictOptions options{};
};

namespace detail {

inline bool admits(const Requirements& req, const FabricSpec& f) {
  switch (req.fabric_constraint) {
    case FabricConstraint::any: return true;
    case FabricConstraint::non_stretch: return f.stretch == StretchClass::non_stretch;
    case FabricConstraint::stretch: return f.stretch == StretchClass::stretch;
    case FabricConstraint::named: return f.name == req.fabric_name;
  }
  return false;
}

inline std::vector<std::string> admissible_fabrics(const Requirements& req) {
  std::vector<std::string> out;
  if (req.fabric_constraint == FabricConstraint::named) {
    out.push_back(fabric(req.fabric_name).name);
    return out;
  }
  for (auto name : kPrimaryFabrics)
    if (admits(req, fabric(name))) out.emplace_back(name);
  return out;
}

// Single-layer stitch count of the reference plan for each primitive: the
// 100 x 100 mm swatch for linear layouts, a 50 mm radius disk otherwise.
inline std::size_t reference_stitches(const EmbroideryConfig& cfg) {
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, std::size_t> cache;
  auto key = std::make_tuple(static_cast<int>(cfg.primitive), cfg.line_spacing, cfg.stitch_spacing);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Region region = cfg.primitive == Primitive::linear ? Region::rectangle(100.0, 100.0) : Region::circle({}, 50.0);
  std::size_t n = generate_plan(region, cfg).stitch_count();
  std::lock_guard lock(mutex);
  cache.emplace(key, n);
  return n;
}

inline std::string explain(const CandidateDesign& c, const Requirements& req) {
  std::vector<std::string> parts;
  auto hint_names = [](Affordance a) {
    std::string s;
    for (const auto& h : affordance_hints(a)) s += (s.empty() ? "" : ", ") + h.parameter;
    return s;
  };
  if (req.min_compression)
    parts.push_back(fmt::format("stiffness via {} ({}, {} layer(s))", hint_names(Affordance::stiffness), c.config,
                                c.layers));
  if (req.max_tensile)
    parts.push_back(fmt::format("stretchability via {} ({})", hint_names(Affordance::stretchability), c.fabric));
  if (req.formability != FormabilityNeed::none)
    parts.push_back(fmt::format("formability via {} ({} layout on {})", hint_names(Affordance::formability),
                                to_string(c.primitive), c.fabric));
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : "; ") + p;
  return out;
}

}  // namespace detail

// Evaluates one (config, fabric, layers) grid point against `req`.
inline CandidateDesign evaluate_candidate(std::string_view config_id, const std::string& fabric_name, int layers,
                                          const Requirements& req, const SolverContext& ctx = {}) {
  CandidateDesign c;
  c.config = canonical_config_id(config_id);
  c.spacing = parse_config_id(c.config);
  c.fabric = fabric_name;
  c.layers = layers;
  c.primitive = req.formability == FormabilityNeed::double_curve ? Primitive::concentric : Primitive::linear;
  const FabricSpec& fab = fabric(fabric_name);

  EmbroideryConfig cfg = EmbroideryConfig::grid(c.config, c.primitive);
  const std::size_t per_layer = detail::reference_stitches(cfg);
  c.stitches = per_layer * static_cast<std::size_t>(layers);
  c.minutes = ctx.time_model->minutes(per_layer, layers);

  auto query = [&](LoadMode mode, double d) {
    return PropertyQuery{c.config, c.fabric, layers, d, mode, req.geometry};
  };
  try {
    if (req.min_compression) {
      c.compression = predict(query(LoadMode::compression, req.min_compression->displacement_mm), *ctx.table, ctx.options);
      if (c.compression->force_n < req.min_compression->force_n) {
        c.violations.push_back("min_compression");
        c.shortfall += (req.min_compression->force_n - c.compression->force_n) /
                       std::max(req.min_compression->force_n, 1e-12);
      }
    }
    if (req.max_tensile) {
      c.tensile = predict(query(LoadMode::tensile, req.max_tensile->displacement_mm), *ctx.table, ctx.options);
      if (c.tensile->force_n > req.max_tensile->force_n) {
        c.violations.push_back("max_tensile");
        c.shortfall += (c.tensile->force_n - req.max_tensile->force_n) / std::max(req.max_tensile->force_n, 1e-12);
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnknownConfig && e.code() != ErrorCode::InsufficientCalibration &&
        e.code() != ErrorCode::NonStretchFabric)
      throw;
    c.missing_calibration = e.what();
  }
  if (req.formability != FormabilityNeed::none) {
    c.formability = classify_formability(c.spacing, fab, req.mold_diameter_mm, layers);
    bool ok = c.formability->form == FormClass::good;
    if (req.formability == FormabilityNeed::double_curve && fab.stretch != StretchClass::stretch) ok = false;
    if (!ok) {
      c.violations.push_back("formability");
      c.shortfall += 1.0;
    }
  }
  c.explanation = detail::explain(c, req);
  return c;
}

// Every grid config x admissible fabric x layers 1..max_layers, in grid order.
inline std::vector<CandidateDesign> enumerate_candidates(const Requirements& req, const SolverContext& ctx = {}) {
  std::vector<CandidateDesign> out;
  for (double line : kGridLineSpacings)
    for (double stitch : kGridStitchSpacings)
      for (const auto& fab : detail::admissible_fabrics(req))
        for (int layers = 1; layers <= req.max_layers; ++layers)
          out.push_back(evaluate_candidate(format_config_id(line, stitch), fab, layers, req, ctx));
  return out;
}

// `a` dominates `b`: no worse on every objective, strictly better on one.
inline bool dominates(const CandidateDesign& a, const CandidateDesign& b) {
  bool no_worse = a.minutes <= b.minutes && a.layers <= b.layers && a.stitches <= b.stitches;
  bool better = a.minutes < b.minutes || a.layers < b.layers || a.stitches < b.stitches;
  return no_worse && better;
}

// Fewer layers, then larger line spacing, larger stitch spacing, fabric name.
inline bool tie_break_less(const CandidateDesign& a, const CandidateDesign& b) {
  if (a.layers != b.layers) return a.layers < b.layers;
  if (a.spacing.line != b.spacing.line) return a.spacing.line > b.spacing.line;
  if (a.spacing.stitch != b.spacing.stitch) return a.spacing.stitch > b.spacing.stitch;
  return a.fabric < b.fabric;
}

inline SolveResult solve(const Requirements& req, const SolverContext& ctx = {}) {
  req.check();
  SolveResult result;
  result.requirements = req;
  std::vector<CandidateDesign> all = enumerate_candidates(req, ctx);
  result.candidate_count = all.size();

  std::vector<CandidateDesign> feasible;
  std::vector<CandidateDesign> misses;
  for (auto& c : all) {
    if (!c.evaluable()) {
      result.skipped_for_missing_calibration.push_back({c.config, c.fabric, c.layers, *c.missing_calibration});
    } else if (c.feasible()) {
      feasible.push_back(std::move(c));
    } else {
      ++result.rejected_count;
      misses.push_back(std::move(c));
    }
  }

  for (const auto& c : feasible) {
    bool dominated = std::any_of(feasible.begin(), feasible.end(), [&](const auto& o) { return dominates(o, c); });
    if (dominated)
      ++result.dominated_count;
    else
      result.pareto_front.push_back(c);
  }
  std::sort(result.pareto_front.begin(), result.pareto_front.end(), tie_break_less);
  result.feasible = !result.pareto_front.empty();

  if (!result.feasible && !misses.empty()) {
    auto best = std::min_element(misses.begin(), misses.end(), [](const auto& a, const auto& b) {
      if (a.shortfall != b.shortfall) return a.shortfall < b.shortfall;
      return tie_break_less(a, b);
    });
    result.nearest_miss = *best;
    result.binding_constraint = best->violations.front();
  } else if (!result.feasible) {
    result.binding_constraint = "calibration";
  }
  return result;
}

namespace detail {

inline std::string format_force(double n) { return fmt::format("{:.4g} N", n); }

inline std::string describe(const CandidateDesign& c, const Requirements& req) {
  std::string s = fmt::format("{} {} on {} x{} layer(s)", c.config, to_string(c.primitive), c.fabric, c.layers);
  if (c.compression && req.min_compression)
    s += fmt::format(" | compression@{}mm {}{}", shortest(req.min_compression->displacement_mm),
                     format_force(c.compression->force_n), c.compression->layer_interpolated ? " (layer-interp)" : "");
  if (c.tensile && req.max_tensile)
    s += fmt::format(" | tensile@{}mm {}{}", shortest(req.max_tensile->displacement_mm),
                     format_force(c.tensile->force_n), c.tensile->upper_bound ? " (upper bound)" : "");
  if (c.formability) s += fmt::format(" | formability {}", to_string(c.formability->form));
  s += fmt::format(" | {:.1f} min | {} stitches", c.minutes, c.stitches);
  return s;
}

inline std::string describe_requirement(const std::string& name, const Requirements& req) {
  if (name == "min_compression" && req.min_compression)
    return fmt::format("min_compression {} at {} mm", format_force(req.min_compression->force_n),
                       shortest(req.min_compression->displacement_mm));
  if (name == "max_tensile" && req.max_tensile)
    return fmt::format("max_tensile {} at {} mm", format_force(req.max_tensile->force_n),
                       shortest(req.max_tensile->displacement_mm));
  if (name == "formability")
    return fmt::format("formability {} on a {} mm mold", to_string(req.formability), shortest(req.mold_diameter_mm));
  return name;
}

}  // namespace detail

inline std::string feasibility_report(const SolveResult& r) {
  const Requirements& req = r.requirements;
  std::string out;
  out += fmt::format("status: {}\n", r.feasible ? "feasible" : "infeasible");
  if (!r.feasible) out += fmt::format("reason: {}\n", r.binding_constraint);
  out += fmt::format("geometry: {}\n", to_string(req.geometry));
  out += "requirements:";
  for (const char* name : {"min_compression", "max_tensile", "formability"}) {
    bool present = (std::string_view(name) == "min_compression" && req.min_compression) ||
                   (std::string_view(name) == "max_tensile" && req.max_tensile) ||
                   (std::string_view(name) == "formability" && req.formability != FormabilityNeed::none);
    if (present) out += fmt::format(" [{}]", detail::describe_requirement(name, req));
  }
  out += "\n";
  out += fmt::format("candidates: {} total, {} rejected, {} dominated, {} skipped (missing calibration)\n",
                     r.candidate_count, r.rejected_count, r.dominated_count, r.skipped_for_missing_calibration.size());
  if (r.feasible) {
    out += fmt::format("pareto front ({}):\n", r.pareto_front.size());
    for (std::size_t i = 0; i < r.pareto_front.size(); ++i) {
      const auto& c = r.pareto_front[i];
      out += fmt::format("  {}. {}\n", i + 1, detail::describe(c, req));
      if (!c.explanation.empty()) out += fmt::format("     why: {}\n", c.explanation);
      if (c.formability)
        for (const auto& w : c.formability->warnings) out += fmt::format("     warning: {}\n", w);
    }
  } else if (r.nearest_miss) {
    const auto& m = *r.nearest_miss;
    out += fmt::format("nearest miss: {}\n", detail::describe(m, req));
    for (const auto& v : m.violations) out += fmt::format("  violated: {}\n", detail::describe_requirement(v, req));
    out += fmt::format("binding constraint: {}\n", detail::describe_requirement(r.binding_constraint, req));
    if (!m.explanation.empty()) out += fmt::format("  levers: {}\n", m.explanation);
  } else {
    out += "no candidate has calibration data for these requirements\n";
  }
  return out;
}

}  // namespace exofab
