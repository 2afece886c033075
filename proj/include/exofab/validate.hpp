#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "exofab/geometry.hpp"
#include "exofab/materials.hpp"

namespace exofab {

enum class Severity { error, warning };

constexpr std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

struct Diagnostic {
  Severity severity = Severity::warning;
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Thread gauges outside the tested Tex 45..60 band.
inline constexpr double kMaxThreadTex = 60.0;
inline constexpr double kMinThreadTex = 45.0;

// Fabrication checks. Never throws; thread problems first, then density, then side.
inline std::vector<Diagnostic> validate_design(const EmbroideryConfig& config, const ThreadSpec& thread,
                                               const FabricSpec& fabric) {
  std::vector<Diagnostic> out;
  if (thread.tex > kMaxThreadTex)
    out.push_back({Severity::error, "thread-jam",
                   fmt::format("machine jam risk: Tex {} exceeds Tex {}", thread.tex, kMaxThreadTex)});
  if (thread.tex < kMinThreadTex)
    out.push_back({Severity::error, "thread-soft",
                   fmt::format("thread too soft: Tex {} below Tex {}", thread.tex, kMinThreadTex)});
  if (config.stitch_spacing < kMinStitchSpacing)
    out.push_back({Severity::warning, "over-punch-stitch",
                   fmt::format("over-punch risk on {}: stitch spacing {} mm below {} mm", fabric.name,
                               config.stitch_spacing, kMinStitchSpacing)});
  if (config.line_spacing < kMinLineSpacing)
    out.push_back({Severity::warning, "over-punch-line",
                   fmt::format("over-punch risk on {}: line spacing {} mm below {} mm", fabric.name,
                               config.line_spacing, kMinLineSpacing)});
  if (thread.side == ThreadSide::front)
    out.push_back({Severity::warning, "thread-side",
                   "thermoplastic on the front side causes tension imbalance; put it on the back side"});
  return out;
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::error) return true;
  return false;
}

}  // namespace exofab
