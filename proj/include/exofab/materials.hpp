#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "exofab/error.hpp"

namespace exofab {

enum class StretchClass { non_stretch, stretch };

constexpr std::string_view to_string(StretchClass s) {
  return s == StretchClass::stretch ? "stretch" : "non-stretch";
}

struct FabricSpec {
  std::string name;
  StretchClass stretch = StretchClass::non_stretch;
  double gsm = 0.0;
  std::string composition;
};

enum class ThreadSide { front, back };

constexpr std::string_view to_string(ThreadSide s) { return s == ThreadSide::back ? "back" : "front"; }

struct ThreadSpec {
  std::string name;
  double tex = 60.0;  // g per 1000 m
  std::string material = "nylon monofilament";
  double tg_low = 47.0;  // deg C
  double tg_high = 57.0;
  ThreadSide side = ThreadSide::back;
};

// Heat-gun molding protocol used for every characterization swatch.
struct MoldingProtocol {
  double heat_temperature_c = 70.0;
  double heat_seconds = 10.0;
  double cool_seconds = 20.0;
  double cool_temperature_c = 22.0;
};

inline constexpr MoldingProtocol kMoldingProtocol{};

inline const std::vector<FabricSpec>& fabric_registry() {
  static const std::vector<FabricSpec> fabrics{
      {"nonstretch-336", StretchClass::non_stretch, 336.0, "98% cotton, 2% elastane, twill weave"},
      {"nonstretch-167", StretchClass::non_stretch, 167.0, "unspecified"},
      {"stretch-390", StretchClass::stretch, 390.0, "62% rayon, 32% nylon, 6% spandex, knit"},
      {"stretch-189", StretchClass::stretch, 189.0, "unspecified"},
  };
  return fabrics;
}

// The two fabrics carried through the full characterization.
inline constexpr std::array<std::string_view, 2> kPrimaryFabrics{"nonstretch-336", "stretch-390"};

inline const FabricSpec* find_fabric(std::string_view name) {
  for (const auto& f : fabric_registry())
    if (f.name == name) return &f;
  return nullptr;
}

inline const FabricSpec& fabric(std::string_view name) {
  if (const auto* f = find_fabric(name)) return *f;
  throw Error(ErrorCode::UnknownFabric, fmt::format("unknown fabric '{}'", name));
}

inline const std::vector<ThreadSpec>& thread_registry() {
  static const std::vector<ThreadSpec> threads{
      {"nylon-tex35", 35.0}, {"nylon-tex45", 45.0}, {"nylon-tex50", 50.0},
      {"nylon-tex60", 60.0}, {"nylon-tex80", 80.0},
  };
  return threads;
}

inline constexpr std::string_view kDefaultThread = "nylon-tex60";

inline const ThreadSpec& thread(std::string_view name) {
  for (const auto& t : thread_registry())
    if (t.name == name) return t;
  throw Error(ErrorCode::UnknownThread, fmt::format("unknown thread '{}'", name));
}

inline const ThreadSpec& default_thread() { return thread(kDefaultThread); }

}  // namespace exofab
