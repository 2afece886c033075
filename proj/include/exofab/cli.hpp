#pragma once

// Command-line front end. run() takes arguments without the program name and
// returns 0 on success, 1 on domain errors and 2 on usage errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "exofab/calibration.hpp"
#include "exofab/dst.hpp"
#include "exofab/error.hpp"
#include "exofab/fill.hpp"
#include "exofab/instructions.hpp"
#include "exofab/solver.hpp"
#include "exofab/spec_file.hpp"
#include "exofab/svg.hpp"
#include "exofab/validate.hpp"

namespace exofab::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr const char* kCalibrationEnv = "EXOFAB_CALIBRATION";

inline std::string version_string() {
  return fmt::format("exofab {} (calibration table {})", kToolVersion, kBundledTableVersion);
}

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An Error tagged with the file it came from.
struct FileError : std::runtime_error {
  FileError(const std::string& path, const Error& e)
      : std::runtime_error(fmt::format("{}: {} ({})", path, e.what(), to_string(e.code()))) {}
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(fmt::format("cannot read '{}'", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void check_input(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw UsageError(fmt::format("input file '{}' not found", path));
}

inline void check_output(const std::string& path) {
  if (path.empty()) return;
  std::filesystem::path p(path);
  std::error_code ec;
  if (std::filesystem::is_directory(p, ec)) throw UsageError(fmt::format("output '{}' is a directory", path));
  auto parent = p.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent, ec))
    throw UsageError(fmt::format("output directory '{}' does not exist", parent.string()));
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
}

template <class F>
auto with_file(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw FileError(path, e);
  }
}

inline DesignSpec load_spec(const std::string& path) {
  std::string text = read_file(path);
  return with_file(path, [&] { return parse_design_spec(text); });
}

// Bundled table, merged with a user table from --calibration or the environment.
inline CalibrationTable load_table(const std::string& flag) {
  std::string path = flag;
  if (path.empty())
    if (const char* env = std::getenv(kCalibrationEnv)) path = env;
  if (path.empty()) return CalibrationTable::bundled();
  check_input(path);
  std::string text = read_file(path);
  return with_file(path, [&] { return CalibrationTable::bundled().merged(CalibrationTable::parse(text)); });
}

inline StitchPlan plan_for(const DesignSpec& spec) { return generate_plan(spec.region, spec.pattern, spec.layers); }

inline void report(std::ostream& err, const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) err << fmt::format("exofab: {}: {}: {}\n", to_string(d.severity), d.code, d.message);
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ExoFabric design compiler", "exofab"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  std::string spec_path, dst_path, svg_path, text_path, req_path, table_path;
  std::string config, fabric_name, mode_name = "compression", geometry_name = "swatch-100";
  int layers = 1;
  double displacement = 0.0, mold = 30.0;
  bool extrapolate = false, tensile_scaling = false;

  auto* generate = app.add_subcommand("generate", "compile a design spec to DST (and optionally SVG and instructions)");
  generate->add_option("spec", spec_path, "design spec file")->required();
  generate->add_option("--dst", dst_path, "DST output path")->required();
  generate->add_option("--svg", svg_path, "SVG preview output path");
  generate->add_option("--instructions", text_path, "instruction sheet output path");

  auto* predict_cmd = app.add_subcommand("predict", "predict force from the calibration table");
  predict_cmd->add_option("--config", config, "grid config id, e.g. L0.66_S1")->required();
  predict_cmd->add_option("--fabric", fabric_name, "fabric name")->required();
  predict_cmd->add_option("--layers", layers, "layer count")->default_val(1);
  predict_cmd->add_option("--displacement", displacement, "displacement in mm")->required();
  predict_cmd->add_option("--mode", mode_name, "compression or tensile")->default_val("compression");
  predict_cmd->add_option("--geometry", geometry_name, "swatch-100, splint or bra-dome")->default_val("swatch-100");
  predict_cmd->add_option("--mold", mold, "mold diameter for the formability line (mm)")->default_val(30.0);
  predict_cmd->add_option("--calibration", table_path, "extra calibration CSV");
  predict_cmd->add_flag("--extrapolate", extrapolate, "hold the last knot past the calibrated range");
  predict_cmd->add_flag("--tensile-layer-scaling", tensile_scaling, "scale single-layer tensile data by layer count");

  auto* solve_cmd = app.add_subcommand("solve", "find minimal designs meeting a requirements file");
  solve_cmd->add_option("requirements", req_path, "requirements file")->required();
  solve_cmd->add_option("-o,--output", text_path, "report output path (default stdout)");
  solve_cmd->add_option("--calibration", table_path, "extra calibration CSV");
  solve_cmd->add_flag("--extrapolate", extrapolate, "hold the last knot past the calibrated range");

  auto* preview = app.add_subcommand("preview", "render an SVG preview of a design spec");
  preview->add_option("spec", spec_path, "design spec file")->required();
  preview->add_option("--svg", svg_path, "SVG output path")->required();

  auto* time_cmd = app.add_subcommand("time", "estimate fabrication time for a design spec");
  time_cmd->add_option("spec", spec_path, "design spec file")->required();

  auto* instr = app.add_subcommand("instructions", "render the fabrication sheet for a design spec");
  instr->add_option("spec", spec_path, "design spec file")->required();
  instr->add_option("-o,--output", text_path, "output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "exofab: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*generate) {
      detail::check_input(spec_path);
      for (const auto* p : {&dst_path, &svg_path, &text_path}) detail::check_output(*p);
      DesignSpec spec = detail::load_spec(spec_path);
      auto diags = validate_design(spec.pattern, spec.thread_spec(), fabric(spec.fabric));
      detail::report(err, diags);
      if (has_errors(diags)) return 1;
      StitchPlan plan = detail::with_file(spec_path, [&] { return detail::plan_for(spec); });
      auto bytes = detail::with_file(spec_path, [&] { return dst::write_dst(plan, spec.name); });
      detail::write_file(dst_path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
      if (!svg_path.empty()) detail::write_file(svg_path, write_svg(plan));
      if (!text_path.empty()) detail::write_file(text_path, render_instructions(spec));
      out << fmt::format("{}: {} stitches per layer, {} layer(s), {:.1f} min\n", spec.name, plan.stitch_count(),
                         spec.layers, estimate_fabrication_time(plan));
      return 0;
    }

    if (*predict_cmd) {
      auto mode = parse_load_mode(mode_name);
      if (!mode) throw detail::UsageError(fmt::format("unknown mode '{}'", mode_name));
      auto geometry = parse_geometry_tag(geometry_name);
      if (!geometry) throw detail::UsageError(fmt::format("unknown geometry '{}'", geometry_name));
      CalibrationTable table = detail::load_table(table_path);
      PropertyQuery q{config, fabric_name, layers, displacement, *mode, *geometry};
      PredictOptions opt{extrapolate, tensile_scaling};
      Prediction p = predict(q, table, opt);
      out << fmt::format("config        {}\n", canonical_config_id(config));
      out << fmt::format("fabric        {}\n", fabric_name);
      out << fmt::format("layers        {}\n", layers);
      out << fmt::format("geometry      {}\n", to_string(*geometry));
      out << fmt::format("mode          {}\n", to_string(*mode));
      out << fmt::format("displacement  {} mm\n", shortest(displacement));
      out << fmt::format("force         {}{}\n", p.upper_bound ? "<= " : "", exofab::detail::format_force(p.force_n));
      if (p.layer_interpolated) out << "note          interpolated between 1 and 4 layers\n";
      if (p.layer_scaled) out << "note          scaled from the 1-layer tensile series\n";
      if (p.extrapolated) out << "note          held at the last calibrated knot\n";
      Formability f = classify_formability(config, fabric_name, mold, layers);
      out << fmt::format("formability   {} ({} mm mold)\n", to_string(f.form), shortest(mold));
      for (const auto& w : f.warnings) err << "exofab: warning: " << w << "\n";
      return 0;
    }

    if (*solve_cmd) {
      detail::check_input(req_path);
      detail::check_output(text_path);
      std::string text = detail::read_file(req_path);
      Requirements req = detail::with_file(req_path, [&] { return parse_requirements(text); });
      CalibrationTable table = detail::load_table(table_path);
      SolverContext ctx;
      ctx.table = &table;
      ctx.options.extrapolate = extrapolate;
      std::string rep = feasibility_report(solve(req, ctx));
      if (text_path.empty())
        out << rep;
      else
        detail::write_file(text_path, rep);
      return 0;
    }

    if (*preview) {
      detail::check_input(spec_path);
      detail::check_output(svg_path);
      DesignSpec spec = detail::load_spec(spec_path);
      StitchPlan plan = detail::with_file(spec_path, [&] { return detail::plan_for(spec); });
      detail::write_file(svg_path, write_svg(plan));
      return 0;
    }

    if (*time_cmd) {
      detail::check_input(spec_path);
      DesignSpec spec = detail::load_spec(spec_path);
      StitchPlan plan = detail::with_file(spec_path, [&] { return detail::plan_for(spec); });
      out << fmt::format("{:.1f} min ({} stitches per layer, {} layer(s))\n", estimate_fabrication_time(plan),
                         plan.stitch_count(), spec.layers);
      return 0;
    }

    if (*instr) {
      detail::check_input(spec_path);
      detail::check_output(text_path);
      DesignSpec spec = detail::load_spec(spec_path);
      std::string sheet = render_instructions(spec);
      if (text_path.empty())
        out << sheet;
      else
        detail::write_file(text_path, sheet);
      return 0;
    }
  } catch (const detail::UsageError& e) {
    err << "exofab: " << e.what() << "\n";
    return 2;
  } catch (const detail::FileError& e) {
    err << "exofab: error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << fmt::format("exofab: error: {} ({})\n", e.what(), to_string(e.code()));
    return 1;
  } catch (const std::exception& e) {
    err << "exofab: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace exofab::cli
