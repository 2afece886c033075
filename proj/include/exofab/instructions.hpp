#pragma once

#include <string>

#include <fmt/format.h>

#include "exofab/materials.hpp"
#include "exofab/numeric.hpp"
#include "exofab/spec_file.hpp"
#include "exofab/validate.hpp"

namespace exofab {

// Plain-text fabrication sheet. UTF-8 (degree sign, en dash).
inline std::string render_instructions(const DesignSpec& spec) {
  const FabricSpec& fab = fabric(spec.fabric);
  const ThreadSpec th = spec.thread_spec();
  const MoldingProtocol& mp = kMoldingProtocol;
  const EmbroideryConfig& cfg = spec.pattern;

  std::string out;
  out += fmt::format("design: {}\n\n", spec.name);
  out += fmt::format("fabric: {} ({}, {} g/m², {})\n", fab.name, to_string(fab.stretch), shortest(fab.gsm),
                     fab.composition);
  out += fmt::format("thread: {} ({}, Tex {}, Tg {}–{} °C)\n", th.name, th.material, shortest(th.tex),
                     shortest(th.tg_low), shortest(th.tg_high));
  out += fmt::format("pattern: {} {}, angle {}°", to_string(cfg.primitive), cfg.id(), shortest(cfg.angle_deg));
  if (cfg.primitive != Primitive::linear)
    out += fmt::format(", waviness {} mm / {} mm", shortest(cfg.waviness_amplitude), shortest(cfg.waviness_period));
  out += "\n";
  out += fmt::format("region: {}", to_string(spec.region.kind()));
  const Region& r = spec.region;
  if (r.kind() == RegionKind::rectangle)
    out += fmt::format(" {} x {} mm", shortest(r.width()), shortest(r.height()));
  else if (r.kind() == RegionKind::circle)
    out += fmt::format(" radius {} mm", shortest(r.radius()));
  else
    out += fmt::format(" with {} vertices", r.vertices().size());
  out += "\n\n";

  out += "steps:\n";
  int step = 0;
  out += fmt::format("{}. hoop the fabric with the back side facing up; the thermoplastic thread goes on the back side\n",
                     ++step);
  if (th.side == ThreadSide::front)
    out += "   (this spec asks for the front side; expect the thread to be more exposed)\n";
  if (spec.layers > 1)
    out += fmt::format("{}. embroider {} copies and stack them, thread sides facing the same way\n", ++step,
                       spec.layers);
  else
    out += fmt::format("{}. embroider 1 copy\n", ++step);
  out += fmt::format("{}. heat to {} °C for {} s; cool {} s to {} °C\n", ++step, shortest(mp.heat_temperature_c),
                     shortest(mp.heat_seconds), shortest(mp.cool_seconds), shortest(mp.cool_temperature_c));
  out += fmt::format("{}. to re-mold, reheat above Tg {}–{} °C and reshape\n", ++step, shortest(th.tg_low),
                     shortest(th.tg_high));

  auto diags = validate_design(cfg, th, fab);
  if (!diags.empty()) {
    out += "\nchecks:\n";
    for (const auto& d : diags) out += fmt::format("- {} {}: {}\n", to_string(d.severity), d.code, d.message);
  }
  return out;
}

}  // namespace exofab
