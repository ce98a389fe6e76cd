#include "pairsim/presets.hpp"

#include <algorithm>

namespace pairsim {

const std::vector<PresetInfo>& list_presets() {
  static const std::vector<PresetInfo> presets = {
      {"static-2.5", "FIG.1", "static well, V0 = 2.5 c^2 (tunneling)"},
      {"static-3.0", "FIG.1", "static well, V0 = 3.0 c^2 (tunneling)"},
      {"static-3.5", "FIG.1", "static well, V0 = 3.5 c^2 (tunneling)"},
      {"osc-1.3", "FIG.2/FIG.3", "V1 = 1.47 c^2, w1 = 1.3 c^2 (multiphoton, waterfall)"},
      {"osc-2.1", "FIG.4", "V1 = 1.47 c^2, w1 = 2.1 c^2 (one-photon saturation)"},
      {"bifreq-1.3-1.5", "FIG.5", "V1 = V2 = 1.47 c^2, w1 = 1.3 c^2, w2 = 1.5 c^2 (two-color)"},
      {"combined-1.0-1.3", "FIG.6", "V0 = 1 c^2 static + V1 = 1.47 c^2, w1 = 1.3 c^2 (dynamically assisted)"},
  };
  return presets;
}

Scale parse_scale(std::string_view text) {
  if (text == "desk") return Scale::desk;
  if (text == "full") return Scale::full;
  throw ConfigError("unknown scale \"" + std::string(text) + "\" (expected desk or full)");
}

RunConfig preset_config(std::string_view name, Scale scale, const Constants& constants) {
  const auto& presets = list_presets();
  if (std::none_of(presets.begin(), presets.end(), [&](const PresetInfo& p) { return p.name == name; }))
    throw ConfigError("unknown preset \"" + std::string(name) + "\"");

  RunConfig r = default_run_config(constants);
  const double c = constants.c();
  const double c2 = constants.c2();
  r.preset = std::string(name);
  r.scale = scale == Scale::full ? "full" : "desk";
  if (scale == Scale::full) {
    r.grid = GridSpec(2.5, 4096);
  } else {
    r.grid = GridSpec(2.5, 1024);
    r.selection = {6.0 * c, 6.0 * c};
  }

  constexpr double amplitude = 1.47;
  auto& terms = r.field.terms;
  if (name == "static-2.5") {
    terms = {TimeTerm::step(2.5 * c2)};
  } else if (name == "static-3.0") {
    terms = {TimeTerm::step(3.0 * c2)};
  } else if (name == "static-3.5") {
    terms = {TimeTerm::step(3.5 * c2)};
  } else if (name == "osc-1.3") {
    terms = {TimeTerm::sine(amplitude * c2, 1.3 * c2)};
  } else if (name == "osc-2.1") {
    terms = {TimeTerm::sine(amplitude * c2, 2.1 * c2)};
  } else if (name == "bifreq-1.3-1.5") {
    terms = {TimeTerm::sine(amplitude * c2, 1.3 * c2), TimeTerm::sine(amplitude * c2, 1.5 * c2)};
    // Lines sit 0.2 c^2 apart, and 3w1 - w2 style emission lines are observed.
    r.channels = {5, true, 0.08 * c2};
  } else if (name == "combined-1.0-1.3") {
    terms = {TimeTerm::step(1.0 * c2), TimeTerm::sine(amplitude * c2, 1.3 * c2)};
    // n w1 and n w1 + V0 lines are 0.3 c^2 apart.
    r.channels.tolerance = 0.12 * c2;
  }
  r.validate();
  return r;
}

}  // namespace pairsim
