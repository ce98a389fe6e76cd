#include "pairsim/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace pairsim {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!names.contains(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
}

std::string path_of(const std::string& where, const char* key) { return where.empty() ? key : where + "." + key; }

double get_number(const json& obj, const std::string& where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(path_of(where, key) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path_of(where, key) + ": must be finite");
  return x;
}

std::size_t get_count(const json& obj, const std::string& where, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(path_of(where, key) + ": expected a nonnegative integer");
  return v.get<std::size_t>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ConfigError(path_of(where, key) + ": expected true or false");
  return obj.at(key).get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError(path_of(where, key) + ": expected a string");
  return obj.at(key).get<std::string>();
}

// "full" or a number of c.
std::optional<double> get_cutoff(const json& obj, const std::string& where, const char* key,
                                 std::optional<double> fallback, double c) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_string() && v.get<std::string>() == "full") return std::nullopt;
  if (!v.is_number()) throw ConfigError(path_of(where, key) + ": expected a number (units of c) or \"full\"");
  return v.get<double>() * c;
}

json cutoff_json(std::optional<double> cutoff, double c) {
  if (!cutoff) return "full";
  return *cutoff / c;
}

template <typename F>
auto rethrow_as_config(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

RunConfig default_run_config(const Constants& constants) {
  const double c = constants.c();
  const double c2 = constants.c2();
  RunConfig r;
  r.constants = constants;
  r.grid = GridSpec(2.5, 1024);
  r.field.shape = {0.3 / c, 8.0 / c};
  r.samples = 50;
  r.schedule = Schedule::uniform(40.0 * std::numbers::pi / c2, 4000, r.samples);
  r.selection = {8.0 * c, 8.0 * c};
  r.ces = {2.0 * c2, 8.0 * c2, 1000, 0.04 * c2};
  r.channels = {6, false, 0.3 * c2};
  return r;
}

std::vector<ChannelSpec> RunConfig::channel_lattice() const {
  const std::vector<double> freqs = field.frequencies();
  if (freqs.size() > 2) throw ConfigError("channel lattice supports at most two sinusoid terms");
  const double lo = 2.0 * constants.c2() - channels.tolerance;
  return pairsim::channel_lattice(freqs, field.static_height(), lo, ces.e_max, channels.order_max,
                                  channels.allow_emission);
}

void RunConfig::validate() const {
  rethrow_as_config("field", [&] { field.validate(); });
  if (!(field.shape.extension < grid.length()))
    throw ConfigError("field.extension_inv_c: well extension D must be smaller than the box length L");
  rethrow_as_config("schedule", [&] { schedule.validate(); });
  rethrow_as_config("ces", [&] { ces.validate(constants); });
  for (const auto& [name, cut] : {std::pair{"selection.negative_cutoff_c", selection.negative_cutoff},
                                  std::pair{"selection.positive_cutoff_c", selection.positive_cutoff}}) {
    if (!cut) continue;
    if (!(*cut >= 0.0)) throw ConfigError(std::string(name) + ": cutoff must be >= 0");
    if (*cut > grid.max_momentum() * (1.0 + 1e-12))
      throw ConfigError(std::string(name) + ": cutoff exceeds the grid's largest momentum (" +
                        std::to_string(grid.max_momentum() / constants.c()) + " c)");
  }
  if (channels.order_max < 1) throw ConfigError("channels.order_max: must be >= 1");
  if (!(channels.tolerance > 0.0)) throw ConfigError("channels.tolerance_c2: must be positive");
  if (field.frequencies().size() > 2) throw ConfigError("field.terms: at most two sinusoid terms are supported");
  if (workers < 1) throw ConfigError("workers: must be >= 1");
  if (scale != "desk" && scale != "full" && scale != "custom")
    throw ConfigError("scale: expected \"desk\", \"full\" or \"custom\"");
}

RunConfig config_from_json(const json& root_in) {
  const json* root = &root_in;
  if (root_in.is_object() && root_in.contains("manifest_version")) {
    if (!root_in.contains("config")) throw ConfigError("manifest has no \"config\" member");
    root = &root_in.at("config");
  }
  reject_unknown(*root, "config",
                 {"preset", "scale", "constants", "grid", "field", "schedule", "selection", "ces", "channels",
                  "workers", "output_dir", "dump_amplitudes"});

  double c = kDefaultSpeedOfLight;
  if (root->contains("constants")) {
    const json& j = root->at("constants");
    reject_unknown(j, "constants", {"c"});
    c = get_number(j, "constants", "c", c);
  }
  const Constants constants = rethrow_as_config("constants.c", [&] { return Constants(c); });
  RunConfig r = default_run_config(constants);
  const double c2 = constants.c2();

  if (root->contains("preset")) r.preset = get_string(*root, "", "preset", "");
  r.scale = get_string(*root, "", "scale", "custom");

  if (root->contains("grid")) {
    const json& j = root->at("grid");
    reject_unknown(j, "grid", {"L", "N_z"});
    const double length = get_number(j, "grid", "L", r.grid.length());
    const std::size_t points = get_count(j, "grid", "N_z", r.grid.size());
    r.grid = rethrow_as_config("grid", [&] { return build_grid(length, points); });
  }

  if (root->contains("field")) {
    const json& j = root->at("field");
    reject_unknown(j, "field", {"edge_width_inv_c", "extension_inv_c", "terms"});
    r.field.shape.width = get_number(j, "field", "edge_width_inv_c", r.field.shape.width * c) / c;
    r.field.shape.extension = get_number(j, "field", "extension_inv_c", r.field.shape.extension * c) / c;
    if (j.contains("terms")) {
      const json& terms = j.at("terms");
      if (!terms.is_array()) throw ConfigError("field.terms: expected an array");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string where = "field.terms[" + std::to_string(i) + "]";
        const json& t = terms.at(i);
        reject_unknown(t, where, {"kind", "amplitude_c2", "frequency_c2", "phase", "ramp_inv_c2"});
        TimeTerm term;
        const std::string kind = get_string(t, where, "kind", "");
        if (kind == "static_step")
          term.kind = TermKind::static_step;
        else if (kind == "sinusoid")
          term.kind = TermKind::sinusoid;
        else
          throw ConfigError(where + ".kind: expected \"static_step\" or \"sinusoid\"");
        if (!t.contains("amplitude_c2")) throw ConfigError(where + ".amplitude_c2: required");
        term.amplitude = get_number(t, where, "amplitude_c2", 0.0) * c2;
        if (term.kind == TermKind::sinusoid && !t.contains("frequency_c2"))
          throw ConfigError(where + ".frequency_c2: required for a sinusoid");
        term.frequency = get_number(t, where, "frequency_c2", 0.0) * c2;
        term.phase = get_number(t, where, "phase", 0.0);
        term.ramp = get_number(t, where, "ramp_inv_c2", 0.0) / c2;
        r.field.terms.push_back(term);
      }
    }
  }

  if (root->contains("schedule")) {
    const json& j = root->at("schedule");
    reject_unknown(j, "schedule", {"t_total_inv_c2", "steps", "samples"});
    const double t_total = get_number(j, "schedule", "t_total_inv_c2", r.schedule.t_total * c2) / c2;
    const std::size_t steps = get_count(j, "schedule", "steps", r.schedule.steps);
    r.samples = get_count(j, "schedule", "samples", r.samples);
    if (r.samples < 1) throw ConfigError("schedule.samples: must be >= 1");
    if (r.samples > steps) throw ConfigError("schedule.samples: cannot exceed schedule.steps");
    r.schedule = rethrow_as_config("schedule", [&] { return Schedule::uniform(t_total, steps, r.samples); });
  }

  if (root->contains("selection")) {
    const json& j = root->at("selection");
    reject_unknown(j, "selection", {"negative_cutoff_c", "positive_cutoff_c"});
    r.selection.negative_cutoff = get_cutoff(j, "selection", "negative_cutoff_c", r.selection.negative_cutoff, c);
    r.selection.positive_cutoff = get_cutoff(j, "selection", "positive_cutoff_c", r.selection.positive_cutoff, c);
  }

  if (root->contains("ces")) {
    const json& j = root->at("ces");
    reject_unknown(j, "ces", {"E_min_c2", "E_max_c2", "N_E", "window_c2"});
    r.ces.e_min = get_number(j, "ces", "E_min_c2", r.ces.e_min / c2) * c2;
    r.ces.e_max = get_number(j, "ces", "E_max_c2", r.ces.e_max / c2) * c2;
    r.ces.points = get_count(j, "ces", "N_E", r.ces.points);
    r.ces.window = get_number(j, "ces", "window_c2", r.ces.window / c2) * c2;
  }

  if (root->contains("channels")) {
    const json& j = root->at("channels");
    reject_unknown(j, "channels", {"order_max", "allow_emission", "tolerance_c2"});
    r.channels.order_max = static_cast<int>(get_count(j, "channels", "order_max", r.channels.order_max));
    r.channels.allow_emission = get_bool(j, "channels", "allow_emission", r.channels.allow_emission);
    r.channels.tolerance = get_number(j, "channels", "tolerance_c2", r.channels.tolerance / c2) * c2;
  }

  r.workers = static_cast<unsigned>(get_count(*root, "", "workers", r.workers));
  r.output_dir = get_string(*root, "", "output_dir", r.output_dir);
  r.dump_amplitudes = get_bool(*root, "", "dump_amplitudes", r.dump_amplitudes);
  r.validate();
  return r;
}

json config_to_json(const RunConfig& r) {
  const double c = r.constants.c();
  const double c2 = r.constants.c2();
  json terms = json::array();
  for (const TimeTerm& t : r.field.terms) {
    json jt = {{"kind", t.kind == TermKind::static_step ? "static_step" : "sinusoid"},
               {"amplitude_c2", t.amplitude / c2}};
    if (t.kind == TermKind::sinusoid) jt["frequency_c2"] = t.frequency / c2;
    if (t.phase != 0.0) jt["phase"] = t.phase;
    if (t.ramp != 0.0) jt["ramp_inv_c2"] = t.ramp * c2;
    terms.push_back(jt);
  }
  json j = {
      {"scale", r.scale},
      {"constants", {{"c", c}}},
      {"grid", {{"L", r.grid.length()}, {"N_z", r.grid.size()}}},
      {"field",
       {{"edge_width_inv_c", r.field.shape.width * c}, {"extension_inv_c", r.field.shape.extension * c},
        {"terms", terms}}},
      {"schedule", {{"t_total_inv_c2", r.schedule.t_total * c2}, {"steps", r.schedule.steps}, {"samples", r.samples}}},
      {"selection",
       {{"negative_cutoff_c", cutoff_json(r.selection.negative_cutoff, c)},
        {"positive_cutoff_c", cutoff_json(r.selection.positive_cutoff, c)}}},
      {"ces",
       {{"E_min_c2", r.ces.e_min / c2},
        {"E_max_c2", r.ces.e_max / c2},
        {"N_E", r.ces.points},
        {"window_c2", r.ces.window / c2}}},
      {"channels",
       {{"order_max", r.channels.order_max},
        {"allow_emission", r.channels.allow_emission},
        {"tolerance_c2", r.channels.tolerance / c2}}},
      {"workers", r.workers},
      {"dump_amplitudes", r.dump_amplitudes},
  };
  if (r.preset) j["preset"] = *r.preset;
  if (!r.output_dir.empty()) j["output_dir"] = r.output_dir;
  return j;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": parse error: " +
                      e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

}  // namespace pairsim
