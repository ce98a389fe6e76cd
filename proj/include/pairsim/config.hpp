#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pairsim/amplitudes.hpp"
#include "pairsim/ces.hpp"
#include "pairsim/fields.hpp"
#include "pairsim/grid.hpp"
#include "pairsim/propagator.hpp"

namespace pairsim {

/// Invalid or unparsable configuration. The message names the field (or the
/// line and column of a syntax error).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChannelOptions {
  int order_max = 6;
  bool allow_emission = false;
  /// Assignment half-width (a.u.).
  double tolerance = 0.0;
};

/// Fully resolved run description, all values in atomic units.
struct RunConfig {
  Constants constants;
  GridSpec grid{2.5, 1024};
  FieldConfig field;
  Schedule schedule;
  std::size_t samples = 50;
  ModeSelection selection;
  CesSpec ces;
  ChannelOptions channels;
  std::string output_dir;
  unsigned workers = 1;
  bool dump_amplitudes = false;
  std::optional<std::string> preset;
  std::string scale = "custom";

  /// Cross-field checks; throws ConfigError.
  void validate() const;
  /// Channel lattice implied by the field: sinusoid frequencies, summed
  /// static height as V0, energies from 2c^2 - tolerance to the CES maximum.
  std::vector<ChannelSpec> channel_lattice() const;
};

/// The settings every run shares unless overridden: L = 2.5, N_z = 1024,
/// W = 0.3/c, D = 8/c, t0 = 40 pi / c^2 with 4000 steps and 50 samples,
/// cutoffs 8c, CES over [2c^2, 8c^2] with 1000 points and a 0.04c^2 window.
RunConfig default_run_config(const Constants& constants = Constants());

/// Parses the JSON form (energies in c^2, widths in 1/c, times in 1/c^2,
/// momenta in c). Unknown keys are rejected. A manifest written by a run is
/// accepted too; its "config" member is used.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

/// Reads and validates a config file (JSON, comments allowed).
RunConfig load_config(const std::filesystem::path& path);
/// Same, from text; `origin` is used in error messages.
RunConfig parse_config(const std::string& text, const std::string& origin = "<config>");

}  // namespace pairsim
