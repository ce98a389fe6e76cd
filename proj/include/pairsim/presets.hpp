#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pairsim/config.hpp"

namespace pairsim {

enum class Scale { desk, full };

struct PresetInfo {
  std::string name;
  std::string figure;
  std::string description;
};

/// Scenario presets in a fixed order.
const std::vector<PresetInfo>& list_presets();

/// "desk" or "full"; throws ConfigError otherwise.
Scale parse_scale(std::string_view text);

/// Expands a preset into a validated RunConfig. Full scale uses N_z = 4096
/// with the default 8c cutoffs; desk scale uses N_z = 1024 and 6c cutoffs.
/// Throws ConfigError for unknown names.
RunConfig preset_config(std::string_view name, Scale scale = Scale::desk, const Constants& constants = Constants());

}  // namespace pairsim
