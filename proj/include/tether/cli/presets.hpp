#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tether/cli/config.hpp"

namespace tether::cli {

/// Names of the configurations compiled into the binary, sorted.
std::vector<std::string> preset_names();

/// YAML text of a preset; ConfigError for unknown names.
std::string_view preset_text(std::string_view name);

ExperimentConfig load_preset(std::string_view name, const Mode* mode_override = nullptr);

}  // namespace tether::cli
