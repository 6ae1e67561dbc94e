#include "tether/cli/presets.hpp"

#include <algorithm>
#include <utility>

#include "tether/core/error.hpp"

namespace tether::cli {

namespace detail {
extern const std::pair<std::string_view, std::string_view> kPresets[];
extern const std::size_t kPresetCount;
}  // namespace detail

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < detail::kPresetCount; ++i)
        out.emplace_back(detail::kPresets[i].first);
    std::sort(out.begin(), out.end());
    return out;
}

std::string_view preset_text(std::string_view name) {
    for (std::size_t i = 0; i < detail::kPresetCount; ++i)
        if (detail::kPresets[i].first == name) return detail::kPresets[i].second;
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

ExperimentConfig load_preset(std::string_view name, const Mode* mode_override) {
    return parse_config(preset_text(name), "preset " + std::string(name), mode_override);
}

}  // namespace tether::cli
