#pragma once

#include <array>
#include <filesystem>

#include <json.hpp>

#include "ggf/filter.hpp"
#include "ggf/recommend.hpp"

namespace ggf {

using Json = nlohmann::ordered_json;

// A filter is either a preset name, a coefficient array, or an object
// {"preset": "second_order"} / {"coefficients": [2, -1]}.
FilterSpec filter_from_json(const Json& j, const std::array<double, 3>& cubic = kDefaultCubic);
Json filter_to_json(const FilterSpec& f);

// Overlays the keys present in `j` onto `base`. Unknown keys raise
// ParameterError so that typos do not pass silently.
//   alpha beta s s_u s_g s_uni filter_u filter_g filter_uni (or "filters": [
//   {"view": "g", "preset": ...}, ...]) use_membership enabled_views mask_seen
//   cubic
ModelConfig model_config_from_json(const Json& j, ModelConfig base = {});
Json model_config_to_json(const ModelConfig& cfg);

Json read_json_file(const std::filesystem::path& path);

}  // namespace ggf
