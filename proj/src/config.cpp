#include "ggf/config.hpp"

#include <fstream>
#include <set>

#include <fmt/core.h>

#include "ggf/error.hpp"

namespace ggf {

namespace {

double get_number(const Json& j, const char* key) {
  if (!j.is_number()) throw ParameterError(fmt::format("config key '{}' must be a number", key));
  return j.get<double>();
}

bool get_bool(const Json& j, const char* key) {
  if (!j.is_boolean()) throw ParameterError(fmt::format("config key '{}' must be true or false", key));
  return j.get<bool>();
}

View view_from_json(const Json& j) {
  if (!j.is_string()) throw ParameterError("view must be a string");
  const auto v = parse_view(j.get<std::string>());
  if (!v) throw ParameterError(fmt::format("unknown view '{}'", j.get<std::string>()));
  return *v;
}

}  // namespace

FilterSpec filter_from_json(const Json& j, const std::array<double, 3>& cubic) {
  if (j.is_string()) return parse_filter(j.get<std::string>(), cubic);
  if (j.is_array()) {
    FilterSpec f;
    for (const auto& c : j) f.coefficients.push_back(get_number(c, "coefficients"));
    f.validate();
    return f;
  }
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (key != "preset" && key != "coefficients") throw ParameterError(fmt::format("unknown filter key '{}'", key));
    }
    if (!j.contains("coefficients")) {
      if (!j.contains("preset")) throw ParameterError("a filter object needs 'preset' or 'coefficients'");
      return filter_from_json(j.at("preset"), cubic);
    }
    // Explicit coefficients win; a preset name alongside them is kept as the label.
    FilterSpec f = filter_from_json(j.at("coefficients"), cubic);
    if (j.contains("preset")) {
      if (!j.at("preset").is_string()) throw ParameterError("'preset' must be a string");
      f.preset_name = j.at("preset").get<std::string>();
    }
    return f;
  }
  throw ParameterError("a filter must be a preset name, a coefficient list or an object");
}

Json filter_to_json(const FilterSpec& f) {
  Json j;
  if (!f.preset_name.empty()) j["preset"] = f.preset_name;
  j["coefficients"] = f.coefficients;
  return j;
}

ModelConfig model_config_from_json(const Json& j, ModelConfig base) {
  if (!j.is_object()) throw ParameterError("model config must be a JSON object");
  static const std::set<std::string> known = {
      "alpha",    "beta",     "s",          "s_u",           "s_g",           "s_uni",     "filter_u",
      "filter_g", "filter_uni", "filters",  "use_membership", "enabled_views", "mask_seen", "cubic"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ParameterError(fmt::format("unknown config key '{}'", key));
  }

  std::array<double, 3> cubic = kDefaultCubic;
  if (j.contains("cubic")) {
    const auto& c = j.at("cubic");
    if (!c.is_array() || c.size() != 3) throw ParameterError("'cubic' must list three coefficients");
    for (std::size_t i = 0; i < 3; ++i) cubic[i] = get_number(c[i], "cubic");
  }

  if (j.contains("alpha")) base.alpha = get_number(j.at("alpha"), "alpha");
  if (j.contains("beta")) base.beta = get_number(j.at("beta"), "beta");
  if (j.contains("s")) base.s = get_number(j.at("s"), "s");
  const char* s_keys[] = {"s_u", "s_g", "s_uni"};
  const char* f_keys[] = {"filter_u", "filter_g", "filter_uni"};
  for (const View v : kAllViews) {
    const int i = static_cast<int>(v);
    if (j.contains(s_keys[i])) base.s_override[i] = get_number(j.at(s_keys[i]), s_keys[i]);
    if (j.contains(f_keys[i])) base.filter_for(v) = filter_from_json(j.at(f_keys[i]), cubic);
  }
  if (j.contains("filters")) {
    const auto& list = j.at("filters");
    if (!list.is_array()) throw ParameterError("'filters' must be an array");
    for (const auto& entry : list) {
      if (!entry.is_object() || !entry.contains("view")) {
        throw ParameterError("each 'filters' entry needs a 'view'");
      }
      Json spec = entry;
      spec.erase("view");
      base.filter_for(view_from_json(entry.at("view"))) = filter_from_json(spec, cubic);
    }
  }
  if (j.contains("use_membership")) base.use_membership = get_bool(j.at("use_membership"), "use_membership");
  if (j.contains("mask_seen")) base.mask_seen = get_bool(j.at("mask_seen"), "mask_seen");
  if (j.contains("enabled_views")) {
    const auto& list = j.at("enabled_views");
    if (!list.is_array()) throw ParameterError("'enabled_views' must be an array of view names");
    base.enabled = {false, false, false};
    for (const auto& v : list) base.enabled[static_cast<int>(view_from_json(v))] = true;
  }
  base.validate();
  return base;
}

Json model_config_to_json(const ModelConfig& cfg) {
  Json j;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["s"] = cfg.s;
  const char* s_keys[] = {"s_u", "s_g", "s_uni"};
  const char* f_keys[] = {"filter_u", "filter_g", "filter_uni"};
  for (const View v : kAllViews) {
    const int i = static_cast<int>(v);
    if (cfg.s_override[i]) j[s_keys[i]] = *cfg.s_override[i];
  }
  for (const View v : kAllViews) j[f_keys[static_cast<int>(v)]] = filter_to_json(cfg.filter_for(v));
  j["use_membership"] = cfg.use_membership;
  Json views = Json::array();
  for (const View v : kAllViews) {
    if (cfg.view_enabled(v)) views.push_back(std::string(view_name(v)));
  }
  j["enabled_views"] = views;
  j["mask_seen"] = cfg.mask_seen;
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace ggf
