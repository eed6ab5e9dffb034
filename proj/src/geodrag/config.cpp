#include "geodiff/geodrag/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "geodiff/error.hpp"

namespace geodiff::drag {
namespace {

using nlohmann::json;

struct Field {
  const char* key;
  const char* help;
  std::function<json(const DragConfig&)> get;
  std::function<void(DragConfig&, const json&)> put;
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw InputError("config key '" + key + "': cannot parse '" + text + "'");
  return value;
}

template <typename T>
T json_as(const char* key, const json& v) {
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw InputError(std::string("config key '") + key + "' must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw InputError(std::string("config key '") + key + "' must be an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw InputError(std::string("config key '") + key + "' must be a number");
    } else {
      if (!v.is_string()) throw InputError(std::string("config key '") + key + "' must be a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key '") + key + "': " + e.what());
  }
}

#define GEODIFF_FIELD(name, type, help)                                          \
  Field {                                                                        \
    #name, help, [](const DragConfig& c) { return json(c.name); },               \
        [](DragConfig& c, const json& v) { c.name = json_as<type>(#name, v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      GEODIFF_FIELD(r1, int, "motion-supervision patch radius (cells)"),
      GEODIFF_FIELD(r2, int, "point-tracking search radius (cells)"),
      GEODIFF_FIELD(r_grad, int, "gradient-mask radius around fixated points (cells)"),
      GEODIFF_FIELD(r_cp, int, "copy-paste patch radius (cells)"),
      GEODIFF_FIELD(beta_step, double, "handle step size along the drag direction (cells)"),
      GEODIFF_FIELD(eta, double, "gradient-descent learning rate"),
      GEODIFF_FIELD(J, int, "gradient steps per drag iteration"),
      GEODIFF_FIELD(B, int, "drag iterations per timestep"),
      GEODIFF_FIELD(T_drag, int, "timesteps with a drag phase"),
      GEODIFF_FIELD(N_post, int, "copy-paste pinning timesteps after dragging"),
      GEODIFF_FIELD(lambda, double, "weight of the non-editable-region term"),
      GEODIFF_FIELD(l, double, "fixation entry threshold (cells)"),
      GEODIFF_FIELD(u, double, "fixation exit threshold (cells)"),
      GEODIFF_FIELD(alpha, double, "copy-paste amplification factor (>= 1)"),
      GEODIFF_FIELD(beta_blur, double, "retention of the vacated source region, in [0, 1)"),
      GEODIFF_FIELD(seed, std::uint64_t, "seed for all randomness"),
      GEODIFF_FIELD(fixation, bool, "allow points to enter the fixation set"),
      GEODIFF_FIELD(reentry, bool, "release fixated points once e >= u"),
      GEODIFF_FIELD(final_copy_paste, bool, "run the post-drag copy-paste pinning stage"),
      Field{"extractor.kind", "feature extractor: identity | box3 | conv (conv layers from config file)",
            [](const DragConfig& c) { return json(c.extractor_kind); },
            [](DragConfig& c, const json& v) { c.extractor_kind = json_as<std::string>("extractor.kind", v); }},
      Field{"extractor.layers", "conv layer list (config file only)",
            [](const DragConfig& c) { return c.extractor_layers.is_null() ? json::array() : c.extractor_layers; },
            [](DragConfig& c, const json& v) {
              if (!v.is_array()) throw InputError("config key 'extractor.layers' must be an array");
              c.extractor_layers = v;
            }},
      Field{"denoiser.kind", "denoiser between timesteps: identity | gaussian | external",
            [](const DragConfig& c) { return json(c.denoiser_kind); },
            [](DragConfig& c, const json& v) { c.denoiser_kind = json_as<std::string>("denoiser.kind", v); }},
      Field{"denoiser.sigma", "gaussian denoiser standard deviation (cells)",
            [](const DragConfig& c) { return json(c.denoiser_sigma); },
            [](DragConfig& c, const json& v) { c.denoiser_sigma = json_as<double>("denoiser.sigma", v); }},
      Field{"denoiser.command", "external denoiser command with {in} and {out} placeholders",
            [](const DragConfig& c) { return json(c.denoiser_command); },
            [](DragConfig& c, const json& v) { c.denoiser_command = json_as<std::string>("denoiser.command", v); }},
  };
  return table;
}

#undef GEODIFF_FIELD

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InputError("config field '" + field + "': " + what);
}

}  // namespace

void DragConfig::validate() const {
  require(r1 >= 0, "r1", "must be >= 0");
  require(r2 >= 0, "r2", "must be >= 0");
  require(r_grad >= 0, "r_grad", "must be >= 0");
  require(r_cp >= 0, "r_cp", "must be >= 0");
  require(r2 >= r1, "r2", "must be >= r1");
  require(std::isfinite(beta_step) && beta_step >= 0.0, "beta_step", "must be finite and >= 0");
  require(std::isfinite(eta) && eta > 0.0, "eta", "must be > 0");
  require(J >= 1, "J", "must be >= 1");
  require(B >= 1, "B", "must be >= 1");
  require(T_drag >= 1, "T_drag", "must be >= 1");
  require(N_post >= 0, "N_post", "must be >= 0");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda", "must be >= 0");
  require(std::isfinite(l) && l > 0.0, "l", "must be > 0");
  require(u > l, "u", "must be > l");
  require(std::isfinite(alpha) && alpha >= 1.0, "alpha", "must be >= 1");
  require(beta_blur >= 0.0 && beta_blur < 1.0, "beta_blur", "must be in [0, 1)");
  require(extractor_kind == "identity" || extractor_kind == "box3" || extractor_kind == "conv", "extractor.kind",
          "must be identity, box3 or conv");
  require(extractor_kind != "conv" || (extractor_layers.is_array() && !extractor_layers.empty()), "extractor.layers",
          "conv extractor needs at least one layer");
  require(denoiser_kind == "identity" || denoiser_kind == "gaussian" || denoiser_kind == "external", "denoiser.kind",
          "must be identity, gaussian or external");
  require(denoiser_kind != "gaussian" || (std::isfinite(denoiser_sigma) && denoiser_sigma > 0.0), "denoiser.sigma",
          "must be > 0");
  require(denoiser_kind != "external" || !denoiser_command.empty(), "denoiser.command",
          "required for the external denoiser");
}

ff::FeatureExtractor DragConfig::make_extractor() const {
  if (extractor_kind == "conv") return ff::FeatureExtractor::from_json({{"kind", "conv"}, {"layers", extractor_layers}});
  return ff::FeatureExtractor::from_json({{"kind", extractor_kind}});
}

Denoiser DragConfig::make_denoiser() const {
  if (denoiser_kind == "gaussian") return Denoiser::gaussian(denoiser_sigma);
  if (denoiser_kind == "external") return Denoiser::external(denoiser_command, {});
  return Denoiser::identity();
}

nlohmann::json DragConfig::to_json() const {
  json j = json::object();
  for (const auto& f : fields()) {
    const std::string key = f.key;
    const auto dot = key.find('.');
    if (dot == std::string::npos)
      j[key] = f.get(*this);
    else
      j[key.substr(0, dot)][key.substr(dot + 1)] = f.get(*this);
  }
  return j;
}

DragConfig DragConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  DragConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (value.is_object() && (key == "extractor" || key == "denoiser")) {
      for (const auto& [sub, v] : value.items()) {
        const Field* f = find_field(key + "." + sub);
        if (!f) throw InputError("unknown config key '" + key + "." + sub + "'");
        f->put(cfg, v);
      }
      continue;
    }
    const Field* f = find_field(key);
    if (!f) throw InputError("unknown config key '" + key + "'");
    f->put(cfg, value);
  }
  return cfg;
}

void DragConfig::set(const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw InputError("unknown config key '" + key + "'");
  const json current = f->get(*this);
  json parsed;
  if (current.is_boolean()) {
    if (value != "true" && value != "false") throw InputError("config key '" + key + "' expects true or false");
    parsed = value == "true";
  } else if (current.is_number_unsigned()) {
    parsed = parse_number<std::uint64_t>(key, value);
  } else if (current.is_number_integer()) {
    parsed = parse_number<int>(key, value);
  } else if (current.is_number_float()) {
    parsed = parse_number<double>(key, value);
  } else if (current.is_string()) {
    parsed = value;
  } else {
    try {
      parsed = json::parse(value);
    } catch (const json::exception&) {
      throw InputError("config key '" + key + "': value is not valid JSON");
    }
  }
  f->put(*this, parsed);
}

std::string DragConfig::hash() const { return fnv1a_hex(to_json().dump()); }

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    const DragConfig defaults;
    for (const auto& f : fields()) out.push_back({f.key, f.get(defaults).dump(), f.help});
    return out;
  }();
  return keys;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace geodiff::drag
