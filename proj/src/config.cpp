#include "mped/config.hpp"

#include <cmath>

#include "mped/error.hpp"

namespace mped {

void MetricConfig::validate() const {
  if (scales.empty()) throw ConfigError("scale set must not be empty");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 1) throw ConfigError("every scale K must be >= 1");
    if (i > 0 && scales[i] >= scales[i - 1]) throw ConfigError("scales must be strictly descending");
  }
  if (p != 1 && p != 2) throw ConfigError("p must be 1 or 2");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be positive");
  for (double k : color_weights) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw ConfigError("color weights must be non-negative");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(beta_power > 0.0 && beta_power <= 1.0)) throw ConfigError("beta_power must lie in (0, 1]");
  if (hf_filter_length < 1) throw ConfigError("hf_filter_length must be >= 1");
  if (!(center_ratio > 0.0) || !std::isfinite(center_ratio)) throw ConfigError("center_ratio must be positive");
}

MetricConfig human_preset() {
  MetricConfig c;
  c.scales = {10, 5};
  c.p = 2;
  c.sigma = 1.0;
  c.color_weights = {1.0, 2.0, 1.0};
  c.alpha = 0.5;
  c.beta_power = 0.5;
  c.variant = Variant::human;
  c.color_space = ColorSpace::rgb;
  c.hf_filter_length = 4;
  c.center_ratio = 1e-4;
  return c;
}

MetricConfig machine_preset() {
  MetricConfig c = human_preset();
  c.scales = {10, 5, 1};
  c.sigma = 1e-10;
  c.variant = Variant::machine;
  return c;
}

MetricConfig preset_by_name(std::string_view name) {
  if (name == "sjtu-human") return human_preset();
  if (name == "shapenet-machine") return machine_preset();
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::array<double, 3> default_color_weights(ColorSpace space) {
  return space == ColorSpace::rgb ? std::array<double, 3>{1.0, 2.0, 1.0} : std::array<double, 3>{6.0, 1.0, 1.0};
}

std::string_view to_string(Variant v) { return v == Variant::human ? "human" : "machine"; }
std::string_view to_string(ColorSpace c) { return c == ColorSpace::rgb ? "rgb" : "yuv"; }

Variant parse_variant(std::string_view s) {
  if (s == "human") return Variant::human;
  if (s == "machine") return Variant::machine;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

ColorSpace parse_color_space(std::string_view s) {
  if (s == "rgb") return ColorSpace::rgb;
  if (s == "yuv") return ColorSpace::yuv;
  throw ConfigError("unknown color space '" + std::string(s) + "'");
}

}  // namespace mped
